#include "btcsim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace btcsim {

double sample_mining_time(const RateModel& model, double share, Rng& rng) {
  if (!(share > 0.0)) throw std::invalid_argument("pool share must be positive to mine");
  return rng.exponential(model.rate(share));
}

bool ScenarioConfig::attack_enabled() const { return malicious_pool() >= 0 && malicious_peers == 1; }

int ScenarioConfig::malicious_pool() const {
  auto it = std::find_if(pools.begin(), pools.end(), [](const PoolSpec& p) { return p.malicious; });
  return it == pools.end() ? -1 : static_cast<int>(it - pools.begin());
}

ScenarioConfig honest_scenario() {
  ScenarioConfig config;
  config.pools = {{0.10, false}, {0.18, false}, {0.22, false}, {0.50, false}};
  config.honest_peers = 4;
  config.malicious_peers = 0;
  return config;
}

void validate(const ScenarioConfig& c) {
  if (!(c.rates.difficulty > 0.0) || !std::isfinite(c.rates.difficulty)) throw ConfigError("difficulty must be positive");
  if (!(c.rates.network_hashrate > 0.0) || !std::isfinite(c.rates.network_hashrate)) {
    throw ConfigError("hashrate must be positive");
  }
  if (c.pools.empty()) throw ConfigError("at least one pool is required");
  double total = 0.0;
  int malicious = 0;
  for (std::size_t i = 0; i < c.pools.size(); ++i) {
    const PoolSpec& p = c.pools[i];
    if (!(p.share >= 0.0) || p.share > 1.0) throw ConfigError("pool " + std::to_string(i) + " share outside [0,1]");
    // A zero share is only meaningful for the attacker: it disables the attack.
    if (!p.malicious && p.share == 0.0) throw ConfigError("honest pool " + std::to_string(i) + " has zero share");
    total += p.share;
    malicious += p.malicious ? 1 : 0;
  }
  if (total > 1.0 + 1e-9) throw ConfigError("pool shares sum to " + std::to_string(total) + ", more than 1");
  if (malicious > 1) throw ConfigError("at most one malicious pool is supported");
  if (c.malicious_peers < 0 || c.malicious_peers > 1) throw ConfigError("malicious peers must be 0 or 1");
  if (malicious != c.malicious_peers) throw ConfigError("a malicious pool needs exactly one colluding malicious peer");
  if (c.honest_peers < 1) throw ConfigError("at least one honest peer is required");
  if (c.victim < 0 || c.victim >= c.honest_peers) throw ConfigError("victim must be an honest peer id");
  if (c.confirmation_depth < 1) throw ConfigError("confirmation depth must be at least 1");
  if (c.bounds.max_events < 1) throw ConfigError("max_events must be positive");
  if (c.bounds.max_blocks < kGenesisBlock + 1) throw ConfigError("max_blocks must be at least 2");
  if (c.bounds.max_transactions < c.peer_count()) throw ConfigError("max_transactions must cover the endowments");
  if (c.replications < 1) throw ConfigError("replications must be at least 1");
}

}  // namespace btcsim
