#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "btcsim/model.hpp"
#include "btcsim/rng.hpp"

namespace btcsim {

/// Difficulty and hash rate observed on 1 August 2015.
inline constexpr double kDefaultDifficulty = 52'278'304'845.59;
inline constexpr double kDefaultHashrate = 413'204'212.12e9;  // hashes per second

/// Converts hash-rate shares into block-discovery rates:
/// mean time = difficulty * 2^32 / (share * network hash rate).
struct RateModel {
  double difficulty = kDefaultDifficulty;
  double network_hashrate = kDefaultHashrate;

  /// Blocks per second for a pool holding `share` of the network.
  double rate(double share) const { return share * network_hashrate / (difficulty * 0x1.0p32); }

  /// Expected seconds between blocks for that pool.
  double mean_time(double share) const { return difficulty * 0x1.0p32 / (share * network_hashrate); }
};

/// One exponential draw of the time `share` needs to find a block.
/// Throws std::invalid_argument for a non-positive share.
double sample_mining_time(const RateModel& model, double share, Rng& rng);

struct RunBounds {
  std::int64_t max_events = 500'000;
  std::int32_t max_blocks = 200;
  std::int32_t max_transactions = 200;

  friend bool operator==(const RunBounds&, const RunBounds&) = default;
};

struct PoolSpec {
  double share = 0.0;
  bool malicious = false;

  friend bool operator==(const PoolSpec&, const PoolSpec&) = default;
};

struct ScenarioConfig {
  RateModel rates;
  std::vector<PoolSpec> pools{{0.18, false}, {0.22, false}, {0.10, false}, {0.50, true}};
  std::int32_t honest_peers = 3;
  std::int32_t malicious_peers = 1;
  std::int32_t confirmation_depth = 1;
  PeerId victim = 0;
  RunBounds bounds;
  std::int32_t replications = 1000;
  std::uint64_t seed = 42;

  std::int32_t peer_count() const { return honest_peers + malicious_peers; }
  bool attack_enabled() const;
  /// Index of the malicious pool, or -1.
  int malicious_pool() const;

  friend bool operator==(const ScenarioConfig& a, const ScenarioConfig& b) {
    return a.rates.difficulty == b.rates.difficulty && a.rates.network_hashrate == b.rates.network_hashrate &&
           a.pools == b.pools && a.honest_peers == b.honest_peers && a.malicious_peers == b.malicious_peers &&
           a.confirmation_depth == b.confirmation_depth && a.victim == b.victim && a.bounds == b.bounds &&
           a.replications == b.replications && a.seed == b.seed;
  }
};

/// Same pools as the default attack scenario with the attacker removed and
/// every peer honest; shares 10/18/22/50.
ScenarioConfig honest_scenario();

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Throws ConfigError describing the first problem found.
void validate(const ScenarioConfig& config);

}  // namespace btcsim
