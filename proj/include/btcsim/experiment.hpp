#pragma once

// Monte Carlo harness on top of the engine: replicated runs, binomial
// intervals, the block-share report and the analytic catch-up oracle.

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "btcsim/engine.hpp"
#include "btcsim/scenario.hpp"

namespace btcsim {

/// The attack succeeded: the duplicate's block reached the attacker's main
/// chain before the run ended. The engine latches the first observation.
bool success_predicate(const RunOutcome& outcome);

struct Interval {
  double low = 0.0;
  double high = 1.0;
};

/// Exact two-sided binomial interval for `successes` out of `trials`.
Interval clopper_pearson(std::int64_t successes, std::int64_t trials, double confidence = 0.95);

struct EstimateResult {
  std::int32_t depth = 0;
  std::int64_t successes = 0;
  std::int64_t replications = 0;
  double point = 0.0;
  double ci_low = 0.0;
  double ci_high = 1.0;
  double confidence = 0.95;
};

EstimateResult make_estimate(std::int32_t depth, std::int64_t successes, std::int64_t replications,
                             double confidence = 0.95);

/// Worker threads used when a caller passes 0.
unsigned default_threads();

/// Double-spend probability per confirmation depth. Replication r at depth d
/// runs with derive_seed(config.seed, d, r), so the result does not depend
/// on thread count or completion order.
std::vector<EstimateResult> estimate(const ScenarioConfig& config, const std::vector<std::int32_t>& depths,
                                     unsigned threads = 0);

struct BlockShare {
  PoolId pool = 0;
  std::int64_t blocks = 0;
  double fraction = 0.0;
};

struct BlockShareReport {
  std::vector<BlockShare> rows;
  std::int64_t runs = 0;
  std::int64_t total_blocks = 0;
};

/// Main-chain blocks by creator, summed over config.replications runs and
/// extended with further runs until at least `min_blocks` are counted.
/// Throws ConfigError for a configuration with an attacker.
BlockShareReport block_share_report(const ScenarioConfig& config, std::int64_t min_blocks = 0, unsigned threads = 0);

/// Probability that a branch `deficit` blocks behind ever becomes strictly
/// longer when each new block is the attacker's with probability `q`.
/// Solved exactly on an absorbing chain truncated where the value drops
/// below 1e-15; q >= 1/2 returns 1.
double catchup_oracle(double q, std::int32_t deficit);

struct RaceEstimate {
  double q = 0.0;
  std::int32_t deficit = 0;
  EstimateResult estimate;
  double oracle = 0.0;
  bool oracle_inside() const { return estimate.ci_low <= oracle && oracle <= estimate.ci_high; }
};

/// Catch-up frequency of the stripped-down race for attacker fraction
/// `q`, with the honest fraction split like the default honest pools.
RaceEstimate estimate_catchup(double q, std::int32_t deficit, std::int64_t replications, std::uint64_t seed,
                              std::int64_t max_events, unsigned threads = 0);

// Output. Column sets are fixed; see README for the schema.

void write_estimates_csv(std::ostream& out, const std::vector<EstimateResult>& results);
void write_estimates_json(std::ostream& out, const std::vector<EstimateResult>& results);
void write_estimates_table(std::ostream& out, const std::vector<EstimateResult>& results);

void write_shares_csv(std::ostream& out, const BlockShareReport& report);
void write_shares_json(std::ostream& out, const BlockShareReport& report);
void write_shares_table(std::ostream& out, const BlockShareReport& report);

}  // namespace btcsim
