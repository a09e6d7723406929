#include "btcsim/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <mutex>
#include <thread>

#include <boost/math/special_functions/beta.hpp>
#include "json.hpp"

#include "btcsim/rng.hpp"

namespace btcsim {

bool success_predicate(const RunOutcome& outcome) { return outcome.success; }

Interval clopper_pearson(std::int64_t successes, std::int64_t trials, double confidence) {
  if (trials <= 0 || successes < 0 || successes > trials) throw std::invalid_argument("clopper_pearson: bad counts");
  if (!(confidence > 0.0 && confidence < 1.0)) throw std::invalid_argument("clopper_pearson: bad confidence");
  const double alpha = 1.0 - confidence;
  const auto k = static_cast<double>(successes);
  const auto n = static_cast<double>(trials);
  Interval ci;
  ci.low = successes == 0 ? 0.0 : boost::math::ibeta_inv(k, n - k + 1.0, alpha / 2.0);
  ci.high = successes == trials ? 1.0 : boost::math::ibeta_inv(k + 1.0, n - k, 1.0 - alpha / 2.0);
  return ci;
}

EstimateResult make_estimate(std::int32_t depth, std::int64_t successes, std::int64_t replications,
                             double confidence) {
  EstimateResult r;
  r.depth = depth;
  r.successes = successes;
  r.replications = replications;
  r.confidence = confidence;
  r.point = static_cast<double>(successes) / static_cast<double>(replications);
  const Interval ci = clopper_pearson(successes, replications, confidence);
  r.ci_low = ci.low;
  r.ci_high = ci.high;
  return r;
}

unsigned default_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

namespace {

// Calls fn(i) for i in [0, n) on up to `threads` workers. fn must only
// write to slot i of its output.
template <class Fn>
void parallel_for(std::int64_t n, unsigned threads, Fn fn) {
  if (threads == 0) threads = default_threads();
  threads = static_cast<unsigned>(std::min<std::int64_t>(threads, std::max<std::int64_t>(n, 1)));
  if (threads <= 1) {
    for (std::int64_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::int64_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  std::vector<std::thread> workers;
  std::mutex failure_mutex;
  for (unsigned t = 0; t < threads; ++t) {
    workers.emplace_back([&] {
      for (std::int64_t i = next++; i < n && !failed; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          failed = true;
        }
      }
    });
  }
  for (auto& w : workers) w.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

std::vector<EstimateResult> estimate(const ScenarioConfig& config, const std::vector<std::int32_t>& depths,
                                     unsigned threads) {
  validate(config);
  std::vector<EstimateResult> results;
  for (std::int32_t depth : depths) {
    ScenarioConfig c = config;
    c.confirmation_depth = depth;
    validate(c);
    const std::int64_t n = c.replications;
    std::vector<char> hit(static_cast<std::size_t>(n), 0);
    parallel_for(n, threads, [&](std::int64_t r) {
      const auto seed = derive_seed(c.seed, static_cast<std::uint64_t>(depth), static_cast<std::uint64_t>(r));
      hit[static_cast<std::size_t>(r)] = success_predicate(run(c, seed)) ? 1 : 0;
    });
    results.push_back(make_estimate(depth, std::count(hit.begin(), hit.end(), 1), n));
  }
  return results;
}

BlockShareReport block_share_report(const ScenarioConfig& config, std::int64_t min_blocks, unsigned threads) {
  validate(config);
  if (config.malicious_pool() >= 0) throw ConfigError("block-share report needs an honest-only configuration");
  const std::size_t pools = config.pools.size();
  std::vector<std::int64_t> totals(pools, 0);
  BlockShareReport report;
  // Rounds are deterministic in size, so the result does not depend on
  // thread count.
  std::int64_t batch = config.replications;
  constexpr std::uint64_t kStream = 0x5348415245ULL;
  while (true) {
    std::vector<std::vector<std::int32_t>> counts(static_cast<std::size_t>(batch));
    const std::int64_t base = report.runs;
    parallel_for(batch, threads, [&](std::int64_t i) {
      const auto seed = derive_seed(config.seed, kStream, static_cast<std::uint64_t>(base + i));
      counts[static_cast<std::size_t>(i)] = run(config, seed).main_chain_blocks;
    });
    for (const auto& c : counts) {
      for (std::size_t p = 0; p < pools && p < c.size(); ++p) totals[p] += c[p];
    }
    report.runs += batch;
    report.total_blocks = 0;
    for (auto t : totals) report.total_blocks += t;
    if (report.total_blocks >= min_blocks) break;
    if (report.total_blocks == 0 && report.runs > 1000000) throw std::runtime_error("no blocks were mined");
    batch = std::max<std::int64_t>(1, config.replications);
  }
  for (std::size_t p = 0; p < pools; ++p) {
    const double fraction =
        report.total_blocks > 0 ? static_cast<double>(totals[p]) / static_cast<double>(report.total_blocks) : 0.0;
    report.rows.push_back({static_cast<PoolId>(p), totals[p], fraction});
  }
  return report;
}

double catchup_oracle(double q, std::int32_t deficit) {
  if (!(q >= 0.0 && q <= 1.0) || deficit < 0) throw std::invalid_argument("catchup_oracle: bad arguments");
  if (q >= 0.5) return 1.0;
  if (q == 0.0) return 0.0;
  const double p = 1.0 - q;
  // State x = blocks the attacker still has to gain, success at x = -1.
  // P(x) = q P(x-1) + p P(x+1), truncated at a state whose value is below
  // 1e-15, with P(-1) = 1 and P(N) = 0. Solved by the Thomas algorithm.
  const double ratio = q / p;
  const double needed = std::log(1e-15) / std::log(ratio);
  const auto n = static_cast<std::int64_t>(std::min(1e7, needed + deficit + 16.0));
  // Unknowns P(0..n-1): -q P(x-1) + P(x) - p P(x+1) = 0.
  std::vector<double> c(static_cast<std::size_t>(n)), d(static_cast<std::size_t>(n));
  for (std::int64_t x = 0; x < n; ++x) {
    const double rhs = x == 0 ? q : 0.0;
    const double sub = x == 0 ? 0.0 : -q;
    const double denom = 1.0 - sub * (x == 0 ? 0.0 : c[static_cast<std::size_t>(x - 1)]);
    c[static_cast<std::size_t>(x)] = -p / denom;
    d[static_cast<std::size_t>(x)] = (rhs - sub * (x == 0 ? 0.0 : d[static_cast<std::size_t>(x - 1)])) / denom;
  }
  std::vector<double> v(static_cast<std::size_t>(n));
  v[static_cast<std::size_t>(n - 1)] = d[static_cast<std::size_t>(n - 1)];
  for (std::int64_t x = n - 2; x >= 0; --x) {
    v[static_cast<std::size_t>(x)] = d[static_cast<std::size_t>(x)] - c[static_cast<std::size_t>(x)] * v[static_cast<std::size_t>(x + 1)];
  }
  if (deficit >= n) return 0.0;
  return std::clamp(v[static_cast<std::size_t>(deficit)], 0.0, 1.0);
}

RaceEstimate estimate_catchup(double q, std::int32_t deficit, std::int64_t replications, std::uint64_t seed,
                              std::int64_t max_events, unsigned threads) {
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("estimate_catchup: q must lie in (0, 1)");
  if (replications < 1) throw std::invalid_argument("estimate_catchup: need at least one replication");
  RaceConfig rc;
  // Honest side split 18:22:10 like the default honest pools.
  for (double w : {0.18, 0.22, 0.10}) rc.honest_shares.push_back((1.0 - q) * w / 0.5);
  rc.attacker_share = q;
  rc.deficit = deficit;
  rc.max_events = max_events;
  const auto stream = static_cast<std::uint64_t>(std::llround(q * 1e6)) * 1000 + static_cast<std::uint64_t>(deficit);
  std::vector<char> hit(static_cast<std::size_t>(replications), 0);
  parallel_for(replications, threads, [&](std::int64_t r) {
    hit[static_cast<std::size_t>(r)] = run_catchup_race(rc, derive_seed(seed, stream, static_cast<std::uint64_t>(r))).caught_up;
  });
  RaceEstimate out;
  out.q = q;
  out.deficit = deficit;
  out.estimate = make_estimate(deficit, std::count(hit.begin(), hit.end(), 1), replications);
  out.oracle = catchup_oracle(q, deficit);
  return out;
}

void write_estimates_csv(std::ostream& out, const std::vector<EstimateResult>& results) {
  out << "depth,successes,runs,point,ci_low,ci_high\n";
  char line[160];
  for (const auto& r : results) {
    std::snprintf(line, sizeof line, "%d,%lld,%lld,%.6f,%.6f,%.6f\n", r.depth, static_cast<long long>(r.successes),
                  static_cast<long long>(r.replications), r.point, r.ci_low, r.ci_high);
    out << line;
  }
}

void write_estimates_json(std::ostream& out, const std::vector<EstimateResult>& results) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : results) {
    rows.push_back({{"depth", r.depth},
                    {"successes", r.successes},
                    {"runs", r.replications},
                    {"point", r.point},
                    {"ci_low", r.ci_low},
                    {"ci_high", r.ci_high},
                    {"confidence", r.confidence}});
  }
  out << nlohmann::json{{"estimates", rows}}.dump(2) << '\n';
}

void write_estimates_table(std::ostream& out, const std::vector<EstimateResult>& results) {
  char line[160];
  std::snprintf(line, sizeof line, "%-13s  %-11s  %-17s  %s\n", "Confirmations", "Probability", "CI", "Runs");
  out << line;
  for (const auto& r : results) {
    char ci[48];
    std::snprintf(ci, sizeof ci, "[%.3f, %.3f]", r.ci_low, r.ci_high);
    std::snprintf(line, sizeof line, "%-13d  %-11.3f  %-17s  %lld\n", r.depth, r.point, ci,
                  static_cast<long long>(r.replications));
    out << line;
  }
}

void write_shares_csv(std::ostream& out, const BlockShareReport& report) {
  out << "pool_id,blocks,fraction\n";
  char line[96];
  for (const auto& r : report.rows) {
    std::snprintf(line, sizeof line, "%d,%lld,%.6f\n", r.pool, static_cast<long long>(r.blocks), r.fraction);
    out << line;
  }
}

void write_shares_json(std::ostream& out, const BlockShareReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : report.rows) rows.push_back({{"pool_id", r.pool}, {"blocks", r.blocks}, {"fraction", r.fraction}});
  out << nlohmann::json{{"runs", report.runs}, {"total_blocks", report.total_blocks}, {"shares", rows}}.dump(2)
      << '\n';
}

void write_shares_table(std::ostream& out, const BlockShareReport& report) {
  char line[96];
  std::snprintf(line, sizeof line, "%-5s  %-8s  %s\n", "Pool", "Blocks", "Fraction");
  out << line;
  for (const auto& r : report.rows) {
    std::snprintf(line, sizeof line, "%-5d  %-8lld  %.3f\n", r.pool, static_cast<long long>(r.blocks), r.fraction);
    out << line;
  }
  out << report.total_blocks << " blocks over " << report.runs << " runs\n";
}

}  // namespace btcsim
