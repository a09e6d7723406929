// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "btcsim/chain.hpp"
#include "btcsim/engine.hpp"
#include "btcsim/experiment.hpp"
#include "safety.hpp"

using namespace btcsim;

namespace {

int failures = 0;

void report(const char* name, bool ok, const std::string& detail, double seconds) {
  std::printf("[%s] %-28s %s (%.1fs)\n", ok ? "PASS" : "FAIL", name, detail.c_str(), seconds);
  std::fflush(stdout);
  if (!ok) ++failures;
}

template <class Fn>
void criterion(const char* name, Fn fn) {
  const auto start = std::chrono::steady_clock::now();
  std::string detail;
  bool ok = false;
  try {
    ok = fn(detail);
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  report(name, ok, detail, s);
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[200];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

// Published double-spend intervals for depths 1..4 and the run counts.
struct PaperRow {
  int depth;
  double low, high;
};
constexpr PaperRow kPaperRows[] = {
    {1, 0.870781, 0.970278}, {2, 0.855061, 0.954924}, {3, 0.797987, 0.897941}, {4, 0.734029, 0.833722}};

std::vector<EstimateResult> table_estimates;

ScenarioConfig random_honest_config(Rng& rng) {
  ScenarioConfig c = honest_scenario();
  const auto pools = 1 + static_cast<int>(rng.below(5));
  std::vector<double> w;
  double sum = 0.0;
  for (int i = 0; i < pools; ++i) {
    w.push_back(0.05 + rng.uniform01());
    sum += w.back();
  }
  const double scale = (0.5 + 0.5 * rng.uniform01()) / sum;
  c.pools.clear();
  for (double x : w) c.pools.push_back({x * scale, false});
  c.honest_peers = 1 + static_cast<int>(rng.below(6));
  c.bounds.max_blocks = 20 + static_cast<int>(rng.below(181));
  c.bounds.max_transactions = c.peer_count() + 10 + static_cast<int>(rng.below(190));
  return c;
}

}  // namespace

int main() {
  criterion("table1-ci-overlap", [](std::string& detail) {
    ScenarioConfig c;
    c.replications = 1000;
    table_estimates = estimate(c, {1, 2, 3, 4});
    bool ok = true;
    for (std::size_t i = 0; i < table_estimates.size(); ++i) {
      const auto& r = table_estimates[i];
      const auto& p = kPaperRows[i];
      const bool overlap = r.ci_low <= p.high && p.low <= r.ci_high;
      ok = ok && overlap && r.replications >= 1000;
      detail += fmt("d%.0f=%.3f[%.3f,%.3f]", r.depth, r.point, r.ci_low, r.ci_high) + (overlap ? " " : "! ");
    }
    detail += fmt("n=%.0f", static_cast<double>(c.replications));
    return ok;
  });

  criterion("monotonic-trend", [](std::string& detail) {
    if (table_estimates.size() != 4) {
      detail = "no estimates";
      return false;
    }
    bool ok = true;
    for (std::size_t i = 0; i + 1 < table_estimates.size(); ++i) {
      const auto& a = table_estimates[i];
      const auto& b = table_estimates[i + 1];
      const double hw = std::max(a.ci_high - a.ci_low, b.ci_high - b.ci_low) / 2.0;
      const bool step_ok = b.point <= a.point + 2.0 * hw;
      ok = ok && step_ok;
      detail += fmt("%.3f->%.3f(slack %.3f)", a.point, b.point, 2.0 * hw) + (step_ok ? " " : "! ");
    }
    return ok;
  });

  criterion("mining-time-mean", [](std::string& detail) {
    const RateModel model;
    Rng rng(derive_seed(42, 0x6571, 0));
    const int n = 100000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += sample_mining_time(model, 0.15, rng);
    const double mean = sum / n;
    detail = fmt("mean %.1f s over 1e5 samples, target 3622 s +-2%%", mean);
    return std::abs(mean - 3622.0) <= 0.02 * 3622.0;
  });

  criterion("block-share-proportions", [](std::string& detail) {
    ScenarioConfig c = honest_scenario();
    c.replications = 10;
    const BlockShareReport r = block_share_report(c, 2000);
    bool ok = r.total_blocks >= 2000;
    std::size_t top = 0;
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
      const double share = c.pools[i].share;
      ok = ok && std::abs(r.rows[i].fraction - share) <= 0.05;
      if (r.rows[i].blocks > r.rows[top].blocks) top = i;
      detail += fmt("%.3f/%.2f ", r.rows[i].fraction, share);
    }
    // The 50% pool must be strictly first.
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
      if (i != top && r.rows[i].blocks >= r.rows[top].blocks) ok = false;
    }
    ok = ok && c.pools[top].share == 0.50;
    detail += fmt("blocks=%.0f runs=%.0f top=pool%.0f", static_cast<double>(r.total_blocks),
                  static_cast<double>(r.runs), static_cast<double>(top));
    return ok;
  });

  criterion("chain-golden", [](std::string& detail) {
    BlockChainView v;
    const std::pair<BlockNumber, BlockNumber> blocks[] = {{2, 1}, {3, 2}, {4, 3}, {5, 4},
                                                          {6, 5}, {7, 2}, {8, 7}, {9, 8}};
    for (auto [num, prev] : blocks) v.add_block(Block{num, prev, {}, 1});
    const std::string expected = "{[1,0,1],[2,1,2],[3,2,3],[4,3,4],[5,4,5],[6,5,6],[7,2,3],[8,7,4],[9,8,5]}";
    auto tips = v.branch_tips();
    std::sort(tips.begin(), tips.end());
    detail = v.dump() + " tip=" + std::to_string(v.longest_chain_tip());
    return v.dump() == expected && v.longest_chain_tip() == 6 && tips == std::vector<BlockNumber>{6, 9};
  });

  criterion("oracle-equivalence", [](std::string& detail) {
    bool ok = true;
    for (double q : {0.1, 0.3, 0.5}) {
      // Below 1/2 the walk drifts away at 1 - 2q per block, so a late
      // catch-up after 1e4 blocks is negligible. At 1/2 catch-up is certain
      // but heavy-tailed: a run escapes 1e10 blocks with probability about
      // (z+1) * 8e-6 and costs sqrt(horizon) on average, hence fewer runs.
      const std::int64_t horizon = q < 0.5 ? 10'000 : 10'000'000'000;
      const std::int64_t reps = q < 0.5 ? 2000 : 500;
      detail += fmt("[n=%.0f] ", static_cast<double>(reps));
      for (int z = 0; z <= 3; ++z) {
        const RaceEstimate r = estimate_catchup(q, z, reps, 42, horizon);
        ok = ok && r.oracle_inside();
        detail += fmt("q%.1f/z%.0f:%.4f~%.4f", q, z, r.estimate.point, r.oracle) + (r.oracle_inside() ? " " : "! ");
      }
    }
    return ok;
  });

  criterion("safety-honest-runs", [](std::string& detail) {
    const int runs = 10000;
    std::int64_t steps = 0;
    int bad_runs = 0;
    std::string first;
    for (int r = 0; r < runs; ++r) {
      Rng pick(derive_seed(7, 0, static_cast<std::uint64_t>(r)));
      const ScenarioConfig c = random_honest_config(pick);
      std::string failure;
      run(c, derive_seed(7, 1, static_cast<std::uint64_t>(r)), [&](const World& w) {
        ++steps;
        if (!failure.empty()) return;
        for (auto msg : {testing::check_no_double_spend(w), testing::check_tips_agree(w),
                         testing::check_wallets_nonnegative(w), testing::check_chain_invariants(w)}) {
          if (!msg.empty() && failure.empty()) failure = msg;
        }
      });
      if (!failure.empty()) {
        ++bad_runs;
        if (first.empty()) first = "run " + std::to_string(r) + ": " + failure;
      }
    }
    detail = std::to_string(runs) + " runs, " + std::to_string(steps) + " checked states, " +
             std::to_string(bad_runs) + " violations" + (first.empty() ? "" : " (" + first + ")");
    return bad_runs == 0;
  });

  std::printf("%s: %d criteria failed\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
  return failures == 0 ? 0 : 1;
}
