#pragma once

// Continuous-time discrete-event kernel. Timed events are pool mining
// completions; everything else (transaction creation, wallet updates,
// verification, orphan repair, the fork trigger) is instantaneous and runs
// to quiescence after each timed event.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "btcsim/actors.hpp"
#include "btcsim/rng.hpp"
#include "btcsim/scenario.hpp"

namespace btcsim {

struct TimedEvent {
  double time = 0.0;
  PoolId pool = 0;
  std::uint64_t generation = 0;
};

/// Pending mining completions in firing order; equal times fire by pool id.
class EventQueue {
 public:
  /// Schedules `pool` to fire `delay` seconds from now.
  void schedule(double delay, PoolId pool, std::uint64_t generation);

  /// Removes the earliest event and advances the clock to it.
  std::optional<TimedEvent> pop();

  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }
  double now() const { return now_; }

 private:
  struct Later {
    bool operator()(const TimedEvent& a, const TimedEvent& b) const {
      return a.time != b.time ? a.time > b.time : a.pool > b.pool;
    }
  };
  std::priority_queue<TimedEvent, std::vector<TimedEvent>, Later> heap_;
  double now_ = 0.0;
};

enum class Termination { Running, Success, BlockBound, EventBound, Deadlock };
const char* to_string(Termination reason);

struct NodeStats {
  std::string name;
  BlockNumber tip = kGenesisBlock;
  std::int32_t length = 1;
  std::size_t entries = 1;
  std::size_t orphans = 0;
};

struct RunOutcome {
  bool success = false;
  Termination reason = Termination::Running;
  std::int64_t events = 0;
  double sim_time = 0.0;
  std::vector<NodeStats> nodes;
  /// Blocks on the final main chain per creating pool, indexed by pool id.
  std::vector<std::int32_t> main_chain_blocks;
  std::int32_t blocks_mined = 0;
  std::int32_t transactions_created = 0;
  bool fork_triggered = false;
  BlockNumber mblock = kNoBlock;

  friend bool operator==(const RunOutcome&, const RunOutcome&);
};

bool operator==(const NodeStats&, const NodeStats&);

/// All state of one replication.
class World {
 public:
  /// `trace`, when set, receives one line per transition.
  World(const ScenarioConfig& config, std::uint64_t seed, std::ostream* trace = nullptr);

  /// Fires the next mining event and settles everything it enables.
  Termination step();

  Termination status() const { return status_; }
  RunOutcome outcome() const;

  const ScenarioConfig& config() const { return config_; }
  const Ledger& ledger() const { return ledger_; }
  const std::vector<PeerState>& peers() const { return peers_; }
  const std::vector<PoolState>& pools() const { return pools_; }
  const std::optional<MaliciousPeerState>& malicious_peer() const { return mpeer_; }
  const std::optional<MaliciousPoolState>& malicious_pool() const { return mpool_; }
  /// Every replica in broadcast order: peers, pools, then malicious actors.
  std::vector<const BlockChainView*> views() const;
  std::vector<const BlockChainView*> honest_views() const;

  double now() const { return queue_.now(); }
  std::int64_t events() const { return events_; }

  /// Latched once mblock has been seen on the malicious pool's main chain.
  bool success() const { return success_; }

 private:
  PoolState* pool_by_id(PoolId id);
  void schedule(PoolState& pool);
  void broadcast(const Block& b, PoolId origin);
  void quiesce();
  bool sweep();
  bool repair_orphans(BlockChainView& view, const std::string& who);
  bool settle_pool(PoolState& pool);
  void evaluate_success();
  void log(const std::string& actor, const std::string& what);

  ScenarioConfig config_;
  Rng rng_;
  std::ostream* trace_;
  Ledger ledger_;
  std::vector<PeerState> peers_;
  std::vector<PoolState> pools_;
  std::optional<MaliciousPeerState> mpeer_;
  std::optional<MaliciousPoolState> mpool_;
  std::vector<std::uint64_t> generation_;
  EventQueue queue_;
  std::int64_t events_ = 0;
  std::int32_t blocks_mined_ = 0;
  bool success_ = false;
  Termination status_ = Termination::Running;
};

using StepObserver = std::function<void(const World&)>;

/// Steps a fresh world until it terminates. Throws ConfigError for an
/// invalid configuration. The outcome is a pure function of (config, seed).
RunOutcome run(const ScenarioConfig& config, std::uint64_t seed, const StepObserver& observer = {},
               std::ostream* trace = nullptr);

/// Stripped-down block race used to validate the engine against the
/// analytic catch-up probability: every pool always has work, nothing is
/// broadcast or verified. Honest pools extend one public branch, the
/// attacker a private one that starts `deficit` blocks behind.
struct RaceConfig {
  RateModel rates;
  std::vector<double> honest_shares;
  double attacker_share = 0.0;
  std::int32_t deficit = 0;
  std::int64_t max_events = 10'000'000;
};

struct RaceOutcome {
  bool caught_up = false;
  std::int64_t events = 0;
  std::int64_t attacker_blocks = 0;
  std::int64_t honest_blocks = 0;
};

/// Runs until the private branch is strictly longer or max_events fire.
RaceOutcome run_catchup_race(const RaceConfig& config, std::uint64_t seed);

}  // namespace btcsim
