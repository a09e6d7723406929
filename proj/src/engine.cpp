#include "btcsim/engine.hpp"

#include <algorithm>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

namespace btcsim {

void EventQueue::schedule(double delay, PoolId pool, std::uint64_t generation) {
  heap_.push({now_ + delay, pool, generation});
}

std::optional<TimedEvent> EventQueue::pop() {
  if (heap_.empty()) return std::nullopt;
  TimedEvent ev = heap_.top();
  heap_.pop();
  now_ = std::max(now_, ev.time);
  return ev;
}

const char* to_string(Termination reason) {
  switch (reason) {
    case Termination::Running: return "running";
    case Termination::Success: return "success";
    case Termination::BlockBound: return "block-bound";
    case Termination::EventBound: return "event-bound";
    case Termination::Deadlock: return "deadlock";
  }
  return "?";
}

bool operator==(const NodeStats& a, const NodeStats& b) {
  return a.name == b.name && a.tip == b.tip && a.length == b.length && a.entries == b.entries &&
         a.orphans == b.orphans;
}

bool operator==(const RunOutcome& a, const RunOutcome& b) {
  return a.success == b.success && a.reason == b.reason && a.events == b.events && a.sim_time == b.sim_time &&
         a.nodes == b.nodes && a.main_chain_blocks == b.main_chain_blocks && a.blocks_mined == b.blocks_mined &&
         a.transactions_created == b.transactions_created && a.fork_triggered == b.fork_triggered &&
         a.mblock == b.mblock;
}

World::World(const ScenarioConfig& config, std::uint64_t seed, std::ostream* trace)
    : config_((validate(config), config)),
      rng_(seed),
      trace_(trace),
      ledger_(config.peer_count(), config.bounds.max_transactions, config.bounds.max_blocks) {
  for (PeerId id = 0; id < config_.honest_peers; ++id) {
    PeerState peer;
    peer.id = id;
    peer_initialize(peer);
    peers_.push_back(std::move(peer));
  }
  for (std::size_t i = 0; i < config_.pools.size(); ++i) {
    PoolState pool;
    pool.id = static_cast<PoolId>(i);
    pool.share = config_.pools[i].share;
    pool_initialize(pool);
    if (config_.pools[i].malicious) {
      MaliciousPoolState mpool;
      mpool.pool = std::move(pool);
      mpool.confirmation_depth = config_.confirmation_depth;
      mpool.accomplice = config_.honest_peers;
      mpool_.emplace(std::move(mpool));
    } else {
      pools_.push_back(std::move(pool));
    }
  }
  if (config_.malicious_peers == 1) {
    MaliciousPeerState mpeer;
    mpeer.peer.id = config_.honest_peers;
    peer_initialize(mpeer.peer);
    mpeer_.emplace(std::move(mpeer));
  }
  generation_.assign(config_.pools.size(), 0);
  log("world", "initialized");
  quiesce();
}

PoolState* World::pool_by_id(PoolId id) {
  if (mpool_ && mpool_->pool.id == id) return &mpool_->pool;
  for (PoolState& pool : pools_) {
    if (pool.id == id) return &pool;
  }
  return nullptr;
}

std::vector<const BlockChainView*> World::views() const {
  std::vector<const BlockChainView*> out = honest_views();
  if (mpeer_) out.push_back(&mpeer_->peer.view);
  if (mpool_) out.push_back(&mpool_->pool.view);
  return out;
}

std::vector<const BlockChainView*> World::honest_views() const {
  std::vector<const BlockChainView*> out;
  for (const PeerState& peer : peers_) out.push_back(&peer.view);
  for (const PoolState& pool : pools_) out.push_back(&pool.view);
  return out;
}

void World::log(const std::string& actor, const std::string& what) {
  if (trace_ == nullptr) return;
  *trace_ << std::fixed << std::setprecision(3) << queue_.now() << ' ' << actor << ' ' << what << '\n';
}

void World::schedule(PoolState& pool) {
  const auto id = static_cast<std::size_t>(pool.id);
  ++generation_[id];
  queue_.schedule(sample_mining_time(config_.rates, pool.share, rng_), pool.id, generation_[id]);
}

void World::broadcast(const Block& b, PoolId origin) {
  for (PeerState& peer : peers_) peer_receive_block(peer, b);
  for (PoolState& pool : pools_) {
    if (pool.id == origin) continue;
    const bool was_mining = pool.location == PoolLocation::Mine;
    pool_receive_block(pool, b, ledger_.txpool);
    if (was_mining) log("pool" + std::to_string(pool.id), "abandon");
  }
  if (mpeer_) peer_receive_block(mpeer_->peer, b);
  if (mpool_ && mpool_->pool.id != origin) mpool_receive_block(*mpool_, b, ledger_.txpool);
}

bool World::repair_orphans(BlockChainView& view, const std::string& who) {
  const auto parent = view.first_orphan_parent();
  if (!parent) return false;
  for (const BlockChainView* other : views()) {
    if (other == &view) continue;
    if (auto served = other->serve_block(*parent)) {
      view.absorb_served_block(*served);
      log(who, "absorb block=" + std::to_string(*parent));
      return true;
    }
  }
  // Nobody holds the parent yet; the request is repeated on the next visit.
  log(who, "request-unserved block=" + std::to_string(*parent));
  return false;
}

bool World::settle_pool(PoolState& pool) {
  bool changed = false;
  const std::string who = "pool" + std::to_string(pool.id);
  while (pool.location == PoolLocation::Wait && pool_get_transaction(pool, ledger_.txpool)) {
    changed = true;
    const TxNumber id = pool.local_tx->id;
    if (verify_transaction(pool, ledger_.txpool)) {
      schedule(pool);
      log(who, "mine tx=" + std::to_string(id));
      break;
    }
    log(who, "invalid tx=" + std::to_string(id));
  }
  return changed;
}

bool World::sweep() {
  bool changed = false;
  const auto peer_count = static_cast<std::uint64_t>(config_.peer_count());
  for (PeerState& peer : peers_) {
    const std::string who = "peer" + std::to_string(peer.id);
    changed |= repair_orphans(peer.view, who);
    if (peer_has_unrecorded_outputs(peer)) {
      peer_update_wallet(peer);
      log(who, "update-wallet");
      changed = true;
    }
    while (peer_has_funds(peer) && !ledger_.tx_counter.exhausted()) {
      const auto recipient = static_cast<PeerId>(rng_.below(peer_count));
      if (!peer_create_transaction(peer, recipient, ledger_.txpool, ledger_.tx_counter)) break;
      log(who, "create tx=" + std::to_string(ledger_.txpool.transactions().back().id) +
                     " to=" + std::to_string(recipient));
      changed = true;
    }
  }
  for (PoolState& pool : pools_) {
    changed |= repair_orphans(pool.view, "pool" + std::to_string(pool.id));
    changed |= settle_pool(pool);
  }
  if (mpeer_) {
    const std::string who = "mpeer" + std::to_string(mpeer_->peer.id);
    changed |= repair_orphans(mpeer_->peer.view, who);
    if (peer_has_unrecorded_outputs(mpeer_->peer)) changed |= peer_update_wallet(mpeer_->peer);
    if (mpeer_create_duplicates(*mpeer_, config_.victim, ledger_.txpool, ledger_.tx_counter, ledger_.malicious_slot)) {
      log(who, "create-duplicates public=" + std::to_string(ledger_.txpool.transactions().back().id) +
                     " private=" + std::to_string(ledger_.malicious_slot->id));
      changed = true;
    }
  }
  if (mpool_) {
    PoolState& pool = mpool_->pool;
    const std::string who = "mpool" + std::to_string(pool.id);
    changed |= repair_orphans(pool.view, who);
    if (mpool_trigger_fork(*mpool_, ledger_.malicious_slot)) {
      schedule(pool);
      log(who, "fork base=" + std::to_string(mpool_->fork_base) + " tx=" + std::to_string(pool.local_tx->id));
      changed = true;
    } else if (mpool_prepare_filler(*mpool_, ledger_.tx_counter)) {
      schedule(pool);
      log(who, "race tip=" + std::to_string(mpool_->race_tip) + " tx=" + std::to_string(pool.local_tx->id));
      changed = true;
    } else if (!mpool_->racing() && !mpool_->race_flag) {
      changed |= settle_pool(pool);
    }
  }
  evaluate_success();
  return changed;
}

void World::quiesce() {
  while (sweep()) {
    ++events_;
    if (events_ >= config_.bounds.max_events) break;
  }
}

void World::evaluate_success() {
  if (success_ || !mpool_ || mpool_->mblock == kNoBlock) return;
  if (mpool_->pool.view.check_block_in_chain(mpool_->mblock)) {
    success_ = true;
    log("mpool" + std::to_string(mpool_->pool.id), "double-spend mblock=" + std::to_string(mpool_->mblock));
  }
}

Termination World::step() {
  if (status_ != Termination::Running) return status_;
  if (success_) return status_ = Termination::Success;
  if (events_ >= config_.bounds.max_events) return status_ = Termination::EventBound;

  PoolState* pool = nullptr;
  while (pool == nullptr) {
    const auto ev = queue_.pop();
    if (!ev) {
      log("world", "deadlock");
      return status_ = Termination::Deadlock;
    }
    PoolState* candidate = pool_by_id(ev->pool);
    if (candidate->location == PoolLocation::Mine && generation_[static_cast<std::size_t>(ev->pool)] == ev->generation) {
      pool = candidate;
    }
  }
  ++events_;

  const bool is_malicious = mpool_ && pool == &mpool_->pool;
  const auto b = is_malicious ? mpool_complete_block(*mpool_, ledger_.block_counter)
                              : pool_complete_block(*pool, ledger_.block_counter);
  if (!b) {
    log("world", "block numbers exhausted");
    return status_ = Termination::BlockBound;
  }
  ++blocks_mined_;
  log((is_malicious ? "mpool" : "pool") + std::to_string(pool->id),
        "mined block=" + std::to_string(b->num) + " prev=" + std::to_string(b->prev) + " tx=" + std::to_string(b->tx.id));
  broadcast(*b, pool->id);
  quiesce();
  if (success_) return status_ = Termination::Success;
  return status_;
}

RunOutcome World::outcome() const {
  RunOutcome out;
  out.success = success_;
  out.reason = status_;
  out.events = events_;
  out.sim_time = queue_.now();
  auto stats = [](std::string name, const BlockChainView& view) {
    return NodeStats{std::move(name), view.longest_chain_tip(), view.longest_length(), view.entries().size(),
                     view.orphans().size()};
  };
  for (const PeerState& peer : peers_) out.nodes.push_back(stats("peer" + std::to_string(peer.id), peer.view));
  for (const PoolState& pool : pools_) out.nodes.push_back(stats("pool" + std::to_string(pool.id), pool.view));
  if (mpeer_) out.nodes.push_back(stats("mpeer" + std::to_string(mpeer_->peer.id), mpeer_->peer.view));
  if (mpool_) out.nodes.push_back(stats("mpool" + std::to_string(mpool_->pool.id), mpool_->pool.view));

  out.main_chain_blocks.assign(config_.pools.size(), 0);
  const BlockChainView& reference = peers_.front().view;
  for (BlockNumber num : reference.main_chain()) {
    if (num == kGenesisBlock) continue;
    ++out.main_chain_blocks[static_cast<std::size_t>(reference.entry(num)->creator)];
  }
  out.blocks_mined = blocks_mined_;
  out.transactions_created = ledger_.tx_counter.peek() - config_.peer_count();
  out.fork_triggered = mpool_ && (mpool_->race_flag || mpool_->racing());
  out.mblock = mpool_ ? mpool_->mblock : kNoBlock;
  return out;
}

RunOutcome run(const ScenarioConfig& config, std::uint64_t seed, const StepObserver& observer, std::ostream* trace) {
  World world(config, seed, trace);
  if (observer) observer(world);
  while (world.step() == Termination::Running) {
    if (observer) observer(world);
  }
  if (observer) observer(world);
  return world.outcome();
}

RaceOutcome run_catchup_race(const RaceConfig& config, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> shares = config.honest_shares;
  shares.push_back(config.attacker_share);
  const std::size_t attacker = shares.size() - 1;
  // Few pools, so a scan over per-pool clocks beats the heap. Ties go to
  // the lower pool id, as in EventQueue.
  constexpr double kIdle = std::numeric_limits<double>::infinity();
  std::vector<double> next(shares.size(), kIdle);
  for (std::size_t i = 0; i < shares.size(); ++i) {
    if (shares[i] > 0.0) next[i] = sample_mining_time(config.rates, shares[i], rng);
  }
  RaceOutcome out;
  while (out.events < config.max_events) {
    const auto it = std::min_element(next.begin(), next.end());
    if (*it == kIdle) break;
    const auto pool = static_cast<std::size_t>(it - next.begin());
    ++out.events;
    if (pool == attacker) {
      ++out.attacker_blocks;
    } else {
      ++out.honest_blocks;
    }
    if (out.attacker_blocks > out.honest_blocks + config.deficit) {
      out.caught_up = true;
      break;
    }
    *it += sample_mining_time(config.rates, shares[pool], rng);
  }
  return out;
}

}  // namespace btcsim
