#include "btcsim/actors.hpp"

#include <algorithm>

namespace btcsim {

const char* to_string(PoolLocation location) {
  switch (location) {
    case PoolLocation::Initial: return "Initial";
    case PoolLocation::Wait: return "Wait";
    case PoolLocation::Verify: return "Verify";
    case PoolLocation::Mine: return "Mine";
  }
  return "?";
}

void pool_initialize(PoolState& pool) {
  pool.view.init();
  pool.local_tx.reset();
  pool.location = PoolLocation::Wait;
}

bool pool_get_transaction(PoolState& pool, TxPool& txpool) {
  if (pool.location != PoolLocation::Wait || !(pool.share > 0.0)) return false;
  const auto index = txpool.first_unconfirmed();
  if (!index) return false;
  Transaction& entry = txpool.at(*index);
  entry.status = TxStatus::Confirmed;
  pool.local_tx = entry;
  pool.location = PoolLocation::Verify;
  return true;
}

bool spends_same_output(const Transaction& a, const Transaction& b) {
  return a.input == b.input && a.spender() == b.spender();
}

bool looks_already_spent(const Transaction& confirmed, const Transaction& tx) {
  return confirmed.input == tx.input && confirmed.total_output() == tx.total_output();
}

bool is_valid_transaction(const BlockChainView& view, const Transaction& tx) {
  if (tx.outputs[Transaction::kPay].value <= 0) return false;
  if (tx.outputs[Transaction::kChange].value < 0) return false;
  for (const Transaction& confirmed : view.main_chain_transactions()) {
    if (confirmed.id == tx.id || looks_already_spent(confirmed, tx)) return false;
  }
  return true;
}

bool verify_transaction(PoolState& pool, TxPool& txpool) {
  if (pool.location != PoolLocation::Verify || !pool.local_tx) return false;
  if (is_valid_transaction(pool.view, *pool.local_tx)) {
    pool.location = PoolLocation::Mine;
    return true;
  }
  txpool.set_status(pool.local_tx->id, TxStatus::Invalid);
  pool.local_tx.reset();
  pool.location = PoolLocation::Wait;
  return false;
}

std::optional<Block> pool_complete_block(PoolState& pool, IdCounter& block_counter) {
  if (pool.location != PoolLocation::Mine || !pool.local_tx) return std::nullopt;
  const auto num = block_counter.next();
  if (!num) return std::nullopt;
  Block b{*num, pool.view.longest_chain_tip(), *pool.local_tx, pool.id};
  b.tx.status = TxStatus::Confirmed;
  pool.view.add_block(b);
  pool.local_tx.reset();
  pool.location = PoolLocation::Wait;
  return b;
}

AddResult pool_receive_block(PoolState& pool, const Block& b, TxPool& txpool) {
  const AddResult result = pool.view.add_block(b);
  if (pool.location == PoolLocation::Mine) {
    txpool.set_status(pool.local_tx->id, TxStatus::Unconfirmed);
    pool.local_tx.reset();
    pool.location = PoolLocation::Wait;
  }
  return result;
}

void peer_initialize(PeerState& peer) {
  peer.view.init();
  peer.wallet = {{peer.id, kEndowmentValue}};
  peer.recorded = {peer.id};
  peer.location = PeerLocation::Wait;
}

bool peer_has_funds(const PeerState& peer) {
  return std::any_of(peer.wallet.begin(), peer.wallet.end(), [](const WalletEntry& e) { return e.value > 0; });
}

bool peer_create_transaction(PeerState& peer, PeerId recipient, TxPool& txpool, IdCounter& tx_counter) {
  if (peer.location != PeerLocation::Wait || tx_counter.exhausted() || txpool.size() >= txpool.capacity()) {
    return false;
  }
  auto entry = std::find_if(peer.wallet.begin(), peer.wallet.end(), [](const WalletEntry& e) { return e.value > 0; });
  if (entry == peer.wallet.end()) return false;
  Transaction tx;
  tx.id = *tx_counter.next();
  tx.input.id = entry->tx_id;
  tx.outputs[Transaction::kPay] = {recipient, kPaymentValue};
  tx.outputs[Transaction::kChange] = {peer.id, entry->value - kPaymentValue};
  txpool.add(tx);
  entry->value = 0;
  return true;
}

namespace {

Amount value_to(const Transaction& tx, PeerId peer) {
  Amount total = 0;
  for (const TxOut& out : tx.outputs) {
    if (out.address == peer && out.value > 0) total += out.value;
  }
  return total;
}

}  // namespace

bool peer_has_unrecorded_outputs(const PeerState& peer) {
  for (const Transaction& tx : peer.view.main_chain_transactions()) {
    if (!peer.recorded.contains(tx.id) && value_to(tx, peer.id) > 0) return true;
  }
  return false;
}

bool peer_update_wallet(PeerState& peer) {
  bool changed = false;
  auto txs = peer.view.main_chain_transactions();
  // Oldest first, so wallet order follows the chain.
  for (auto it = txs.rbegin(); it != txs.rend(); ++it) {
    const Amount value = value_to(*it, peer.id);
    if (value <= 0 || peer.recorded.contains(it->id)) continue;
    peer.wallet.push_back({it->id, value});
    peer.recorded.insert(it->id);
    changed = true;
  }
  return changed;
}

AddResult peer_receive_block(PeerState& peer, const Block& b) { return peer.view.add_block(b); }

bool mpeer_create_duplicates(MaliciousPeerState& mpeer, PeerId victim, TxPool& txpool, IdCounter& tx_counter,
                             std::optional<Transaction>& malicious_slot) {
  PeerState& peer = mpeer.peer;
  if (mpeer.duplicates_created != 0 || peer.location != PeerLocation::Wait || malicious_slot) return false;
  if (tx_counter.bound() - tx_counter.peek() < 2 || txpool.size() >= txpool.capacity()) return false;
  auto entry = std::find_if(peer.wallet.begin(), peer.wallet.end(), [](const WalletEntry& e) { return e.value > 0; });
  if (entry == peer.wallet.end()) return false;

  Transaction honest;
  honest.id = *tx_counter.next();
  honest.input.id = entry->tx_id;
  honest.outputs[Transaction::kPay] = {victim, kPaymentValue};
  honest.outputs[Transaction::kChange] = {peer.id, entry->value - kPaymentValue};

  Transaction duplicate = honest;
  duplicate.id = *tx_counter.next();
  duplicate.outputs[Transaction::kPay] = {peer.id, kPaymentValue};

  txpool.add(honest);
  malicious_slot = duplicate;
  entry->value = 0;
  mpeer.duplicates_created = 2;
  return true;
}

std::optional<BlockNumber> find_block_spending(const BlockChainView& view, TxNumber input) {
  for (BlockNumber num : view.main_chain()) {
    const Block* b = view.block(num);
    if (b != nullptr && b->tx.input.id == input) return num;
  }
  return std::nullopt;
}

bool mpool_trigger_fork(MaliciousPoolState& mpool, std::optional<Transaction>& malicious_slot) {
  PoolState& pool = mpool.pool;
  if (pool.location != PoolLocation::Wait || !malicious_slot || mpool.racing() || !(pool.share > 0.0)) return false;
  const auto twin = find_block_spending(pool.view, malicious_slot->input.id);
  if (!twin) return false;
  if (*pool.view.depth_of(*twin) < mpool.confirmation_depth) return false;
  mpool.fork_base = pool.view.entry(*twin)->prev;
  pool.local_tx = *malicious_slot;
  malicious_slot.reset();
  mpool.race_flag = true;
  pool.location = PoolLocation::Mine;
  return true;
}

bool mpool_prepare_filler(MaliciousPoolState& mpool, IdCounter& tx_counter) {
  PoolState& pool = mpool.pool;
  if (pool.location != PoolLocation::Wait || !mpool.racing() || !mpool.branch_payload) return false;
  if (!mpool.held_filler) {
    const auto id = tx_counter.next();
    if (!id) return false;
    Transaction filler;
    filler.id = *id;
    filler.input.id = mpool.branch_payload->id;
    filler.outputs[Transaction::kPay] = {mpool.accomplice, mpool.branch_payload->total_output()};
    filler.outputs[Transaction::kChange] = {mpool.accomplice, 0};
    filler.status = TxStatus::Confirmed;
    mpool.held_filler = filler;
  }
  pool.local_tx = mpool.held_filler;
  mpool.held_filler.reset();
  pool.location = PoolLocation::Mine;
  return true;
}

std::optional<Block> mpool_complete_block(MaliciousPoolState& mpool, IdCounter& block_counter) {
  PoolState& pool = mpool.pool;
  if (pool.location != PoolLocation::Mine || !pool.local_tx) return std::nullopt;
  if (!mpool.race_flag && !mpool.racing()) return pool_complete_block(pool, block_counter);

  const auto num = block_counter.next();
  if (!num) return std::nullopt;
  const BlockNumber prev = mpool.race_flag ? mpool.fork_base : mpool.race_tip;
  Block b{*num, prev, *pool.local_tx, pool.id};
  b.tx.status = TxStatus::Confirmed;
  pool.view.add_block(b);
  if (mpool.race_flag) {
    mpool.race_flag = false;
    mpool.mblock = *num;
  }
  mpool.race_tip = *num;
  mpool.branch_payload = b.tx;
  pool.local_tx.reset();
  pool.location = PoolLocation::Wait;
  return b;
}

AddResult mpool_receive_block(MaliciousPoolState& mpool, const Block& b, TxPool& txpool) {
  PoolState& pool = mpool.pool;
  if (pool.location == PoolLocation::Mine && mpool.race_flag) return pool.view.add_block(b);
  if (pool.location == PoolLocation::Mine && mpool.racing()) {
    const AddResult result = pool.view.add_block(b);
    mpool.held_filler = pool.local_tx;
    pool.local_tx.reset();
    pool.location = PoolLocation::Wait;
    return result;
  }
  return pool_receive_block(pool, b, txpool);
}

}  // namespace btcsim
