#pragma once

// The four automata of the protocol model: honest pool, honest peer,
// malicious pool and malicious peer. Every function here is one transition;
// it checks its own guard and returns false (or nullopt) when not enabled.
// Scheduling, broadcast and ordering belong to the engine.

#include <optional>
#include <set>
#include <vector>

#include "btcsim/chain.hpp"
#include "btcsim/model.hpp"

namespace btcsim {

/// Global state shared by every actor of one run.
struct Ledger {
  Ledger(std::int32_t peers, std::int32_t max_transactions, std::int32_t max_blocks)
      : txpool(static_cast<std::size_t>(max_transactions)),
        tx_counter(make_tx_counter(peers, max_transactions)),
        block_counter(make_block_counter(max_blocks)) {}

  TxPool txpool;
  IdCounter tx_counter;
  IdCounter block_counter;
  /// Duplicate transaction handed from the malicious peer to its pool.
  std::optional<Transaction> malicious_slot;
};

enum class PoolLocation { Initial, Wait, Verify, Mine };
const char* to_string(PoolLocation location);

struct PoolState {
  PoolId id = 0;
  double share = 0.0;
  PoolLocation location = PoolLocation::Initial;
  BlockChainView view;
  std::optional<Transaction> local_tx;
};

enum class PeerLocation { Initial, Wait };

struct PeerState {
  PeerId id = 0;
  PeerLocation location = PeerLocation::Initial;
  BlockChainView view;
  std::vector<WalletEntry> wallet;
  /// Transactions whose outputs to this peer are already in the wallet.
  std::set<TxNumber> recorded;
};

struct MaliciousPeerState {
  PeerState peer;
  int duplicates_created = 0;
};

struct MaliciousPoolState {
  PoolState pool;
  std::int32_t confirmation_depth = 1;
  /// Peer that receives the payouts of the private branch.
  PeerId accomplice = 0;
  bool race_flag = false;
  BlockNumber fork_base = kNoBlock;
  /// Block carrying the duplicate transaction, once mined.
  BlockNumber mblock = kNoBlock;
  /// Tip of the private branch this pool extends after mblock.
  BlockNumber race_tip = kNoBlock;
  /// Payload of the last private block, spent by the next filler.
  std::optional<Transaction> branch_payload;
  /// Filler kept across an interrupted mining attempt.
  std::optional<Transaction> held_filler;

  bool racing() const { return mblock != kNoBlock; }
};

// Pool

/// Initial -> Wait; installs the genesis chain.
void pool_initialize(PoolState& pool);

/// Wait -> Verify with the lowest-indexed UNCONFIRMED transaction, which is
/// marked CONFIRMED in the pool while this pool holds it. Zero-share pools
/// never claim work.
bool pool_get_transaction(PoolState& pool, TxPool& txpool);

/// Two transactions consume the same wallet entry: same input transaction
/// and same owner. Different owners may each spend their own output of one
/// transaction. This is the ground truth for a double spend.
bool spends_same_output(const Transaction& a, const Transaction& b);

/// The check pools apply: `tx` counts as spent already when `confirmed`
/// has the same input and the same total output value. Inputs carry no
/// output index, so the total stands in for it.
bool looks_already_spent(const Transaction& confirmed, const Transaction& tx);

/// Output values and the spent-input check against the main chain of
/// `view`. A zero change slot is the unused-change convention, not an
/// invalid output.
bool is_valid_transaction(const BlockChainView& view, const Transaction& tx);

/// Verify -> Mine when local_tx passes, else Verify -> Wait with the pool
/// entry marked INVALID. Returns the verdict.
bool verify_transaction(PoolState& pool, TxPool& txpool);

/// Mine -> Wait, producing the block on top of the own main chain. nullopt
/// (and no state change) when block numbers are exhausted.
std::optional<Block> pool_complete_block(PoolState& pool, IdCounter& block_counter);

/// Adds `b` to the view. A pool in Mine abandons its attempt and hands the
/// transaction back to the pool as UNCONFIRMED.
AddResult pool_receive_block(PoolState& pool, const Block& b, TxPool& txpool);

// Peer

void peer_initialize(PeerState& peer);

bool peer_has_funds(const PeerState& peer);

/// Pays one coin from the first funded wallet entry to `recipient`, sending
/// the remainder back to the peer, and zeroes that entry.
bool peer_create_transaction(PeerState& peer, PeerId recipient, TxPool& txpool, IdCounter& tx_counter);

/// Guard of peer_update_wallet.
bool peer_has_unrecorded_outputs(const PeerState& peer);

/// Records every main-chain output to this peer not seen before. Outputs of
/// one transaction to the same peer form a single wallet entry, because an
/// input references a whole transaction.
bool peer_update_wallet(PeerState& peer);

AddResult peer_receive_block(PeerState& peer, const Block& b);

// Malicious peer

/// Creates two transactions spending the same input: one paying `victim`
/// into the public pool, one paying the peer itself into `malicious_slot`.
/// Fires once.
bool mpeer_create_duplicates(MaliciousPeerState& mpeer, PeerId victim, TxPool& txpool, IdCounter& tx_counter,
                             std::optional<Transaction>& malicious_slot);

// Malicious pool

/// Block on the main chain of `view` carrying a transaction that spends
/// `input`, if any.
std::optional<BlockNumber> find_block_spending(const BlockChainView& view, TxNumber input);

/// Wait -> Mine with the duplicate once the public twin has
/// confirmation_depth confirmations. The fork hangs below the twin's block.
bool mpool_trigger_fork(MaliciousPoolState& mpool, std::optional<Transaction>& malicious_slot);

/// Wait -> Mine on the private branch with a self-paying filler.
bool mpool_prepare_filler(MaliciousPoolState& mpool, IdCounter& tx_counter);

/// Like pool_complete_block, except the parent is the fork base while
/// racing and the private branch tip after that.
std::optional<Block> mpool_complete_block(MaliciousPoolState& mpool, IdCounter& block_counter);

/// Keeps mining through incoming blocks while race_flag is set; otherwise
/// behaves as an honest pool (fillers are kept, not returned to the pool).
AddResult mpool_receive_block(MaliciousPoolState& mpool, const Block& b, TxPool& txpool);

}  // namespace btcsim
