#pragma once

// Protocol data types shared by the chain store, the actors and the engine.
// Hashes are abstracted to globally allocated integers.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace btcsim {

using TxNumber = std::int32_t;
using BlockNumber = std::int32_t;
using PeerId = std::int32_t;
using PoolId = std::int32_t;
using Amount = std::int64_t;

/// Input marker of the initial endowment transactions. Never a valid id.
inline constexpr TxNumber kEndowmentInput = -1;

/// Block number reserved for genesis. Allocation starts at kGenesisBlock + 1.
inline constexpr BlockNumber kGenesisBlock = 1;
inline constexpr BlockNumber kNoBlock = 0;

inline constexpr Amount kEndowmentValue = 10;
inline constexpr Amount kPaymentValue = 1;

enum class TxStatus : std::uint8_t { Unconfirmed, Confirmed, Invalid };

const char* to_string(TxStatus status);

/// True for the transitions the pool lifecycle allows.
bool is_allowed_transition(TxStatus from, TxStatus to);

struct TxOut {
  PeerId address = 0;
  Amount value = 0;

  friend bool operator==(const TxOut&, const TxOut&) = default;
};

struct TxIn {
  TxNumber id = kEndowmentInput;

  friend bool operator==(const TxIn&, const TxIn&) = default;
};

/// One input, two outputs: slot 0 pays, slot 1 returns change (0 if unused).
struct Transaction {
  static constexpr std::size_t kPay = 0;
  static constexpr std::size_t kChange = 1;

  TxNumber id = 0;
  TxIn input;
  std::array<TxOut, 2> outputs{};
  TxStatus status = TxStatus::Unconfirmed;

  Amount total_output() const { return outputs[kPay].value + outputs[kChange].value; }

  /// Owner of the spent output. Change always returns to the spender, so the
  /// change slot carries its address even when unused.
  PeerId spender() const { return outputs[kChange].address; }

  friend bool operator==(const Transaction&, const Transaction&) = default;
};

struct Block {
  BlockNumber num = kNoBlock;
  BlockNumber prev = kNoBlock;
  Transaction tx;
  PoolId creator = 0;

  friend bool operator==(const Block&, const Block&) = default;
};

/// Row of the chain table: block, predecessor, chain length up to this block,
/// creating pool (0 for genesis).
struct ChainEntry {
  BlockNumber num = kNoBlock;
  BlockNumber prev = kNoBlock;
  std::int32_t length = 0;
  PoolId creator = 0;

  friend bool operator==(const ChainEntry&, const ChainEntry&) = default;
};

/// Unspent output held by a peer. value == 0 marks the entry as spent.
struct WalletEntry {
  TxNumber tx_id = 0;
  Amount value = 0;

  friend bool operator==(const WalletEntry&, const WalletEntry&) = default;
};

/// Bounded allocator for globally unique numbers. Returns nullopt once the
/// bound is reached; that is a run-level condition rather than an error.
class IdCounter {
 public:
  IdCounter(std::int32_t first, std::int32_t bound) : next_(first), bound_(bound) {}

  std::optional<std::int32_t> next() {
    if (next_ >= bound_) return std::nullopt;
    return next_++;
  }

  std::int32_t peek() const { return next_; }
  std::int32_t bound() const { return bound_; }
  bool exhausted() const { return next_ >= bound_; }

 private:
  std::int32_t next_;
  std::int32_t bound_;
};

/// Transaction numbers start at the peer count; ids below it are endowments.
inline IdCounter make_tx_counter(std::int32_t peers, std::int32_t max_transactions) {
  return IdCounter(peers, max_transactions);
}

inline IdCounter make_block_counter(std::int32_t max_blocks) {
  return IdCounter(kGenesisBlock + 1, max_blocks);
}

/// The initial transaction that funds peer `peer`.
Transaction endowment_for(PeerId peer);

/// Global pool of created transactions, in creation order.
class TxPool {
 public:
  explicit TxPool(std::size_t capacity) : capacity_(capacity) { txs_.reserve(capacity); }

  /// Appends `tx` as UNCONFIRMED. False if the pool is full.
  bool add(Transaction tx);

  /// Lowest-indexed UNCONFIRMED transaction, if any.
  std::optional<std::size_t> first_unconfirmed() const;
  bool has_unconfirmed() const { return first_unconfirmed().has_value(); }

  Transaction* find(TxNumber id);
  const Transaction* find(TxNumber id) const;

  /// Sets the status of `id`. Returns false if the id is unknown or the
  /// transition is not allowed.
  bool set_status(TxNumber id, TxStatus status);

  const std::vector<Transaction>& transactions() const { return txs_; }
  Transaction& at(std::size_t index) { return txs_.at(index); }
  std::size_t size() const { return txs_.size(); }
  std::size_t capacity() const { return capacity_; }

 private:
  std::size_t capacity_;
  std::vector<Transaction> txs_;
};

}  // namespace btcsim
