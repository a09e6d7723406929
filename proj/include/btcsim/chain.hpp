#pragma once

// Per-node replica of the block tree, stored as a table of
// (block, predecessor, length, creator) rows.

#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "btcsim/model.hpp"

namespace btcsim {

enum class AddResult { Extended, SideChain, Orphaned, Duplicate };

const char* to_string(AddResult result);

class BlockChainView {
 public:
  /// Starts as the genesis-only chain {[1,0,1]}.
  BlockChainView() { init(); }

  /// Discards everything and reinstalls genesis.
  void init();

  /// Links `b` under its predecessor, or buffers it as an orphan when the
  /// predecessor is unknown. The main chain only moves when strictly
  /// exceeded, so an equal-length branch never displaces the incumbent.
  AddResult add_block(const Block& b);

  /// add_block followed by linking every orphan whose predecessor became
  /// known, repeated until nothing moves.
  void absorb_served_block(const Block& b);

  BlockNumber longest_chain_tip() const { return entries_[index_longest_].num; }
  std::int32_t longest_length() const { return length_longest_; }

  /// True iff `num` lies on the path from the main tip back to genesis.
  bool check_block_in_chain(BlockNumber num) const;

  /// Confirmations of `num`: 1 at the tip, growing by one per block on top.
  /// nullopt if `num` is not on the main chain.
  std::optional<std::int32_t> depth_of(BlockNumber num) const;

  /// Block numbers of the main chain, tip first, genesis last.
  std::vector<BlockNumber> main_chain() const;

  /// Payloads of the main chain, tip first. Genesis carries none.
  std::vector<Transaction> main_chain_transactions() const;

  /// Predecessor of the lowest-numbered orphan.
  std::optional<BlockNumber> first_orphan_parent() const;

  /// Full record of a linked block. Genesis has no record.
  std::optional<Block> serve_block(BlockNumber num) const;

  bool contains(BlockNumber num) const { return index_.contains(num); }
  bool is_orphan(BlockNumber num) const { return orphans_.contains(num); }
  const ChainEntry* entry(BlockNumber num) const;
  const Block* block(BlockNumber num) const;

  /// Entries with no child, i.e. the tips of every branch.
  std::vector<BlockNumber> branch_tips() const;

  /// Number of maximal-length branches.
  std::size_t longest_branch_count() const;

  const std::vector<ChainEntry>& entries() const { return entries_; }
  const std::map<BlockNumber, Block>& confirmed_blocks() const { return confirmed_; }
  const std::map<BlockNumber, Block>& orphans() const { return orphans_; }

  /// Rows in insertion order, e.g. "{[1,0,1],[2,1,2]}".
  std::string dump() const;

  /// Empty when the table is consistent, otherwise the first violation.
  std::string check_invariants() const;

  friend bool operator==(const BlockChainView&, const BlockChainView&) = default;

 private:
  void link(const Block& b, const ChainEntry& parent, AddResult& result);

  std::vector<ChainEntry> entries_;
  std::unordered_map<BlockNumber, std::size_t> index_;
  std::map<BlockNumber, Block> confirmed_;
  std::map<BlockNumber, Block> orphans_;
  std::size_t index_longest_ = 0;
  std::int32_t length_longest_ = 0;
};

}  // namespace btcsim
