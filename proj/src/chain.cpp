#include "btcsim/chain.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace btcsim {

const char* to_string(AddResult result) {
  switch (result) {
    case AddResult::Extended: return "Extended";
    case AddResult::SideChain: return "SideChain";
    case AddResult::Orphaned: return "Orphaned";
    case AddResult::Duplicate: return "Duplicate";
  }
  return "?";
}

void BlockChainView::init() {
  entries_.clear();
  index_.clear();
  confirmed_.clear();
  orphans_.clear();
  entries_.push_back({kGenesisBlock, kNoBlock, 1, 0});
  index_.emplace(kGenesisBlock, 0);
  index_longest_ = 0;
  length_longest_ = 1;
}

void BlockChainView::link(const Block& b, const ChainEntry& parent, AddResult& result) {
  const ChainEntry row{b.num, b.prev, parent.length + 1, b.creator};
  entries_.push_back(row);
  index_.emplace(b.num, entries_.size() - 1);
  confirmed_.emplace(b.num, b);
  if (row.length > length_longest_) {
    index_longest_ = entries_.size() - 1;
    length_longest_ = row.length;
    result = AddResult::Extended;
  } else {
    result = AddResult::SideChain;
  }
}

AddResult BlockChainView::add_block(const Block& b) {
  if (b.num == kGenesisBlock || b.num == b.prev || contains(b.num) || is_orphan(b.num)) {
    return AddResult::Duplicate;
  }
  const ChainEntry* parent = entry(b.prev);
  if (parent == nullptr) {
    orphans_.emplace(b.num, b);
    return AddResult::Orphaned;
  }
  AddResult result = AddResult::SideChain;
  link(b, *parent, result);
  return result;
}

void BlockChainView::absorb_served_block(const Block& b) {
  add_block(b);
  bool moved = true;
  while (moved) {
    moved = false;
    for (auto it = orphans_.begin(); it != orphans_.end();) {
      const ChainEntry* parent = entry(it->second.prev);
      if (parent == nullptr) {
        ++it;
        continue;
      }
      AddResult ignored = AddResult::SideChain;
      const Block orphan = it->second;
      it = orphans_.erase(it);
      link(orphan, *parent, ignored);
      moved = true;
    }
  }
}

const ChainEntry* BlockChainView::entry(BlockNumber num) const {
  auto it = index_.find(num);
  return it == index_.end() ? nullptr : &entries_[it->second];
}

const Block* BlockChainView::block(BlockNumber num) const {
  auto it = confirmed_.find(num);
  return it == confirmed_.end() ? nullptr : &it->second;
}

bool BlockChainView::check_block_in_chain(BlockNumber num) const {
  const ChainEntry* target = entry(num);
  if (target == nullptr) return false;
  const ChainEntry* cur = &entries_[index_longest_];
  // A block at length L can only sit at position L of the walk.
  while (cur != nullptr && cur->length > target->length) cur = entry(cur->prev);
  return cur != nullptr && cur->num == num;
}

std::optional<std::int32_t> BlockChainView::depth_of(BlockNumber num) const {
  if (!check_block_in_chain(num)) return std::nullopt;
  return length_longest_ - entry(num)->length + 1;
}

std::vector<BlockNumber> BlockChainView::main_chain() const {
  std::vector<BlockNumber> out;
  out.reserve(static_cast<std::size_t>(length_longest_));
  for (const ChainEntry* cur = &entries_[index_longest_]; cur != nullptr; cur = entry(cur->prev)) {
    out.push_back(cur->num);
  }
  return out;
}

std::vector<Transaction> BlockChainView::main_chain_transactions() const {
  std::vector<Transaction> out;
  for (BlockNumber num : main_chain()) {
    if (const Block* b = block(num)) out.push_back(b->tx);
  }
  return out;
}

std::optional<BlockNumber> BlockChainView::first_orphan_parent() const {
  if (orphans_.empty()) return std::nullopt;
  return orphans_.begin()->second.prev;
}

std::optional<Block> BlockChainView::serve_block(BlockNumber num) const {
  const Block* b = block(num);
  if (b == nullptr) return std::nullopt;
  return *b;
}

std::vector<BlockNumber> BlockChainView::branch_tips() const {
  std::set<BlockNumber> parents;
  for (const ChainEntry& e : entries_) parents.insert(e.prev);
  std::vector<BlockNumber> tips;
  for (const ChainEntry& e : entries_) {
    if (!parents.contains(e.num)) tips.push_back(e.num);
  }
  return tips;
}

std::size_t BlockChainView::longest_branch_count() const {
  return static_cast<std::size_t>(std::count_if(entries_.begin(), entries_.end(), [this](const ChainEntry& e) {
    return e.length == length_longest_;
  }));
}

std::string BlockChainView::dump() const {
  std::ostringstream out;
  out << '{';
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (i != 0) out << ',';
    out << '[' << entries_[i].num << ',' << entries_[i].prev << ',' << entries_[i].length << ']';
  }
  out << '}';
  return out.str();
}

std::string BlockChainView::check_invariants() const {
  if (entries_.empty()) return "no genesis";
  if (entries_.front() != ChainEntry{kGenesisBlock, kNoBlock, 1, 0}) return "genesis row malformed";
  std::int32_t max_length = 0;
  for (const ChainEntry& e : entries_) {
    max_length = std::max(max_length, e.length);
    if (e.num == kGenesisBlock) continue;
    const ChainEntry* parent = entry(e.prev);
    if (parent == nullptr) return "block " + std::to_string(e.num) + " has no linked predecessor";
    if (e.length != parent->length + 1) return "block " + std::to_string(e.num) + " has wrong length";
    if (!confirmed_.contains(e.num)) return "block " + std::to_string(e.num) + " has no stored record";
    if (orphans_.contains(e.num)) return "block " + std::to_string(e.num) + " is both linked and orphaned";
    // Lengths drop by one per step towards genesis, so no cycle can pass
    // the check above.
  }
  if (entries_[index_longest_].length != length_longest_ || length_longest_ != max_length) {
    return "longest-chain bookkeeping out of date";
  }
  return {};
}

}  // namespace btcsim
