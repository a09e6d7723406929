#include "btcsim/model.hpp"

#include <algorithm>

namespace btcsim {

const char* to_string(TxStatus status) {
  switch (status) {
    case TxStatus::Unconfirmed: return "UNCONFIRMED";
    case TxStatus::Confirmed: return "CONFIRMED";
    case TxStatus::Invalid: return "INVALID";
  }
  return "?";
}

bool is_allowed_transition(TxStatus from, TxStatus to) {
  using enum TxStatus;
  // Confirmed -> Invalid covers a claimed transaction that fails verification.
  return (from == Unconfirmed && to == Confirmed) || (from == Unconfirmed && to == Invalid) ||
         (from == Confirmed && to == Unconfirmed) || (from == Confirmed && to == Invalid);
}

Transaction endowment_for(PeerId peer) {
  Transaction tx;
  tx.id = peer;
  tx.input.id = kEndowmentInput;
  tx.outputs[Transaction::kPay] = {peer, kEndowmentValue};
  tx.outputs[Transaction::kChange] = {peer, 0};
  tx.status = TxStatus::Confirmed;
  return tx;
}

bool TxPool::add(Transaction tx) {
  if (txs_.size() >= capacity_) return false;
  tx.status = TxStatus::Unconfirmed;
  txs_.push_back(tx);
  return true;
}

std::optional<std::size_t> TxPool::first_unconfirmed() const {
  auto it = std::find_if(txs_.begin(), txs_.end(),
                         [](const Transaction& t) { return t.status == TxStatus::Unconfirmed; });
  if (it == txs_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - txs_.begin());
}

Transaction* TxPool::find(TxNumber id) {
  auto it = std::find_if(txs_.begin(), txs_.end(), [id](const Transaction& t) { return t.id == id; });
  return it == txs_.end() ? nullptr : &*it;
}

const Transaction* TxPool::find(TxNumber id) const {
  auto it = std::find_if(txs_.begin(), txs_.end(), [id](const Transaction& t) { return t.id == id; });
  return it == txs_.end() ? nullptr : &*it;
}

bool TxPool::set_status(TxNumber id, TxStatus status) {
  Transaction* tx = find(id);
  if (tx == nullptr || !is_allowed_transition(tx->status, status)) return false;
  tx->status = status;
  return true;
}

}  // namespace btcsim
