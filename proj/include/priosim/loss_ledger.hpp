#ifndef PRIOSIM_LOSS_LEDGER_HPP
#define PRIOSIM_LOSS_LEDGER_HPP

#include <cstdint>
#include <map>
#include <unordered_map>
#include <utility>

#include "priosim/common.hpp"

namespace priosim {

// Global record of every data-segment drop in the fabric, written
// synchronously at the drop site. It answers one question exactly: was this
// byte range of this flow ever dropped? An omniscient transport uses it to
// retransmit only true losses; the metrics referee uses it to split TCP
// retransmissions into genuine and spurious.
//
// A key is present iff the fabric dropped that exact segment. Multiplicity
// is kept alongside so a retransmission that gets dropped again remains
// detectable, but presence itself is idempotent.
class LossLedger {
 public:
  void record_drop(FlowId f, uint64_t start, uint64_t end) {
    drops_[Key{f, start, end}]++;
    total_++;
  }

  bool is_lost(FlowId f, uint64_t start, uint64_t end) const {
    return drops_.count(Key{f, start, end}) > 0;
  }

  uint32_t drop_count(FlowId f, uint64_t start, uint64_t end) const {
    auto it = drops_.find(Key{f, start, end});
    return it == drops_.end() ? 0 : it->second;
  }

  uint64_t total_drops() const { return total_; }

 private:
  struct Key {
    FlowId f;
    uint64_t s, e;
    bool operator==(const Key& o) const {
      return f == o.f && s == o.s && e == o.e;
    }
  };
  struct KeyHash {
    size_t operator()(const Key& k) const {
      uint64_t h = k.f * 0x9e3779b97f4a7c15ULL;
      h ^= k.s + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
      h ^= k.e + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
      return static_cast<size_t>(h);
    }
  };

  std::unordered_map<Key, uint32_t, KeyHash> drops_;
  uint64_t total_ = 0;
};

// Per-flow referee: charges each recorded drop at most once, so a string of
// retransmissions of the same segment is genuine only as often as the fabric
// actually dropped it.
class RetxClassifier {
 public:
  RetxClassifier(const LossLedger* ledger, FlowId f) : ledger_(ledger), f_(f) {}

  bool genuine(uint64_t start, uint64_t end) {
    uint32_t avail = ledger_->drop_count(f_, start, end);
    uint32_t& used = claimed_[{start, end}];
    if (avail > used) {
      used++;
      return true;
    }
    return false;
  }

 private:
  const LossLedger* ledger_;
  FlowId f_;
  std::map<std::pair<uint64_t, uint64_t>, uint32_t> claimed_;
};

}  // namespace priosim

#endif
