#pragma once

#include <boost/dynamic_bitset.hpp>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dimca {

using Bits = boost::dynamic_bitset<uint64_t>;

class ResourceLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Explicit finite transition system (Q, delta, extents, P). Successor
// entries are either direct state indices or references to a shared
// group; states referencing a group all have that group's successor
// list. Builders introduce groups when many states provably share their
// successor sets, which keeps large quotients representable.
struct TransitionSystem {
  uint32_t num_states = 0;
  std::vector<std::string> observables;
  std::vector<Bits> extents;

  std::vector<uint32_t> succ_offsets;  // num_states + 1
  std::vector<uint32_t> succ_entries;  // direct index or kGroupTag | group
  std::vector<uint32_t> group_offsets;
  std::vector<uint32_t> group_entries;

  Bits marked;  // builder-defined seed set (initial-condition states)
  std::function<std::string(uint32_t)> namer;

  static constexpr uint32_t kGroupTag = 0x80000000u;

  size_t num_groups() const {
    return group_offsets.empty() ? 0 : group_offsets.size() - 1;
  }

  template <class F>
  void for_each_successor(uint32_t s, F&& f) const {
    for (uint32_t i = succ_offsets[s]; i < succ_offsets[s + 1]; ++i) {
      uint32_t e = succ_entries[i];
      if (e & kGroupTag) {
        uint32_t g = e & ~kGroupTag;
        for (uint32_t j = group_offsets[g]; j < group_offsets[g + 1]; ++j) f(group_entries[j]);
      } else {
        f(e);
      }
    }
  }

  bool has_successor(uint32_t s) const {
    for (uint32_t i = succ_offsets[s]; i < succ_offsets[s + 1]; ++i) {
      uint32_t e = succ_entries[i];
      if (!(e & kGroupTag)) return true;
      uint32_t g = e & ~kGroupTag;
      if (group_offsets[g + 1] > group_offsets[g]) return true;
    }
    return false;
  }

  uint64_t edge_count() const;
  int obs_index(const std::string& name) const;  // -1 if unknown
  std::string state_name(uint32_t s) const;

  // Observable valuation of a state as sorted name list.
  std::vector<std::string> true_observables(uint32_t s) const;
};

}  // namespace dimca
