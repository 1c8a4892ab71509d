#include "dimca/ts.hpp"

namespace dimca {

uint64_t TransitionSystem::edge_count() const {
  uint64_t n = 0;
  for (uint32_t s = 0; s < num_states; ++s)
    for (uint32_t i = succ_offsets[s]; i < succ_offsets[s + 1]; ++i) {
      uint32_t e = succ_entries[i];
      if (e & kGroupTag) {
        uint32_t g = e & ~kGroupTag;
        n += group_offsets[g + 1] - group_offsets[g];
      } else {
        ++n;
      }
    }
  return n;
}

int TransitionSystem::obs_index(const std::string& name) const {
  for (size_t i = 0; i < observables.size(); ++i)
    if (observables[i] == name) return int(i);
  return -1;
}

std::string TransitionSystem::state_name(uint32_t s) const {
  if (namer) return namer(s);
  return "s" + std::to_string(s);
}

std::vector<std::string> TransitionSystem::true_observables(uint32_t s) const {
  std::vector<std::string> out;
  for (size_t i = 0; i < observables.size(); ++i)
    if (extents[i].test(s)) out.push_back(observables[i]);
  return out;
}

}  // namespace dimca
