#pragma once

#include <vector>

#include "dimca/ast.hpp"
#include "dimca/ts.hpp"

namespace dimca::quotient {

// Equality-pattern state of an array-free program over infinite types:
// a boolean valuation plus one partition per data type, stored as
// restricted growth strings (blocks numbered by least member).
struct CanonicalState {
  std::vector<char> bools;
  std::vector<int> xpat, ypat;
  bool operator==(const CanonicalState&) const = default;
  bool operator<(const CanonicalState& o) const;
};

// All canonical states satisfying the constraint.
std::vector<CanonicalState> enumerate_states(const lang::Program& p_sharp,
                                             const lang::Expr::Ptr& constraint,
                                             uint64_t cap = 10'000'000);

// Successor patterns of one guarded command: deterministic assignments
// move targets into the source block, dice join any block or open a
// fresh one, appendages run segment by segment.
std::vector<CanonicalState> quotient_successors(const lang::Program& p_sharp,
                                                const CanonicalState& s,
                                                const lang::GuardedCommand& gc);

std::vector<CanonicalState> successors(const lang::Program& p_sharp, const CanonicalState& s);

struct BuildOptions {
  uint64_t max_states = 10'000'000;
};

// Finite transition system over every constraint-satisfying canonical
// state plus everything reachable from them. `marked` holds the
// constraint states. Commands whose overwritten variables are provably
// irrelevant to their successors share successor groups, which keeps
// wide dice fan-outs affordable. `decoder`, when given, receives a
// function recovering the canonical state behind a state index.
TransitionSystem build_quotient_ts(const lang::Program& p_sharp,
                                   const lang::Expr::Ptr& constraint,
                                   const BuildOptions& opt = {},
                                   std::function<CanonicalState(uint32_t)>* decoder = nullptr);

}  // namespace dimca::quotient
