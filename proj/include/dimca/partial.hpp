#pragma once

#include <map>
#include <vector>

#include "dimca/ast.hpp"
#include "dimca/ts.hpp"

namespace dimca::partial {

// Canonical pruned state of the partial-functions semantics: value ids
// are consecutive naturals in first-occurrence order (x variables in
// declaration order; then y variables, then array cells), and each
// array is defined exactly on the held X ids.
struct PartialState {
  std::vector<char> bools;
  std::vector<int> xvals, yvals;
  std::vector<std::vector<int>> arrays;  // arrays[a][xid], xid < #distinct xvals
  bool operator==(const PartialState&) const = default;
  bool operator<(const PartialState& o) const;
};

// Working form with arbitrary value ids and sparse array entries.
struct RawPartialState {
  std::vector<char> bools;
  std::vector<int> xvals, yvals;
  std::vector<std::map<int, int>> arrays;
};

RawPartialState to_raw(const PartialState& s);

// Prunes entries at indices no X variable holds, then renames value ids
// to first-occurrence order. Idempotent; throws if some array is
// undefined at a held index.
PartialState canonicalize(const RawPartialState& s);

// Successors through the append chain; fresh inputs are represented by
// one value per die and newly seen indices fan their array cells out
// over the held values plus a fresh one. Results are canonical.
std::vector<PartialState> step_partial(const lang::Program& p, const PartialState& s,
                                       const lang::GuardedCommand& gc);

// As above but keeps the incoming id space (for replaying executions).
std::vector<RawPartialState> step_partial_raw(const lang::Program& p,
                                              const RawPartialState& s,
                                              const lang::GuardedCommand& gc);

std::vector<PartialState> successors(const lang::Program& p, const PartialState& s);

struct BuildOptions {
  uint64_t max_states = 1'000'000;
  bool all_states = false;      // enumerate every canonical state
  lang::Expr::Ptr seed;         // reachable scope seed; defaults to init
};

TransitionSystem build_partial_ts(const lang::Program& p, const BuildOptions& opt = {});

bool eval_bool(const lang::Program& p, const RawPartialState& s, const lang::Expr::Ptr& e);

}  // namespace dimca::partial
