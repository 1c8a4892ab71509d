#pragma once

#include <cstdint>
#include <vector>

#include "dimca/ast.hpp"
#include "dimca/ts.hpp"

namespace dimca::concrete {

struct Sizes {
  int a = 1, b = 1;
};

// Total-function state of an instantiation of sizes (|A|, |B|); carriers
// are initial segments of the naturals.
struct ConcreteState {
  std::vector<char> bools;
  std::vector<int> xvals, yvals;
  std::vector<std::vector<int>> arrays;  // arrays[ai][v], v < |A|
  bool operator==(const ConcreteState&) const = default;
  bool operator<(const ConcreteState& o) const;
};

bool eval_bool(const lang::Program& p, const ConcreteState& s, const lang::Expr::Ptr& e);

// All successors through the command's append chain; guard must hold.
std::vector<ConcreteState> step_command(const lang::Program& p, const ConcreteState& s,
                                        const lang::GuardedCommand& gc, Sizes sizes);

std::vector<ConcreteState> successors(const lang::Program& p, const ConcreteState& s,
                                      Sizes sizes);

struct BuildOptions {
  uint64_t max_states = 10'000'000;
  bool all_states = false;        // default: reachable from the seed set
  lang::Expr::Ptr seed;           // defaults to the program init
};

// Explicit transition system; observables are the boolean variables and
// `marked` holds the seed-satisfying states.
TransitionSystem build_ts(const lang::Program& p, Sizes sizes, const BuildOptions& opt = {});

}  // namespace dimca::concrete
