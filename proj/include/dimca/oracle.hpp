#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dimca/ast.hpp"
#include "dimca/mu.hpp"
#include "dimca/ts.hpp"

namespace dimca::oracle {

// Brute-force ground truth: builds the concrete system at the given
// sizes and evaluates the formula with a straightforward set-based
// recursion that shares no code with the production evaluator.
bool brute_check(const lang::Program& p, int asize, int bsize, const std::string& b0,
                 const mu::Formula::Ptr& f, uint64_t max_states = 1'000'000);

// Set-based evaluator over an explicit system (test oracle).
std::vector<char> naive_eval(const TransitionSystem& ts, const mu::Formula::Ptr& f);

struct SimulationResult {
  bool total = false;                 // every left state is simulated
  std::vector<Bits> relation;        // relation[s] = right states simulating s
  std::vector<uint32_t> unmatched;   // left states with no partner
};

// Greatest simulation of ts1 by ts2, by refinement from observable
// equality.
SimulationResult check_simulation(const TransitionSystem& ts1, const TransitionSystem& ts2);

struct BisimulationResult {
  bool total = false;  // the coarsest bisimulation relates both ways
  std::vector<uint32_t> block1, block2;  // block ids on the disjoint union
  std::vector<uint32_t> unmatched1, unmatched2;
};

// Coarsest bisimulation on the disjoint union by partition refinement;
// total when every block contains states from both systems.
BisimulationResult check_bisimulation(const TransitionSystem& ts1,
                                      const TransitionSystem& ts2);

struct ObsStep {
  std::vector<std::string> require_true;
  bool exact = false;  // when set, all other observables must be false
};

// Is some state sequence labelled by the given observable sequence?
bool trace_member(const TransitionSystem& ts, const std::vector<std::string>& trace);
bool trace_member(const TransitionSystem& ts, const std::vector<ObsStep>& steps);

}  // namespace dimca::oracle
