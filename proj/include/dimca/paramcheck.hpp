#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dimca/ast.hpp"
#include "dimca/concrete.hpp"
#include "dimca/mu.hpp"
#include "dimca/partial.hpp"

namespace dimca::paramcheck {

enum class Mode { Infinite, Parameterised, Finite };
enum class Answer { Holds, Fails, HoldsForAllFinite, Unknown };

std::string to_string(Mode m);
std::string to_string(Answer a);

struct TraceStep {
  std::vector<std::string> observables_true;
};

struct Verdict {
  Mode mode = Mode::Infinite;
  Answer answer = Answer::Holds;
  std::string fragment;
  std::string formula;
  std::optional<std::vector<TraceStep>> counterexample;       // present iff fails
  std::optional<std::vector<TraceStep>> diagnostic_trace;     // unknown verdicts
  std::optional<std::pair<int, int>> witness_sizes;
  std::optional<std::pair<int, int>> checked_sizes;           // finite mode
  struct Stats {
    uint64_t states = 0;
    uint64_t edges = 0;
    uint64_t max_fixpoint_iterations = 0;
    double wall_ms = 0;
  } stats;
};

struct Options {
  uint64_t max_states = 10'000'000;
};

class FragmentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Decides the partial-functions semantics over infinite instances:
// array-free translation, array-consistency constraint, equality-pattern
// quotient, fixpoint check. Exact for every mu-calculus formula.
Verdict check_infinite(const lang::Program& p, const std::string& b0,
                       const mu::Formula::Ptr& f, const Options& opt = {});

// Universal-fragment transfer to all finite instances. Universal
// disjunction-free formulas are decided exactly with a finite witness on
// failure; the wider universal fragment may report unknown.
Verdict check_parameterised(const lang::Program& p, const std::string& b0,
                            const mu::Formula::Ptr& f, const Options& opt = {});

// One fixed instantiation, explicit-state.
Verdict check_finite(const lang::Program& p, int asize, int bsize, const std::string& b0,
                     const mu::Formula::Ptr& f, const Options& opt = {});

struct WitnessInstance {
  int asize = 1, bsize = 1;
  std::vector<concrete::ConcreteState> run;
  std::vector<TraceStep> trace;
};

// Concretizes a replayable partial-semantics execution: the carriers are
// the values occurring in it, arrays are completed backwards from the
// last state (free cells take value 0), and the concrete run replays
// with the same observable trace.
WitnessInstance witness_instance(const lang::Program& p,
                                 const std::vector<partial::RawPartialState>& exec);

}  // namespace dimca::paramcheck
