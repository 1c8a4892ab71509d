#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dimca/ts.hpp"

namespace dimca::mu {

enum class FKind { Obs, NegObs, Var, Or, And, EX, AX, Mu, Nu };

class Formula {
 public:
  using Ptr = std::shared_ptr<const Formula>;
  FKind kind = FKind::Obs;
  std::string name;  // Obs/NegObs: observable; Var/Mu/Nu: variable
  Ptr a, b;

  static Ptr obs(std::string n);
  static Ptr neg_obs(std::string n);
  static Ptr var(std::string n);
  static Ptr mk2(FKind k, Ptr x, Ptr y);       // Or / And
  static Ptr mk1(FKind k, Ptr x);              // EX / AX
  static Ptr bind(FKind k, std::string h, Ptr body);  // Mu / Nu
};

class FormulaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Surface syntax: `~p`, `EX`/`AX`, `mu h. f`, `nu h. f`, `&`, `|`.
// Binders are alpha-renamed so capture is impossible.
Formula::Ptr parse_formula(const std::string& text);
std::string to_string(const Formula::Ptr& f);

bool is_closed(const Formula::Ptr& f);
std::vector<std::string> observables_of(const Formula::Ptr& f);

// Constructor-swapping involution p<->~p, |<->&, EX<->AX, mu<->nu.
Formula::Ptr dualize(const Formula::Ptr& f);

struct Fragment {
  bool l2 = false, l4 = false;            // existential / conjunction-free
  bool dual_l2 = false, dual_l4 = false;  // universal fragments
  std::string tag() const;                // most specific label
};

Fragment classify(const Formula::Ptr& f);

// Names the first constructor that keeps dualize(f) outside L2.
std::optional<std::string> dual_l2_offender(const Formula::Ptr& f);

struct EvalStats {
  uint64_t max_iterations = 0;  // longest Knaster-Tarski chain seen
  uint64_t fixpoint_evals = 0;
};

using Env = std::map<std::string, Bits>;

Bits eval(const TransitionSystem& ts, const Formula::Ptr& f, const Env& env = {},
          EvalStats* stats = nullptr);

struct CheckResult {
  bool holds = false;
  std::optional<std::vector<uint32_t>> counterexample;  // state path, dual-L4 only
  std::optional<uint32_t> violating_seed;
  EvalStats stats;
};

// True iff every b0-state inside `restrict_to` (when given) satisfies f.
CheckResult check(const TransitionSystem& ts, const std::string& b0,
                  const std::optional<Bits>& restrict_to, const Formula::Ptr& f);

}  // namespace dimca::mu
