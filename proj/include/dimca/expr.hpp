#pragma once

#include <memory>
#include <string>
#include <vector>

namespace dimca::lang {

enum class ExprKind { True, False, Var, Eq, Not, Or };

// Boolean expressions: true, false, boolean variable, data equality,
// negation, disjunction. Conjunction and implication are encoded with
// negation/disjunction; the printer recovers them for display.
class Expr {
 public:
  using Ptr = std::shared_ptr<const Expr>;

  ExprKind kind = ExprKind::True;
  std::string name;       // Var
  std::string lhs, rhs;   // Eq
  Ptr a, b;               // Not: a;  Or: a, b

  static Ptr truth();
  static Ptr falsity();
  static Ptr var(std::string n);
  static Ptr eq(std::string l, std::string r);
  static Ptr negate(Ptr e);            // collapses ~~e, ~true, ~false
  static Ptr disj(Ptr x, Ptr y);       // units folded away
  static Ptr conj(Ptr x, Ptr y);       // ~(~x | ~y)
  static Ptr implies(Ptr x, Ptr y);    // ~x | y
};

bool equal(const Expr::Ptr& x, const Expr::Ptr& y);
void collect_vars(const Expr::Ptr& e, std::vector<std::string>& out);

// Deterministic rendering; re-parsing yields the same core expression.
std::string to_string(const Expr::Ptr& e);

}  // namespace dimca::lang
