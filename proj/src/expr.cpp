#include "dimca/expr.hpp"

#include <functional>
#include <sstream>

namespace dimca::lang {

namespace {

Expr::Ptr make(ExprKind k) {
  auto e = std::make_shared<Expr>();
  e->kind = k;
  return e;
}

}  // namespace

Expr::Ptr Expr::truth() {
  static const Ptr t = make(ExprKind::True);
  return t;
}

Expr::Ptr Expr::falsity() {
  static const Ptr f = make(ExprKind::False);
  return f;
}

Expr::Ptr Expr::var(std::string n) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Var;
  e->name = std::move(n);
  return e;
}

Expr::Ptr Expr::eq(std::string l, std::string r) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Eq;
  e->lhs = std::move(l);
  e->rhs = std::move(r);
  return e;
}

Expr::Ptr Expr::negate(Ptr x) {
  if (x->kind == ExprKind::Not) return x->a;
  if (x->kind == ExprKind::True) return falsity();
  if (x->kind == ExprKind::False) return truth();
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Not;
  e->a = std::move(x);
  return e;
}

Expr::Ptr Expr::disj(Ptr x, Ptr y) {
  if (x->kind == ExprKind::True || y->kind == ExprKind::True) return truth();
  if (x->kind == ExprKind::False) return y;
  if (y->kind == ExprKind::False) return x;
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Or;
  e->a = std::move(x);
  e->b = std::move(y);
  return e;
}

Expr::Ptr Expr::conj(Ptr x, Ptr y) {
  if (x->kind == ExprKind::True) return y;
  if (y->kind == ExprKind::True) return x;
  if (x->kind == ExprKind::False || y->kind == ExprKind::False) return falsity();
  return negate(disj(negate(std::move(x)), negate(std::move(y))));
}

Expr::Ptr Expr::implies(Ptr x, Ptr y) { return disj(negate(std::move(x)), std::move(y)); }

bool equal(const Expr::Ptr& x, const Expr::Ptr& y) {
  if (x.get() == y.get()) return true;
  if (!x || !y || x->kind != y->kind) return false;
  switch (x->kind) {
    case ExprKind::True:
    case ExprKind::False: return true;
    case ExprKind::Var: return x->name == y->name;
    case ExprKind::Eq: return x->lhs == y->lhs && x->rhs == y->rhs;
    case ExprKind::Not: return equal(x->a, y->a);
    case ExprKind::Or: return equal(x->a, y->a) && equal(x->b, y->b);
  }
  return false;
}

void collect_vars(const Expr::Ptr& e, std::vector<std::string>& out) {
  switch (e->kind) {
    case ExprKind::True:
    case ExprKind::False: return;
    case ExprKind::Var: out.push_back(e->name); return;
    case ExprKind::Eq:
      out.push_back(e->lhs);
      out.push_back(e->rhs);
      return;
    case ExprKind::Not: collect_vars(e->a, out); return;
    case ExprKind::Or:
      collect_vars(e->a, out);
      collect_vars(e->b, out);
      return;
  }
}

namespace {

// Precedence: =>  <  |  <  &  <  ~  <  atoms.
enum { kPrecImp = 1, kPrecOr = 2, kPrecAnd = 3, kPrecNot = 4, kPrecAtom = 5 };

void flatten_or(const Expr::Ptr& e, std::vector<Expr::Ptr>& out) {
  if (e->kind == ExprKind::Or) {
    flatten_or(e->a, out);
    flatten_or(e->b, out);
  } else {
    out.push_back(e);
  }
}

void print(const Expr::Ptr& e, int ctx, std::ostringstream& os);

void parenthesized(const Expr::Ptr& e, int ctx, int prec, std::ostringstream& os,
                   const std::function<void()>& body) {
  (void)e;
  if (prec < ctx) os << '(';
  body();
  if (prec < ctx) os << ')';
}

void print(const Expr::Ptr& e, int ctx, std::ostringstream& os) {
  switch (e->kind) {
    case ExprKind::True: os << "true"; return;
    case ExprKind::False: os << "false"; return;
    case ExprKind::Var: os << e->name; return;
    case ExprKind::Eq:
      parenthesized(e, ctx, kPrecAtom, os, [&] { os << e->lhs << " = " << e->rhs; });
      return;
    case ExprKind::Not: {
      // ~(~x | ~y | ...) renders as a conjunction.
      if (e->a->kind == ExprKind::Or) {
        std::vector<Expr::Ptr> leaves;
        flatten_or(e->a, leaves);
        bool all_neg = true;
        for (auto& l : leaves)
          if (l->kind != ExprKind::Not) all_neg = false;
        if (all_neg) {
          parenthesized(e, ctx, kPrecAnd, os, [&] {
            for (size_t i = 0; i < leaves.size(); ++i) {
              if (i) os << " & ";
              print(leaves[i]->a, kPrecAnd + 1, os);
            }
          });
          return;
        }
      }
      os << '~';
      print(e->a, kPrecNot, os);
      return;
    }
    case ExprKind::Or: {
      std::vector<Expr::Ptr> leaves;
      flatten_or(e, leaves);
      // ~x | y renders as an implication.
      if (leaves.size() == 2 && leaves[0]->kind == ExprKind::Not) {
        parenthesized(e, ctx, kPrecImp, os, [&] {
          print(leaves[0]->a, kPrecImp + 1, os);
          os << " => ";
          print(leaves[1], kPrecImp, os);
        });
        return;
      }
      parenthesized(e, ctx, kPrecOr, os, [&] {
        for (size_t i = 0; i < leaves.size(); ++i) {
          if (i) os << " | ";
          print(leaves[i], kPrecOr + 1, os);
        }
      });
      return;
    }
  }
}

}  // namespace

std::string to_string(const Expr::Ptr& e) {
  std::ostringstream os;
  print(e, 0, os);
  return os.str();
}

}  // namespace dimca::lang
