#include "dimca/ast.hpp"

#include <set>
#include <sstream>

namespace dimca::lang {

bool equal(const Command& a, const Command& b) {
  if (a.bool_assigns.size() != b.bool_assigns.size() ||
      a.data_assigns.size() != b.data_assigns.size() ||
      a.array_writes.size() != b.array_writes.size())
    return false;
  for (size_t i = 0; i < a.bool_assigns.size(); ++i) {
    if (a.bool_assigns[i].target != b.bool_assigns[i].target ||
        !equal(a.bool_assigns[i].value, b.bool_assigns[i].value))
      return false;
  }
  for (size_t i = 0; i < a.data_assigns.size(); ++i) {
    const auto& x = a.data_assigns[i];
    const auto& y = b.data_assigns[i];
    if (x.target != y.target || x.kind != y.kind || x.src != y.src || x.array != y.array ||
        x.index != y.index)
      return false;
  }
  for (size_t i = 0; i < a.array_writes.size(); ++i) {
    const auto& x = a.array_writes[i];
    const auto& y = b.array_writes[i];
    if (x.array != y.array || x.index != y.index || x.value != y.value) return false;
  }
  return true;
}

bool equal(const GuardedCommand& a, const GuardedCommand& b) {
  if (!equal(a.guard, b.guard) || !equal(a.body, b.body)) return false;
  if (a.appended.size() != b.appended.size()) return false;
  for (size_t i = 0; i < a.appended.size(); ++i) {
    if (!equal(a.appended[i].first, b.appended[i].first) ||
        !equal(a.appended[i].second, b.appended[i].second))
      return false;
  }
  return true;
}

bool equal(const Program& a, const Program& b) {
  if (a.booleans != b.booleans || a.xvars != b.xvars || a.yvars != b.yvars ||
      a.arrays != b.arrays)
    return false;
  if (!equal(a.init, b.init)) return false;
  if (a.commands.size() != b.commands.size()) return false;
  for (size_t i = 0; i < a.commands.size(); ++i)
    if (!equal(a.commands[i], b.commands[i])) return false;
  return true;
}

SymbolTable::SymbolTable(const Program& p) {
  for (size_t i = 0; i < p.booleans.size(); ++i)
    entries.emplace(p.booleans[i], std::pair{VarKind::Bool, int(i)});
  for (size_t i = 0; i < p.xvars.size(); ++i)
    entries.emplace(p.xvars[i], std::pair{VarKind::X, int(i)});
  for (size_t i = 0; i < p.yvars.size(); ++i)
    entries.emplace(p.yvars[i], std::pair{VarKind::Y, int(i)});
  for (size_t i = 0; i < p.arrays.size(); ++i)
    entries.emplace(p.arrays[i], std::pair{VarKind::Array, int(i)});
}

std::optional<std::pair<VarKind, int>> SymbolTable::lookup(const std::string& name) const {
  auto it = entries.find(name);
  if (it == entries.end()) return std::nullopt;
  return it->second;
}

CountProfile count_profile(const Program& p) {
  return CountProfile{int(p.booleans.size()), int(p.xvars.size()), int(p.yvars.size()),
                      int(p.arrays.size()), int(p.commands.size())};
}

namespace {

class Validator {
 public:
  explicit Validator(const Program& p) : p_(p), sym_(p) {}

  std::vector<Diagnostic> run() {
    check_declarations();
    for (size_t i = 0; i < p_.commands.size(); ++i) {
      cmd_ = int(i);
      const auto& gc = p_.commands[i];
      check_expr(gc.guard);
      check_command(gc.body);
      for (const auto& [g, c] : gc.appended) {
        check_expr(g);
        check_command(c);
      }
    }
    cmd_ = -1;
    check_expr(p_.init);
    return std::move(diags_);
  }

 private:
  void report(const std::string& m) { diags_.push_back({m, cmd_}); }

  void check_declarations() {
    std::set<std::string> seen;
    auto scan = [&](const std::vector<std::string>& names) {
      for (const auto& n : names)
        if (!seen.insert(n).second) report("duplicate declaration of '" + n + "'");
    };
    scan(p_.booleans);
    scan(p_.xvars);
    scan(p_.yvars);
    scan(p_.arrays);
  }

  std::optional<std::pair<VarKind, int>> resolve(const std::string& n, const char* role) {
    auto r = sym_.lookup(n);
    if (!r) report(std::string("unknown identifier '") + n + "' (" + role + ")");
    return r;
  }

  bool is_data(VarKind k) { return k == VarKind::X || k == VarKind::Y; }

  void check_expr(const Expr::Ptr& e) {
    switch (e->kind) {
      case ExprKind::True:
      case ExprKind::False: return;
      case ExprKind::Var: {
        auto r = resolve(e->name, "boolean expression");
        if (r && r->first != VarKind::Bool)
          report("'" + e->name + "' is not a boolean variable");
        return;
      }
      case ExprKind::Eq: {
        auto l = resolve(e->lhs, "equality");
        auto r = resolve(e->rhs, "equality");
        if (l && r) {
          if (!is_data(l->first) || !is_data(r->first))
            report("equality requires data variables: " + e->lhs + " = " + e->rhs);
          else if (l->first != r->first)
            report("type mismatch in equality " + e->lhs + " = " + e->rhs);
        }
        return;
      }
      case ExprKind::Not: check_expr(e->a); return;
      case ExprKind::Or:
        check_expr(e->a);
        check_expr(e->b);
        return;
    }
  }

  void check_command(const Command& c) {
    std::set<std::string> targets;
    auto once = [&](const std::string& t) {
      if (!targets.insert(t).second) report("multiple assignments to '" + t + "'");
    };
    for (const auto& ba : c.bool_assigns) {
      once(ba.target);
      auto r = resolve(ba.target, "assignment");
      if (r && r->first != VarKind::Bool)
        report("boolean assignment to non-boolean '" + ba.target + "'");
      check_expr(ba.value);
    }
    for (const auto& da : c.data_assigns) {
      once(da.target);
      auto t = resolve(da.target, "assignment");
      if (t && !is_data(t->first)) {
        report("data assignment to non-data variable '" + da.target + "'");
        continue;
      }
      switch (da.kind) {
        case DataRhs::Input: break;
        case DataRhs::Copy: {
          auto s = resolve(da.src, "copy source");
          if (t && s && s->first != t->first)
            report("type mismatch in " + da.target + " := " + da.src);
          break;
        }
        case DataRhs::Read: {
          auto a = resolve(da.array, "array read");
          auto x = resolve(da.index, "array index");
          if (t && t->first != VarKind::Y)
            report("array read target '" + da.target + "' must have type Y");
          if (a && a->first != VarKind::Array)
            report("'" + da.array + "' is not an array");
          if (x && x->first != VarKind::X)
            report("array index '" + da.index + "' must have type X");
          break;
        }
      }
    }
    std::set<std::string> written;
    for (const auto& w : c.array_writes) {
      if (!written.insert(w.array).second) report("duplicate array write to '" + w.array + "'");
      auto a = resolve(w.array, "array write");
      auto x = resolve(w.index, "array index");
      auto y = resolve(w.value, "array value");
      if (a && a->first != VarKind::Array) report("'" + w.array + "' is not an array");
      if (x && x->first != VarKind::X)
        report("array index '" + w.index + "' must have type X");
      if (y && y->first != VarKind::Y)
        report("array value '" + w.value + "' must have type Y");
    }
  }

  const Program& p_;
  SymbolTable sym_;
  int cmd_ = -1;
  std::vector<Diagnostic> diags_;
};

}  // namespace

std::vector<Diagnostic> validate(const Program& p) { return Validator(p).run(); }

}  // namespace dimca::lang
