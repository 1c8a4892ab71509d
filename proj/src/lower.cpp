#include <map>
#include <set>
#include <sstream>

#include "dimca/surface.hpp"

namespace dimca::lang {

namespace {

constexpr const char* kStartFlag = "at_start";
constexpr const char* kLocPrefix = "loc_";

struct Triple {
  Expr::Ptr guard = Expr::truth();
  Command body;
  std::vector<std::pair<Expr::Ptr, Command>> chain;
  std::optional<std::string> goto_label;
};

class Lowerer {
 public:
  explicit Lowerer(const SurfaceProgram& sp) : sp_(sp) {}

  Program run() {
    collect_decls();
    bool labelled = !sp_.labels.empty();

    // Program points: line i of label L is named L for i = 0, L_(i+1) after.
    std::vector<std::pair<std::string, const SurfaceLine*>> points;
    std::map<std::string, std::string> label_entry;
    for (const auto& lb : sp_.labels) {
      if (lb.lines.empty()) throw LowerError("label " + lb.name + " has no statements");
      if (!label_entry.emplace(lb.name, lb.name).second)
        throw LowerError("duplicate label " + lb.name);
      for (size_t i = 0; i < lb.lines.size(); ++i) {
        std::string pt = i == 0 ? lb.name : lb.name + "_" + std::to_string(i + 1);
        points.emplace_back(pt, &lb.lines[i]);
      }
    }

    // Fall-through targets: the next point, or the next label after the
    // block, or a synthesized terminal point.
    std::vector<std::string> fallthrough(points.size());
    bool need_end = false;
    {
      size_t k = 0;
      for (size_t li = 0; li < sp_.labels.size(); ++li) {
        const auto& lb = sp_.labels[li];
        for (size_t i = 0; i < lb.lines.size(); ++i, ++k) {
          if (i + 1 < lb.lines.size()) {
            fallthrough[k] = lb.name + "_" + std::to_string(i + 2);
          } else if (li + 1 < sp_.labels.size()) {
            fallthrough[k] = sp_.labels[li + 1].name;
          } else {
            fallthrough[k] = "END";
            if (line_can_fall_through(*points[k].second)) need_end = true;
          }
        }
      }
    }

    if (labelled) {
      declare_bool(kStartFlag);
      for (auto& [pt, _] : points) declare_bool(kLocPrefix + pt);
      if (need_end) declare_bool(kLocPrefix + std::string("END"));
    }

    Program p;
    p.xtype = sp_.xtype;
    p.ytype = sp_.ytype;
    p.booleans = booleans_;
    p.xvars = xvars_;
    p.yvars = yvars_;
    p.arrays = arrays_;

    // trans commands; with labels present they require the start flag
    // to be down, like every non-entry instruction.
    for (const auto& tr : sp_.trans) {
      GuardedCommand gc;
      gc.guard = lower_expr(tr.guard);
      if (labelled) gc.guard = Expr::conj(Expr::negate(Expr::var(kStartFlag)), gc.guard);
      gc.body = lower_assigns(tr.assigns);
      for (const auto& seg : tr.chain)
        gc.appended.emplace_back(seg.guard ? lower_expr(seg.guard) : Expr::truth(),
                                 lower_assigns(seg.assigns));
      p.commands.push_back(std::move(gc));
    }

    const std::string entry = labelled ? points.front().first : "";
    for (size_t k = 0; k < points.size(); ++k) {
      const auto& [pt, line] = points[k];
      for (const auto& alt : line->alts) {
        for (Triple& t : lower_stmt(*alt)) {
          GuardedCommand gc;
          Expr::Ptr start_term = pt == entry ? Expr::var(kStartFlag)
                                             : Expr::negate(Expr::var(kStartFlag));
          gc.guard = Expr::conj(std::move(start_term),
                                Expr::conj(Expr::var(kLocPrefix + pt), t.guard));
          gc.body = std::move(t.body);
          if (pt == entry) gc.body.bool_assigns.push_back({kStartFlag, Expr::falsity()});
          std::string target = pt;
          if (t.goto_label) {
            auto it = label_entry.find(*t.goto_label);
            if (it == label_entry.end())
              throw LowerError("goto to unknown label " + *t.goto_label);
            target = it->second;
          } else {
            target = fallthrough[k];
          }
          if (target == pt) {
            gc.body.bool_assigns.push_back({kLocPrefix + pt, Expr::truth()});
          } else {
            gc.body.bool_assigns.push_back({kLocPrefix + pt, Expr::falsity()});
            gc.body.bool_assigns.push_back({kLocPrefix + target, Expr::truth()});
          }
          gc.appended = std::move(t.chain);
          p.commands.push_back(std::move(gc));
        }
      }
    }

    // init: user condition, then one-hot constraints for each enum, then
    // the program counter pinned at the entry point.
    Expr::Ptr init = sp_.init ? lower_expr(sp_.init) : Expr::truth();
    for (const auto& d : sp_.decls) {
      if (d.kind != SurfaceDecl::Enum) continue;
      init = Expr::conj(std::move(init), one_hot(enum_bits(d.names[0])));
    }
    if (labelled) {
      Expr::Ptr pin = Expr::var(kLocPrefix + entry);
      for (size_t k = 0; k < points.size(); ++k) {
        if (points[k].first == entry) continue;
        pin = Expr::conj(std::move(pin),
                         Expr::negate(Expr::var(kLocPrefix + points[k].first)));
      }
      if (need_end)
        pin = Expr::conj(std::move(pin), Expr::negate(Expr::var("loc_END")));
      init = Expr::conj(std::move(init), std::move(pin));
    }
    p.init = std::move(init);
    return p;
  }

 private:
  enum class NameKind { Bool, Enum, X, Y, Array };

  static bool line_can_fall_through(const SurfaceLine& line) {
    for (const auto& alt : line.alts)
      if (stmt_can_fall_through(*alt)) return true;
    return false;
  }

  static bool stmt_can_fall_through(const SurfaceStmt& s) {
    switch (s.kind) {
      case SurfaceStmt::Goto: return false;
      case SurfaceStmt::Assigns: return true;
      case SurfaceStmt::If:
        if (!s.else_branch) return true;
        return stmt_can_fall_through(*s.then_branch) || stmt_can_fall_through(*s.else_branch);
    }
    return true;
  }

  void declare(const std::string& n, NameKind k) {
    if (!kinds_.emplace(n, k).second) throw LowerError("duplicate declaration of " + n);
  }

  void declare_bool(const std::string& n) {
    declare(n, NameKind::Bool);
    booleans_.push_back(n);
  }

  void collect_decls() {
    for (const auto& d : sp_.decls) {
      switch (d.kind) {
        case SurfaceDecl::Bool:
          for (const auto& n : d.names) declare_bool(n);
          break;
        case SurfaceDecl::XVar:
          for (const auto& n : d.names) {
            declare(n, NameKind::X);
            xvars_.push_back(n);
          }
          break;
        case SurfaceDecl::YVar:
          for (const auto& n : d.names) {
            declare(n, NameKind::Y);
            yvars_.push_back(n);
          }
          break;
        case SurfaceDecl::Array:
          for (const auto& n : d.names) {
            declare(n, NameKind::Array);
            arrays_.push_back(n);
          }
          break;
        case SurfaceDecl::Enum: {
          const std::string& n = d.names[0];
          declare(n, NameKind::Enum);
          enums_[n] = d.enum_lits;
          for (const auto& lit : d.enum_lits) {
            std::string bit = n + "_" + lit;
            if (!kinds_.emplace(bit, NameKind::Bool).second)
              throw LowerError("enum literal boolean collides with " + bit);
            booleans_.push_back(bit);
          }
          break;
        }
      }
    }
  }

  std::vector<std::string> enum_bits(const std::string& var) const {
    std::vector<std::string> bits;
    for (const auto& lit : enums_.at(var)) bits.push_back(var + "_" + lit);
    return bits;
  }

  static Expr::Ptr one_hot(const std::vector<std::string>& bits) {
    Expr::Ptr any = Expr::falsity();
    for (const auto& b : bits) any = Expr::disj(std::move(any), Expr::var(b));
    Expr::Ptr e = std::move(any);
    for (size_t i = 0; i < bits.size(); ++i)
      for (size_t j = i + 1; j < bits.size(); ++j)
        e = Expr::conj(std::move(e), Expr::disj(Expr::negate(Expr::var(bits[i])),
                                                Expr::negate(Expr::var(bits[j]))));
    return e;
  }

  NameKind kind_of(const std::string& n, Pos pos) const {
    auto it = kinds_.find(n);
    if (it == kinds_.end()) throw ParseError(pos, "unknown identifier " + n);
    return it->second;
  }

  Expr::Ptr lower_expr(const SExprPtr& e) const {
    switch (e->kind) {
      case SExpr::True: return Expr::truth();
      case SExpr::False: return Expr::falsity();
      case SExpr::Ident: {
        if (kind_of(e->name, e->pos) != NameKind::Bool)
          throw ParseError(e->pos, e->name + " is not usable as a boolean atom");
        return Expr::var(e->name);
      }
      case SExpr::EqAtom:
      case SExpr::NeqAtom: {
        Expr::Ptr core;
        NameKind lk = kind_of(e->lhs, e->pos);
        if (lk == NameKind::Enum) {
          const auto& lits = enums_.at(e->lhs);
          if (std::find(lits.begin(), lits.end(), e->rhs) == lits.end())
            throw ParseError(e->pos, e->rhs + " is not a literal of enum " + e->lhs);
          core = Expr::var(e->lhs + "_" + e->rhs);
        } else if (lk == NameKind::X || lk == NameKind::Y) {
          NameKind rk = kind_of(e->rhs, e->pos);
          if (rk != lk)
            throw ParseError(e->pos,
                             "equality operands must share a data type: " + e->lhs + ", " + e->rhs);
          core = Expr::eq(e->lhs, e->rhs);
        } else {
          throw ParseError(e->pos, "cannot compare " + e->lhs + " with '='");
        }
        return e->kind == SExpr::NeqAtom ? Expr::negate(std::move(core)) : core;
      }
      case SExpr::Not: return Expr::negate(lower_expr(e->a));
      case SExpr::Or: return Expr::disj(lower_expr(e->a), lower_expr(e->b));
      case SExpr::And: return Expr::conj(lower_expr(e->a), lower_expr(e->b));
      case SExpr::Implies: return Expr::implies(lower_expr(e->a), lower_expr(e->b));
    }
    return Expr::truth();
  }

  Command lower_assigns(const std::vector<SurfaceAssign>& assigns) const {
    Command c;
    for (const auto& a : assigns) {
      if (a.write_index) {
        if (kind_of(a.target, a.pos) != NameKind::Array)
          throw ParseError(a.pos, a.target + " is not an array");
        if (a.rhs_kind == SurfaceAssign::Input)
          throw ParseError(a.pos, "array cells cannot be assigned '?'");
        c.array_writes.push_back({a.target, *a.write_index, a.rhs_ident});
        continue;
      }
      NameKind tk = kind_of(a.target, a.pos);
      switch (tk) {
        case NameKind::Bool: {
          if (a.rhs_kind == SurfaceAssign::ExprRhs) {
            c.bool_assigns.push_back({a.target, lower_expr(a.expr)});
          } else if (a.rhs_kind == SurfaceAssign::IdentRhs) {
            if (kind_of(a.rhs_ident, a.pos) != NameKind::Bool)
              throw ParseError(a.pos, "boolean assignment needs a boolean value");
            c.bool_assigns.push_back({a.target, Expr::var(a.rhs_ident)});
          } else {
            throw ParseError(a.pos, "invalid boolean assignment to " + a.target);
          }
          break;
        }
        case NameKind::Enum: {
          if (a.rhs_kind != SurfaceAssign::IdentRhs)
            throw ParseError(a.pos, "enum assignment needs a literal");
          const auto& lits = enums_.at(a.target);
          if (std::find(lits.begin(), lits.end(), a.rhs_ident) == lits.end())
            throw ParseError(a.pos, "assignment of undeclared literal " + a.rhs_ident);
          for (const auto& lit : lits)
            c.bool_assigns.push_back(
                {a.target + "_" + lit, lit == a.rhs_ident ? Expr::truth() : Expr::falsity()});
          break;
        }
        case NameKind::X:
        case NameKind::Y: {
          DataAssign da;
          da.target = a.target;
          if (a.rhs_kind == SurfaceAssign::Input) {
            da.kind = DataRhs::Input;
          } else if (a.rhs_kind == SurfaceAssign::IdentRhs) {
            NameKind rk = kind_of(a.rhs_ident, a.pos);
            if (rk != tk)
              throw ParseError(a.pos, "copy between different types: " + a.target + " := " +
                                          a.rhs_ident);
            da.kind = DataRhs::Copy;
            da.src = a.rhs_ident;
          } else if (a.rhs_kind == SurfaceAssign::ReadRhs) {
            da.kind = DataRhs::Read;
            da.array = a.rhs_array;
            da.index = a.rhs_index;
          } else {
            throw ParseError(a.pos, "invalid data assignment to " + a.target);
          }
          c.data_assigns.push_back(std::move(da));
          break;
        }
        case NameKind::Array:
          throw ParseError(a.pos, "arrays can only be written per cell: " + a.target + "[x] := y");
      }
    }
    return c;
  }

  std::vector<Triple> lower_stmt(const SurfaceStmt& s) const {
    switch (s.kind) {
      case SurfaceStmt::Assigns: {
        Triple t;
        t.body = lower_assigns(s.assigns);
        for (const auto& seg : s.chain)
          t.chain.emplace_back(seg.guard ? lower_expr(seg.guard) : Expr::truth(),
                               lower_assigns(seg.assigns));
        std::vector<Triple> out;
        out.push_back(std::move(t));
        return out;
      }
      case SurfaceStmt::Goto: {
        Triple t;
        t.goto_label = s.target;
        std::vector<Triple> out;
        out.push_back(std::move(t));
        return out;
      }
      case SurfaceStmt::If: {
        Expr::Ptr cond = lower_expr(s.cond);
        std::vector<Triple> out;
        for (Triple& t : lower_stmt(*s.then_branch)) {
          t.guard = Expr::conj(cond, std::move(t.guard));
          out.push_back(std::move(t));
        }
        if (s.else_branch) {
          for (Triple& t : lower_stmt(*s.else_branch)) {
            t.guard = Expr::conj(Expr::negate(cond), std::move(t.guard));
            out.push_back(std::move(t));
          }
        } else {
          Triple skip;
          skip.guard = Expr::negate(cond);
          out.push_back(std::move(skip));
        }
        return out;
      }
    }
    return {};
  }

  const SurfaceProgram& sp_;
  std::map<std::string, NameKind> kinds_;
  std::map<std::string, std::vector<std::string>> enums_;
  std::vector<std::string> booleans_, xvars_, yvars_, arrays_;
};

}  // namespace

Program lower_sugar(const SurfaceProgram& sp) { return Lowerer(sp).run(); }

Program load_program(const std::string& text) {
  Program p = lower_sugar(parse_program(text));
  auto diags = validate(p);
  if (!diags.empty()) {
    std::ostringstream os;
    os << "program is not well-formed:";
    for (const auto& d : diags) os << "\n  " << d.message;
    throw LowerError(os.str());
  }
  return p;
}

}  // namespace dimca::lang
