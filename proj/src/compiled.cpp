#include "dimca/compiled.hpp"

#include <stdexcept>

namespace dimca {

using lang::Expr;
using lang::ExprKind;
using lang::VarKind;

namespace {

int compile_node(const Expr::Ptr& e, const lang::SymbolTable& sym, CExpr& out) {
  auto resolved = [&](const std::string& n) {
    auto r = sym.lookup(n);
    if (!r) throw std::runtime_error("unresolved name in expression: " + n);
    return *r;
  };
  CExprNode n;
  switch (e->kind) {
    case ExprKind::True: n.kind = CExprNode::True; break;
    case ExprKind::False: n.kind = CExprNode::False; break;
    case ExprKind::Var:
      n.kind = CExprNode::BVar;
      n.a = resolved(e->name).second;
      break;
    case ExprKind::Eq: {
      auto l = resolved(e->lhs), r = resolved(e->rhs);
      n.kind = l.first == VarKind::X ? CExprNode::EqX : CExprNode::EqY;
      n.a = l.second;
      n.b = r.second;
      break;
    }
    case ExprKind::Not:
      n.kind = CExprNode::Not;
      n.a = compile_node(e->a, sym, out);
      break;
    case ExprKind::Or:
      n.kind = CExprNode::Or;
      n.a = compile_node(e->a, sym, out);
      n.b = compile_node(e->b, sym, out);
      break;
  }
  out.nodes.push_back(n);
  return int(out.nodes.size()) - 1;
}

CCmd compile_cmd(const lang::Command& c, const lang::SymbolTable& sym) {
  CCmd out;
  for (const auto& ba : c.bool_assigns) {
    CBoolAssign a;
    a.target = sym.lookup(ba.target)->second;
    a.value = compile_expr(ba.value, sym);
    out.bool_assigns.push_back(std::move(a));
  }
  for (const auto& da : c.data_assigns) {
    CDataAssign a;
    auto t = *sym.lookup(da.target);
    a.target = t.second;
    a.x_typed = t.first == VarKind::X;
    switch (da.kind) {
      case lang::DataRhs::Copy:
        a.kind = CDataAssign::Copy;
        a.src = sym.lookup(da.src)->second;
        break;
      case lang::DataRhs::Input:
        a.kind = CDataAssign::Input;
        (a.x_typed ? out.x_dice : out.y_dice).push_back(a.target);
        break;
      case lang::DataRhs::Read:
        a.kind = CDataAssign::Read;
        a.array = sym.lookup(da.array)->second;
        a.index = sym.lookup(da.index)->second;
        break;
    }
    out.data_assigns.push_back(a);
  }
  for (const auto& w : c.array_writes)
    out.writes.push_back(
        {sym.lookup(w.array)->second, sym.lookup(w.index)->second, sym.lookup(w.value)->second});
  return out;
}

}  // namespace

CExpr compile_expr(const Expr::Ptr& e, const lang::SymbolTable& sym) {
  CExpr out;
  out.root = compile_node(e, sym, out);
  return out;
}

CProgram compile(const lang::Program& p) {
  lang::SymbolTable sym(p);
  CProgram out;
  out.nb = int(p.booleans.size());
  out.nx = int(p.xvars.size());
  out.ny = int(p.yvars.size());
  out.na = int(p.arrays.size());
  out.source = &p;
  out.init = compile_expr(p.init, sym);
  for (const auto& gc : p.commands) {
    CGuarded g;
    g.guard = compile_expr(gc.guard, sym);
    g.base = compile_cmd(gc.body, sym);
    for (const auto& [ge, cmd] : gc.appended) {
      CSeg seg;
      seg.guard = compile_expr(ge, sym);
      seg.guard_is_true = ge->kind == lang::ExprKind::True;
      seg.cmd = compile_cmd(cmd, sym);
      g.segs.push_back(std::move(seg));
    }
    out.commands.push_back(std::move(g));
  }
  return out;
}

}  // namespace dimca
