#pragma once

#include <cstdint>
#include <vector>

#include "dimca/ast.hpp"

namespace dimca {

// Index-resolved form of a program, shared by the semantics engines.
// Names are replaced by positions in the declaration lists.

struct CExprNode {
  enum Kind { True, False, BVar, EqX, EqY, Not, Or } kind = True;
  int a = -1, b = -1;  // BVar/EqX/EqY: variable indices; Not/Or: node indices
};

struct CExpr {
  std::vector<CExprNode> nodes;
  int root = -1;
};

struct CBoolAssign {
  int target;
  CExpr value;
};

struct CDataAssign {
  enum Kind { Copy, Input, Read } kind = Copy;
  int target;     // index into xvars or yvars depending on x_typed
  bool x_typed;   // target (and Copy source) type
  int src = -1;   // Copy
  int array = -1, index = -1;  // Read (Y-typed target only)
};

struct CWrite {
  int array, index, value;  // arrays[array][x[index]] := y[value]
};

struct CCmd {
  std::vector<CBoolAssign> bool_assigns;
  std::vector<CDataAssign> data_assigns;
  std::vector<CWrite> writes;
  std::vector<int> x_dice, y_dice;  // Input targets, in data_assigns order
};

struct CSeg {
  CExpr guard;
  bool guard_is_true = false;  // syntactically `true`
  CCmd cmd;
};

struct CGuarded {
  CExpr guard;
  CCmd base;
  std::vector<CSeg> segs;
};

struct CProgram {
  int nb = 0, nx = 0, ny = 0, na = 0;
  std::vector<CGuarded> commands;
  CExpr init;
  const lang::Program* source = nullptr;
};

CExpr compile_expr(const lang::Expr::Ptr& e, const lang::SymbolTable& sym);
CProgram compile(const lang::Program& p);

// View must provide: int bval(int i) (0/1, or -1 for unknown),
// int eqx(int i,int j), int eqy(int i,int j) with the same convention.
template <class View>
int eval3(const CExpr& e, int node, const View& v) {
  const CExprNode& n = e.nodes[node];
  switch (n.kind) {
    case CExprNode::True: return 1;
    case CExprNode::False: return 0;
    case CExprNode::BVar: return v.bval(n.a);
    case CExprNode::EqX: return v.eqx(n.a, n.b);
    case CExprNode::EqY: return v.eqy(n.a, n.b);
    case CExprNode::Not: {
      int r = eval3(e, n.a, v);
      return r < 0 ? r : 1 - r;
    }
    case CExprNode::Or: {
      int l = eval3(e, n.a, v);
      if (l == 1) return 1;
      int r = eval3(e, n.b, v);
      if (r == 1) return 1;
      return (l == 0 && r == 0) ? 0 : -1;
    }
  }
  return -1;
}

template <class View>
bool ceval(const CExpr& e, const View& v) {
  return eval3(e, e.root, v) == 1;
}

}  // namespace dimca
