#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dimca/ast.hpp"

namespace dimca::lang {

struct Pos {
  int line = 0, col = 0;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(Pos p, const std::string& msg)
      : std::runtime_error("line " + std::to_string(p.line) + ":" + std::to_string(p.col) +
                           ": " + msg),
        pos(p) {}
  Pos pos;
};

class LowerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Surface expressions keep sugar (&, =>, !=, enum atoms) so that
// lowering, not parsing, resolves identifier kinds.
struct SExpr {
  enum Kind { True, False, Ident, EqAtom, NeqAtom, Not, Or, And, Implies } kind;
  std::string name;            // Ident
  std::string lhs, rhs;        // EqAtom/NeqAtom; rhs may be a numeral
  std::shared_ptr<SExpr> a, b;
  Pos pos;
};
using SExprPtr = std::shared_ptr<SExpr>;

struct SurfaceAssign {
  enum RhsKind { ExprRhs, Input, IdentRhs, ReadRhs } rhs_kind = IdentRhs;
  std::string target;
  std::optional<std::string> write_index;  // present for a[x] := y
  SExprPtr expr;                           // ExprRhs
  std::string rhs_ident;                   // IdentRhs (var, literal) / ReadRhs value
  std::string rhs_array, rhs_index;        // ReadRhs
  Pos pos;
};

struct ChainSeg {
  SExprPtr guard;  // null means true
  std::vector<SurfaceAssign> assigns;
};

struct SurfaceStmt;
using StmtPtr = std::unique_ptr<SurfaceStmt>;

struct SurfaceStmt {
  enum Kind { Assigns, Goto, If } kind = Assigns;
  // Assigns
  std::vector<SurfaceAssign> assigns;
  std::vector<ChainSeg> chain;
  // Goto
  std::string target;
  // If
  SExprPtr cond;
  StmtPtr then_branch, else_branch;
  Pos pos;
};

struct SurfaceLine {
  std::vector<StmtPtr> alts;  // |~| alternatives
  Pos pos;
};

struct SurfaceLabel {
  std::string name;
  std::vector<SurfaceLine> lines;
  Pos pos;
};

struct SurfaceDecl {
  enum Kind { Bool, XVar, YVar, Array, Enum } kind;
  std::vector<std::string> names;
  std::vector<std::string> enum_lits;
  Pos pos;
};

struct SurfaceTrans {
  SExprPtr guard;
  std::vector<SurfaceAssign> assigns;
  std::vector<ChainSeg> chain;
  Pos pos;
};

struct SurfaceProgram {
  std::string xtype = "X", ytype = "Y";
  std::vector<SurfaceDecl> decls;
  SExprPtr init;  // null means true
  std::vector<SurfaceTrans> trans;
  std::vector<SurfaceLabel> labels;
};

SurfaceProgram parse_program(const std::string& text);
Program lower_sugar(const SurfaceProgram& sp);

std::string pretty_print(const Program& p);

// Convenience: parse, lower, validate; throws LowerError on diagnostics.
Program load_program(const std::string& text);

}  // namespace dimca::lang
