#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "dimca/expr.hpp"

namespace dimca::lang {

enum class DataRhs { Copy, Input, Read };  // z := z' | z := ? | z := a[x]

struct BoolAssign {
  std::string target;
  Expr::Ptr value;
};

struct DataAssign {
  std::string target;
  DataRhs kind = DataRhs::Copy;
  std::string src;           // Copy source
  std::string array, index;  // Read operands
};

struct ArrayWrite {
  std::string array, index, value;  // a[x] := y
};

// A simultaneous multiple assignment.
struct Command {
  std::vector<BoolAssign> bool_assigns;
  std::vector<DataAssign> data_assigns;
  std::vector<ArrayWrite> array_writes;

  bool empty() const {
    return bool_assigns.empty() && data_assigns.empty() && array_writes.empty();
  }
};

struct GuardedCommand {
  Expr::Ptr guard;
  Command body;
  // The ':' chain; each pair executes when its guard holds in the
  // intermediate state and is skipped otherwise.
  std::vector<std::pair<Expr::Ptr, Command>> appended;
};

struct Program {
  std::string xtype = "X", ytype = "Y";
  std::vector<std::string> booleans;
  std::vector<std::string> xvars;
  std::vector<std::string> yvars;
  std::vector<std::string> arrays;
  Expr::Ptr init = Expr::truth();
  std::vector<GuardedCommand> commands;
};

bool equal(const Command& a, const Command& b);
bool equal(const GuardedCommand& a, const GuardedCommand& b);
bool equal(const Program& a, const Program& b);

enum class VarKind { Bool, X, Y, Array };

// Name resolution built once per program.
struct SymbolTable {
  std::unordered_map<std::string, std::pair<VarKind, int>> entries;

  explicit SymbolTable(const Program& p);
  std::optional<std::pair<VarKind, int>> lookup(const std::string& name) const;
};

struct CountProfile {
  int n_b = 0, n_x = 0, n_y = 0, n_a = 0, n_i = 0;
  bool operator==(const CountProfile&) const = default;
};

CountProfile count_profile(const Program& p);

struct Diagnostic {
  std::string message;
  int command = -1;  // index into Program::commands, or -1 for program level
};

// Empty result iff all program and per-command invariants hold.
std::vector<Diagnostic> validate(const Program& p);

}  // namespace dimca::lang
