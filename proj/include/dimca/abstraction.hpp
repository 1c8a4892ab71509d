#pragma once

#include "dimca/ast.hpp"

namespace dimca::abstraction {

struct SplitCommand {
  lang::Command ix;  // x := x' and x := ? only
  lang::Command iy;  // everything else
};

SplitCommand split_command(const lang::Command& c, const lang::Program& p);

// Array-free form of one plain guarded command: reads and writes are
// replaced by copies of the per-(array, x-variable) cell variables, with
// guarded appendages repairing aliased copies.
lang::GuardedCommand translate_command(const lang::GuardedCommand& gc,
                                       const lang::Program& p);

// Adds one Y variable per (array, X variable) pair named a_x, drops the
// arrays, and translates every command. Commands must be plain.
lang::Program translate_program(const lang::Program& p);

// Conjunction over all unordered X-variable pairs and arrays of
// x = x' => a_x = a_x'; literal true when fewer than two X variables.
lang::Expr::Ptr sigma(const lang::Program& p);

std::string cell_var_name(const std::string& array, const std::string& xvar);

// Total number of multiple-assignment segments (bases plus appendages).
int segment_count(const lang::Program& p);

}  // namespace dimca::abstraction
