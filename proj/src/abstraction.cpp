#include "dimca/abstraction.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace dimca::abstraction {

using lang::Command;
using lang::DataAssign;
using lang::DataRhs;
using lang::Expr;
using lang::GuardedCommand;
using lang::Program;
using lang::SymbolTable;
using lang::VarKind;

std::string cell_var_name(const std::string& array, const std::string& xvar) {
  return array + "_" + xvar;
}

SplitCommand split_command(const Command& c, const Program& p) {
  SymbolTable sym(p);
  SplitCommand out;
  out.iy.bool_assigns = c.bool_assigns;
  out.iy.array_writes = c.array_writes;
  for (const auto& da : c.data_assigns) {
    auto t = sym.lookup(da.target);
    if (t && t->first == VarKind::X)
      out.ix.data_assigns.push_back(da);
    else
      out.iy.data_assigns.push_back(da);
  }
  return out;
}

namespace {

bool has_input(const Command& c, const std::string& var) {
  for (const auto& da : c.data_assigns)
    if (da.target == var && da.kind == DataRhs::Input) return true;
  return false;
}

}  // namespace

GuardedCommand translate_command(const GuardedCommand& gc, const Program& p) {
  if (!gc.appended.empty())
    throw std::invalid_argument("translation is defined for plain commands only");
  if (p.arrays.empty()) return gc;  // nothing to eliminate
  SplitCommand sp = split_command(gc.body, p);

  GuardedCommand out;
  out.guard = gc.guard;

  // I#_Y: reads become cell copies, writes become cell assignments.
  Command iy;
  iy.bool_assigns = sp.iy.bool_assigns;
  for (const auto& da : sp.iy.data_assigns) {
    if (da.kind == DataRhs::Read) {
      DataAssign copy;
      copy.target = da.target;
      copy.kind = DataRhs::Copy;
      copy.src = cell_var_name(da.array, da.index);
      iy.data_assigns.push_back(copy);
    } else {
      iy.data_assigns.push_back(da);
    }
  }
  for (const auto& w : gc.body.array_writes) {
    DataAssign cell;
    cell.target = cell_var_name(w.array, w.index);
    cell.kind = DataRhs::Copy;
    cell.src = w.value;
    iy.data_assigns.push_back(cell);
  }
  out.body = std::move(iy);

  // Write appendages: x = x' -> a_x' := a_x for each other X variable.
  for (const auto& w : gc.body.array_writes) {
    for (const auto& other : p.xvars) {
      if (other == w.index) continue;
      Command app;
      DataAssign copy;
      copy.target = cell_var_name(w.array, other);
      copy.kind = DataRhs::Copy;
      copy.src = cell_var_name(w.array, w.index);
      app.data_assigns.push_back(copy);
      out.appended.emplace_back(Expr::eq(w.index, other), std::move(app));
    }
  }

  // I#_X: copies and dice carry every array's cell variable along.
  if (!sp.ix.data_assigns.empty()) {
    Command ixs;
    for (const auto& da : sp.ix.data_assigns) {
      ixs.data_assigns.push_back(da);
      for (const auto& a : p.arrays) {
        DataAssign cell;
        cell.target = cell_var_name(a, da.target);
        if (da.kind == DataRhs::Copy) {
          cell.kind = DataRhs::Copy;
          cell.src = cell_var_name(a, da.src);
        } else {
          cell.kind = DataRhs::Input;
        }
        ixs.data_assigns.push_back(cell);
      }
    }
    out.appended.emplace_back(Expr::truth(), std::move(ixs));

    // First family: a fresh index might equal a retained one.
    for (const auto& x : p.xvars) {
      if (!has_input(sp.ix, x)) continue;
      for (const auto& other : p.xvars) {
        if (other == x || has_input(sp.ix, other)) continue;
        Command app;
        for (const auto& a : p.arrays) {
          DataAssign copy;
          copy.target = cell_var_name(a, x);
          copy.kind = DataRhs::Copy;
          copy.src = cell_var_name(a, other);
          app.data_assigns.push_back(copy);
        }
        out.appended.emplace_back(Expr::eq(x, other), std::move(app));
      }
    }

    // Second family: two fresh indices might coincide; pairs (i, j) with
    // i > j over the diced variables, in lexicographic order of (i, j).
    std::vector<std::string> dice;
    for (const auto& x : p.xvars)
      if (has_input(sp.ix, x)) dice.push_back(x);
    for (size_t i = 1; i < dice.size(); ++i) {
      for (size_t j = 0; j < i; ++j) {
        Command app;
        for (const auto& a : p.arrays) {
          DataAssign copy;
          copy.target = cell_var_name(a, dice[i]);
          copy.kind = DataRhs::Copy;
          copy.src = cell_var_name(a, dice[j]);
          app.data_assigns.push_back(copy);
        }
        out.appended.emplace_back(Expr::eq(dice[i], dice[j]), std::move(app));
      }
    }
  }
  return out;
}

Program translate_program(const Program& p) {
  Program out;
  out.xtype = p.xtype;
  out.ytype = p.ytype;
  out.booleans = p.booleans;
  out.xvars = p.xvars;
  out.yvars = p.yvars;
  out.init = p.init;

  std::set<std::string> taken;
  for (const auto& lists : {&p.booleans, &p.xvars, &p.yvars, &p.arrays})
    taken.insert(lists->begin(), lists->end());
  for (const auto& a : p.arrays) {
    for (const auto& x : p.xvars) {
      std::string cell = cell_var_name(a, x);
      if (!taken.insert(cell).second)
        throw std::invalid_argument("cell variable name collides with " + cell);
      out.yvars.push_back(cell);
    }
  }
  for (const auto& gc : p.commands) out.commands.push_back(translate_command(gc, p));
  return out;
}

Expr::Ptr sigma(const Program& p) {
  Expr::Ptr acc = Expr::truth();
  for (size_t i = 0; i < p.xvars.size(); ++i) {
    for (size_t j = i + 1; j < p.xvars.size(); ++j) {
      Expr::Ptr cells = Expr::truth();
      for (const auto& a : p.arrays)
        cells = Expr::conj(std::move(cells),
                           Expr::eq(cell_var_name(a, p.xvars[i]), cell_var_name(a, p.xvars[j])));
      acc = Expr::conj(std::move(acc),
                       Expr::implies(Expr::eq(p.xvars[i], p.xvars[j]), std::move(cells)));
    }
  }
  return acc;
}

int segment_count(const Program& p) {
  int n = 0;
  for (const auto& gc : p.commands) n += 1 + int(gc.appended.size());
  return n;
}

}  // namespace dimca::abstraction
