#include <sstream>

#include "dimca/surface.hpp"

namespace dimca::lang {

namespace {

void print_assigns(const Command& c, std::ostringstream& os) {
  if (c.empty()) {
    os << "skip";
    return;
  }
  bool first = true;
  auto sep = [&] {
    if (!first) os << ", ";
    first = false;
  };
  for (const auto& ba : c.bool_assigns) {
    sep();
    os << ba.target << " := " << to_string(ba.value);
  }
  for (const auto& da : c.data_assigns) {
    sep();
    os << da.target << " := ";
    switch (da.kind) {
      case DataRhs::Copy: os << da.src; break;
      case DataRhs::Input: os << "?"; break;
      case DataRhs::Read: os << da.array << "[" << da.index << "]"; break;
    }
  }
  for (const auto& w : c.array_writes) {
    sep();
    os << w.array << "[" << w.index << "] := " << w.value;
  }
}

}  // namespace

std::string pretty_print(const Program& p) {
  std::ostringstream os;
  os << "types " << p.xtype << " " << p.ytype << "\n";
  auto decl = [&](const char* kw, const std::vector<std::string>& names) {
    if (names.empty()) return;
    os << kw;
    for (const auto& n : names) os << " " << n;
    os << "\n";
  };
  decl("bool", p.booleans);
  decl("xvar", p.xvars);
  decl("yvar", p.yvars);
  decl("array", p.arrays);
  if (p.init->kind != ExprKind::True) os << "init " << to_string(p.init) << "\n";
  for (const auto& gc : p.commands) {
    os << "trans " << to_string(gc.guard) << " -> ";
    print_assigns(gc.body, os);
    for (const auto& [g, c] : gc.appended) {
      os << " : " << to_string(g) << " -> ";
      print_assigns(c, os);
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace dimca::lang
