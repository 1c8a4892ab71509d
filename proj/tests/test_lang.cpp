#include <algorithm>
#include <fstream>
#include <sstream>

#include "dimca/surface.hpp"
#include "doctest.h"

using namespace dimca::lang;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  REQUIRE(f.good());
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("minimal declaration parses") {
  auto sp = parse_program("types X Y\nxvar addrBus : X\n");
  REQUIRE(sp.decls.size() == 1);
  CHECK(sp.decls[0].kind == SurfaceDecl::XVar);
  CHECK(sp.decls[0].names == std::vector<std::string>{"addrBus"});
}

TEST_CASE("fault-tolerant memory source parses with expected declarations") {
  auto sp = parse_program(slurp("programs/ftmem.gap"));
  std::vector<std::string> arrays, xs, ys;
  for (const auto& d : sp.decls) {
    if (d.kind == SurfaceDecl::Array) arrays.insert(arrays.end(), d.names.begin(), d.names.end());
    if (d.kind == SurfaceDecl::XVar) xs.insert(xs.end(), d.names.begin(), d.names.end());
    if (d.kind == SurfaceDecl::YVar) ys.insert(ys.end(), d.names.begin(), d.names.end());
  }
  CHECK(arrays == std::vector<std::string>{"mem1", "mem2", "mem3"});
  CHECK(xs == std::vector<std::string>{"addrBus", "testAddr"});
  CHECK(ys == std::vector<std::string>{"dataBus", "data1", "data2", "data3", "testData"});
}

TEST_CASE("append chain parses into a guarded command with one appendage") {
  auto p = load_program(
      "types X Y\n"
      "xvar x x2\n"
      "yvar y ax ax2\n"
      "trans true -> ax := y : x = x2 -> ax2 := ax\n");
  REQUIRE(p.commands.size() == 1);
  const auto& gc = p.commands[0];
  CHECK(gc.appended.size() == 1);
  CHECK(to_string(gc.appended[0].first) == "x = x2");
  REQUIRE(gc.appended[0].second.data_assigns.size() == 1);
  CHECK(gc.appended[0].second.data_assigns[0].target == "ax2");
}

TEST_CASE("enum lowering is one-hot") {
  auto p = load_program(
      "types X Y\n"
      "enum faults : {0..2}\n"
      "trans true -> faults := 1\n");
  CHECK(p.booleans == std::vector<std::string>{"faults_0", "faults_1", "faults_2"});
  REQUIRE(p.commands.size() == 1);
  const auto& ba = p.commands[0].body.bool_assigns;
  REQUIRE(ba.size() == 3);
  CHECK(to_string(ba[0].value) == "false");
  CHECK(to_string(ba[1].value) == "true");
  CHECK(to_string(ba[2].value) == "false");
}

TEST_CASE("program with no sugar lowers to an identical core program") {
  std::string src =
      "types X Y\n"
      "bool b\n"
      "xvar x\n"
      "yvar y\n"
      "array a\n"
      "init b\n"
      "trans b -> a[x] := y, b := ~b\n";
  auto p = load_program(src);
  CHECK(p.booleans == std::vector<std::string>{"b"});
  CHECK(p.xvars == std::vector<std::string>{"x"});
  CHECK(p.commands.size() == 1);
  CHECK(p.commands[0].appended.empty());
}

TEST_CASE("figure lowering exposes the start flag and the error location") {
  auto p = load_program(slurp("programs/ftmem.gap"));
  auto has = [&](const std::string& n) {
    return std::find(p.booleans.begin(), p.booleans.end(), n) != p.booleans.end();
  };
  CHECK(has("at_start"));
  CHECK(has("loc_ERROR"));
  CHECK(has("loc_START"));
  CHECK(has("faults_0"));
  auto diags = validate(p);
  CHECK(diags.empty());
}

TEST_CASE("count profile") {
  SUBCASE("empty program") {
    auto p = load_program("types X Y\n");
    CHECK(count_profile(p) == CountProfile{0, 0, 0, 0, 0});
  }
  SUBCASE("fault-tolerant memory") {
    auto p = load_program(slurp("programs/ftmem.gap"));
    auto prof = count_profile(p);
    CHECK(prof.n_x == 2);
    CHECK(prof.n_a == 3);
    CHECK(prof.n_y == 5);
  }
}

TEST_CASE("validate reports duplicate array writes once") {
  Program p;
  p.booleans = {"b"};
  p.xvars = {"x"};
  p.yvars = {"y"};
  p.arrays = {"a"};
  GuardedCommand gc;
  gc.guard = Expr::truth();
  gc.body.array_writes.push_back({"a", "x", "y"});
  gc.body.array_writes.push_back({"a", "x", "y"});
  p.commands.push_back(gc);
  auto diags = validate(p);
  REQUIRE(diags.size() == 1);
  CHECK(diags[0].message.find("duplicate array write") != std::string::npos);
}

TEST_CASE("validate rejects cross-type equality") {
  Program p;
  p.xvars = {"x"};
  p.yvars = {"y"};
  GuardedCommand gc;
  gc.guard = Expr::eq("x", "y");
  p.commands.push_back(gc);
  auto diags = validate(p);
  REQUIRE(diags.size() == 1);
  CHECK(diags[0].message.find("type mismatch") != std::string::npos);
}

TEST_CASE("pretty print and reparse is the identity on core programs") {
  const char* sources[] = {
      "types X Y\nbool b\nxvar x x2\nyvar y\narray a\n"
      "init b\n"
      "trans b -> x := ?, b := x = x2 : x = x2 -> y := a[x]\n"
      "trans ~b -> a[x] := y\n",
      "types A B\nyvar u v\ntrans u = v -> u := ?\n",
  };
  for (const char* src : sources) {
    Program p = load_program(src);
    Program q = load_program(pretty_print(p));
    CHECK(equal(p, q));
    CHECK(pretty_print(p) == pretty_print(q));
  }
}

TEST_CASE("lowered programs pass validate") {
  for (const char* path : {"programs/ftmem.gap", "programs/ftmem_core.gap",
                           "programs/ftmem_abstract.gap", "programs/ftmem_mutant.gap"}) {
    auto p = lower_sugar(parse_program(slurp(path)));
    CHECK_MESSAGE(validate(p).empty(), path);
  }
}

TEST_CASE("parser reports positions") {
  try {
    parse_program("types X Y\nxvar x\ntrans true -> x := )\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.pos.line == 3);
  }
}
