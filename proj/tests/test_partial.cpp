#include <algorithm>

#include "dimca/partial.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace dimca;
using namespace dimca::lang;
using namespace dimca::partial;
using testsupport::load_fixture;

TEST_CASE("canonicalize prunes and renames by first occurrence") {
  // One X variable on value 7, one array with a stale entry at 3, one Y
  // variable sharing the cell's value.
  Program p = load_program("types X Y\nxvar x\nyvar y\narray a\ntrans true -> y := ?\n");
  RawPartialState raw;
  raw.bools = {};
  raw.xvals = {7};
  raw.yvals = {9};
  raw.arrays = {{{7, 9}, {3, 1}}};
  PartialState c = canonicalize(raw);
  CHECK(c.xvals == std::vector<int>{0});
  CHECK(c.yvals == std::vector<int>{0});
  REQUIRE(c.arrays.size() == 1);
  CHECK(c.arrays[0] == std::vector<int>{0});
  // Idempotence.
  CHECK(canonicalize(to_raw(c)) == c);
}

TEST_CASE("canonicalize is invariant under value bijections") {
  Program p = load_program(
      "types X Y\nxvar x1 x2\nyvar y1 y2\narray a\ntrans true -> y1 := ?\n");
  testsupport::Rng rng(555);
  for (int trial = 0; trial < 50; ++trial) {
    RawPartialState raw;
    raw.xvals = {testsupport::pick(rng, 0, 2), testsupport::pick(rng, 0, 2)};
    raw.yvals = {testsupport::pick(rng, 10, 12), testsupport::pick(rng, 10, 12)};
    raw.arrays.resize(1);
    for (int v : raw.xvals) raw.arrays[0][v] = testsupport::pick(rng, 10, 12);
    PartialState c1 = canonicalize(raw);
    // Apply injections on both value spaces.
    auto xb = [](int v) { return 7 * v + 3; };
    auto yb = [](int v) { return 5 * v + 1; };
    RawPartialState moved;
    moved.bools = raw.bools;
    for (int v : raw.xvals) moved.xvals.push_back(xb(v));
    for (int v : raw.yvals) moved.yvals.push_back(yb(v));
    moved.arrays.resize(1);
    for (auto [k, v] : raw.arrays[0]) moved.arrays[0][xb(k)] = yb(v);
    CHECK(canonicalize(moved) == c1);
  }
}

TEST_CASE("read and write steps are deterministic") {
  Program p = load_program(
      "types X Y\nxvar x\nyvar y\narray a\n"
      "trans true -> y := a[x]\n"
      "trans true -> a[x] := y\n");
  PartialState s;
  s.xvals = {0};
  s.yvals = {1};        // distinct from the cell's value
  s.arrays = {{0}};     // a(x) has value id 0
  SUBCASE("read copies the cell") {
    auto succ = step_partial(p, s, p.commands[0]);
    REQUIRE(succ.size() == 1);
    CHECK(succ[0].yvals[0] == succ[0].arrays[0][0]);
  }
  SUBCASE("write updates only the held entry") {
    auto succ = step_partial(p, s, p.commands[1]);
    REQUIRE(succ.size() == 1);
    CHECK(succ[0].arrays[0][0] == succ[0].yvals[0]);
  }
}

TEST_CASE("fresh index input: stay, or move with the cell resolved") {
  // Two X variables sharing one index keeps the old entry in view, so
  // moving to a fresh index distinguishes keeping the old value from a
  // brand new one: three canonical successors.
  Program p = load_program(
      "types X Y\nxvar x x2\narray a\n"
      "trans true -> x := ?\n");
  PartialState s;
  s.xvals = {0, 0};
  s.arrays = {{0}};
  auto succ = step_partial(p, s, p.commands[0]);
  CHECK(succ.size() == 3);
  // One successor stays put; the others hold a fresh index whose cell
  // either matches the retained entry or is new.
  int stay = 0, same_val = 0, fresh_val = 0;
  for (const auto& t : succ) {
    if (t.xvals == std::vector<int>{0, 0})
      ++stay;
    else if (t.arrays[0][t.xvals[0]] == t.arrays[0][t.xvals[1]])
      ++same_val;
    else
      ++fresh_val;
  }
  CHECK(stay == 1);
  CHECK(same_val == 1);
  CHECK(fresh_val == 1);
}

TEST_CASE("a lone X variable forgets its old cell when it moves") {
  Program p = load_program("types X Y\nxvar x\narray a\ntrans true -> x := ?\n");
  PartialState s;
  s.xvals = {0};
  s.arrays = {{0}};
  // Staying and moving to a fresh index are indistinguishable once the
  // old entry is pruned.
  auto succ = step_partial(p, s, p.commands[0]);
  CHECK(succ.size() == 1);
  CHECK(succ[0] == s);
}

TEST_CASE("programs without data variables match their concrete systems") {
  Program p = load_program(
      "types X Y\nbool b c\n"
      "init b\n"
      "trans b -> c := b, b := ~b\n"
      "trans ~b -> b := c\n");
  BuildOptions opt;
  opt.all_states = true;
  auto pts = build_partial_ts(p, opt);
  CHECK(pts.num_states == 4);
  CHECK(pts.edge_count() == 4);
}

TEST_CASE("partial successors respect the append two-case rule") {
  Program p = load_program(
      "types X Y\nbool b\nxvar x x2\nyvar y\narray a\n"
      "trans true -> a[x] := y : x = x2 -> b := true\n");
  PartialState s;
  s.bools = {0};
  s.xvals = {0, 1};
  s.yvals = {0};
  s.arrays = {{1, 2}};
  auto succ = step_partial(p, s, p.commands[0]);
  REQUIRE(succ.size() == 1);
  CHECK(succ[0].bools[0] == 0);  // indices differ: appendage skipped
}

TEST_CASE("build caps report resource errors") {
  Program p = load_fixture("programs/ftmem_core.gap");
  BuildOptions opt;
  opt.max_states = 32;
  opt.seed = Expr::conj(p.init, Expr::var("at_start"));
  CHECK_THROWS_AS(build_partial_ts(p, opt), ResourceLimitError);
}
