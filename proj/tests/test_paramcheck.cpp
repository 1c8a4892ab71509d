#include <algorithm>

#include "dimca/oracle.hpp"
#include "dimca/paramcheck.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace dimca;
using namespace dimca::lang;
using namespace dimca::paramcheck;
using testsupport::load_fixture;

TEST_CASE("greatest fixpoint of the identity holds everywhere") {
  Program p = load_program("types X Y\nbool b\nxvar x\narray a\nyvar y\n"
                           "trans true -> y := a[x]\n");
  auto v = check_infinite(p, "b", mu::parse_formula("nu h. h"));
  CHECK(v.answer == Answer::Holds);
  CHECK(v.mode == Mode::Infinite);
}

TEST_CASE("a length-one execution gives the minimal instantiation") {
  Program p = load_program("types X Y\nbool b\nxvar x\nyvar y\narray a\n"
                           "trans true -> y := ?\n");
  partial::RawPartialState s;
  s.bools = {1};
  s.xvals = {0};
  s.yvals = {4};
  s.arrays = {{{0, 4}}};
  auto w = witness_instance(p, {s});
  CHECK(w.asize == 1);
  CHECK(w.bsize == 1);
  REQUIRE(w.run.size() == 1);
  CHECK(w.trace[0].observables_true == std::vector<std::string>{"b"});
}

TEST_CASE("an execution over two fresh indices replays at size two") {
  Program p = load_program("types X Y\nbool b\nxvar x\nyvar y\narray a\n"
                           "trans true -> x := ?\n");
  partial::PartialState c;
  c.bools = {1};
  c.xvals = {0};
  c.yvals = {0};
  c.arrays = {{0}};
  partial::RawPartialState s0 = partial::to_raw(c);
  // Walk the raw semantics twice, moving to a fresh index each time.
  auto pick_fresh = [&](const partial::RawPartialState& s) {
    auto succ = partial::step_partial_raw(p, s, p.commands[0]);
    for (const auto& t : succ)
      if (t.xvals[0] != s.xvals[0]) return t;
    return succ.front();
  };
  partial::RawPartialState s1 = pick_fresh(s0);
  partial::RawPartialState s2 = pick_fresh(s1);
  auto w = witness_instance(p, {s0, s1, s2});
  CHECK(w.asize >= 2);
  CHECK(w.run.size() == 3);
  // Observable projection is preserved.
  for (const auto& st : w.trace) CHECK(st.observables_true == std::vector<std::string>{"b"});
}

TEST_CASE("fragment rejection names the offending constructor") {
  Program p = load_program("types X Y\nbool b\ntrans true -> b := ~b\n");
  try {
    check_parameterised(p, "b", mu::parse_formula("mu h. b | EX h"));
    FAIL("expected rejection");
  } catch (const FragmentError& e) {
    std::string msg = e.what();
    CHECK(msg.find("universal fragment") != std::string::npos);
    CHECK(msg.find("positive observable") != std::string::npos);
  }
}

TEST_CASE("universal disjunction-free failures carry finite witnesses") {
  // b flags the start; c can become true after one step, violating AX ~c.
  Program p = load_program(
      "types X Y\nbool b c\nxvar x\nyvar y u\narray a\n"
      "init ~c\n"
      "trans b -> b := false, y := ?\n"
      "trans ~b -> c := true, u := a[x]\n");
  auto f = mu::parse_formula("nu h. AX(~c & h)");
  auto v = check_parameterised(p, "b", f);
  CHECK(v.mode == Mode::Parameterised);
  CHECK(v.answer == Answer::Fails);
  REQUIRE(v.witness_sizes.has_value());
  CHECK(v.witness_sizes->first <= 2);
  CHECK(v.witness_sizes->second <= 2);
  REQUIRE(v.counterexample.has_value());
  // The finite instance indeed fails.
  auto fin = check_finite(p, v.witness_sizes->first, v.witness_sizes->second, "b", f);
  CHECK(fin.answer == Answer::Fails);
}

TEST_CASE("universal-fragment failures outside dual-L4 report unknown") {
  // AX ~b | AX ~c fails over the infinite semantics but the transfer is
  // one-directional, so the verdict is a possible false negative.
  Program p = load_program(
      "types X Y\nbool b c\n"
      "trans true -> b := true\n"
      "trans true -> c := true\n");
  auto f = mu::parse_formula("AX ~b | AX ~c");
  REQUIRE(mu::classify(f).tag() == "dualL2");
  auto v = check_parameterised(p, "b", f);
  CHECK(v.answer == Answer::Unknown);
  CHECK(!v.counterexample.has_value());
  REQUIRE(v.diagnostic_trace.has_value());
  CHECK(v.diagnostic_trace->size() == 1);
}

TEST_CASE("holds verdicts transfer to every small instance") {
  Program p = load_program(
      "types X Y\nbool b0 bad\nxvar x1 x2\nyvar y\narray a\n"
      "init ~bad\n"
      "trans true -> a[x1] := y\n"
      "trans x1 = x2 -> y := a[x2], bad := bad\n");
  auto f = mu::parse_formula("nu h. AX(~bad & h)");
  // bad can never become true here.
  auto v = check_parameterised(p, "b0", f);
  CHECK(v.answer == Answer::HoldsForAllFinite);
  for (int a = 1; a <= 2; ++a)
    for (int bsz = 1; bsz <= 2; ++bsz)
      CHECK(oracle::brute_check(p, a, bsz, "b0", f));
}

TEST_CASE("finite checks agree with the brute-force oracle") {
  testsupport::ProgramGen gen(5150);
  testsupport::FormulaGen fg(6021);
  int done = 0;
  for (int trial = 0; trial < 25 && done < 10; ++trial) {
    Program p = gen.next();
    auto f = fg.dual_l4(p.booleans, 3);
    if (!mu::classify(f).dual_l4) continue;
    Verdict v;
    try {
      v = check_finite(p, 2, 2, "b0", f, {200000});
    } catch (const ResourceLimitError&) {
      continue;
    }
    bool brute = oracle::brute_check(p, 2, 2, "b0", f, 200000);
    CHECK((v.answer == Answer::Holds) == brute);
    ++done;
  }
  CHECK(done == 10);
}
