#include <map>

#include "dimca/mu.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace dimca;
using namespace dimca::mu;

namespace {

// Direct lattice enumeration: fixpoints by quantifying over every
// subset of states. Only usable on very small systems.
Bits subset_eval(const TransitionSystem& ts, const Formula::Ptr& f,
                 std::map<std::string, Bits>& env) {
  uint32_t n = ts.num_states;
  switch (f->kind) {
    case FKind::Obs: return ts.extents[ts.obs_index(f->name)];
    case FKind::NegObs: return ~ts.extents[ts.obs_index(f->name)];
    case FKind::Var: return env.at(f->name);
    case FKind::Or: return subset_eval(ts, f->a, env) | subset_eval(ts, f->b, env);
    case FKind::And: return subset_eval(ts, f->a, env) & subset_eval(ts, f->b, env);
    case FKind::EX: {
      Bits s = subset_eval(ts, f->a, env);
      Bits r(n);
      for (uint32_t q = 0; q < n; ++q) {
        bool any = false;
        ts.for_each_successor(q, [&](uint32_t t) { any = any || s.test(t); });
        if (any) r.set(q);
      }
      return r;
    }
    case FKind::AX: {
      Bits s = subset_eval(ts, f->a, env);
      Bits r(n);
      for (uint32_t q = 0; q < n; ++q) {
        bool all = true;
        ts.for_each_successor(q, [&](uint32_t t) { all = all && s.test(t); });
        if (all) r.set(q);
      }
      return r;
    }
    case FKind::Mu:
    case FKind::Nu: {
      REQUIRE(n <= 16);
      Bits acc(n);
      bool is_mu = f->kind == FKind::Mu;
      if (is_mu) acc.set();
      for (uint64_t bitsv = 0; bitsv < (uint64_t(1) << n); ++bitsv) {
        Bits tau(n, bitsv);
        env[f->name] = tau;
        Bits img = subset_eval(ts, f->a, env);
        env.erase(f->name);
        if (img == tau) {
          if (is_mu)
            acc &= tau;
          else
            acc |= tau;
        }
      }
      return acc;
    }
  }
  return Bits(n);
}

TransitionSystem chain2() {
  // s0 -> s1, p holds only at s1.
  TransitionSystem ts;
  ts.num_states = 2;
  ts.observables = {"p"};
  ts.extents = {Bits(2)};
  ts.extents[0].set(1);
  ts.succ_offsets = {0, 1, 1};
  ts.succ_entries = {1};
  ts.marked.resize(2);
  return ts;
}

}  // namespace

TEST_CASE("formula parsing and printing") {
  auto f = parse_formula("nu h. AX(~err & h)");
  CHECK(f->kind == FKind::Nu);
  CHECK(to_string(f) == "nu h1. AX (~err & h1)");
  CHECK(is_closed(f));
  CHECK(is_closed(parse_formula("mu h. h")));
  CHECK(!is_closed(Formula::var("h")));
  CHECK_THROWS_AS(parse_formula("~(p | q)"), FormulaError);
  CHECK_THROWS_AS(parse_formula("mu h. ~h"), FormulaError);
}

TEST_CASE("fixpoints of the identity") {
  auto ts = chain2();
  CHECK(eval(ts, parse_formula("mu h. h")).none());
  Bits all = eval(ts, parse_formula("nu h. h"));
  CHECK(all.count() == 2);
}

TEST_CASE("least fixpoint reachability on a two-state chain") {
  auto ts = chain2();
  Bits r = eval(ts, parse_formula("mu h. p | EX h"));
  CHECK(r.count() == 2);
}

TEST_CASE("dualize is the stated constructor swap and an involution") {
  auto f = parse_formula("nu h. AX(~p & h)");
  auto d = dualize(f);
  CHECK(to_string(d) == "mu h1. EX (p | h1)");
  CHECK(to_string(dualize(d)) == to_string(f));
}

TEST_CASE("classification") {
  CHECK(classify(parse_formula("nu h. AX(~p & h)")).tag() == "dualL4");
  CHECK(classify(parse_formula("mu h. p | EX h")).tag() == "L4");
  auto fr = classify(parse_formula("EX p & EX q"));
  CHECK(fr.l2);
  CHECK(!fr.l4);
  CHECK(classify(parse_formula("AX ~p | AX ~q")).tag() == "dualL2");
  CHECK(classify(parse_formula("mu h. h")).tag() == "L4");
  CHECK(!dual_l2_offender(parse_formula("nu h. AX(~p & h)")));
  auto off = dual_l2_offender(parse_formula("nu h. AX(p & h)"));
  REQUIRE(off.has_value());
  CHECK(off->find("positive observable") != std::string::npos);
}

TEST_CASE("duality partition and lattice-enumeration agreement") {
  testsupport::Rng rng(2024);
  int lattice_checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    auto ts = testsupport::random_ts(rng, 20, 2);
    auto f = testsupport::random_formula(rng, ts.observables, 4);
    REQUIRE(is_closed(f));
    EvalStats st;
    Bits pos = eval(ts, f, {}, &st);
    Bits neg = eval(ts, dualize(f));
    CHECK((pos & neg).none());
    CHECK((pos | neg).count() == ts.num_states);
    CHECK(st.max_iterations <= ts.num_states);
    if (ts.num_states <= 6) {
      auto small_f = testsupport::random_formula(rng, ts.observables, 3);
      std::map<std::string, Bits> env;
      CHECK(eval(ts, small_f) == subset_eval(ts, small_f, env));
      ++lattice_checked;
    }
  }
  CHECK(lattice_checked > 10);
}

TEST_CASE("check distinguishes holds and fails with a trace") {
  auto ts = chain2();
  SUBCASE("trivially true formula") {
    auto r = check(ts, "p", std::nullopt, parse_formula("nu h. h"));
    CHECK(r.holds);
  }
  SUBCASE("safety fails from the p-state's successor set") {
    // From s0, AX ~p fails because its successor satisfies p.
    Bits seeds(2);
    seeds.set(0);
    ts.extents.push_back(Bits(2));
    ts.extents[1].set(0);
    ts.observables.push_back("q");
    auto r = check(ts, "q", std::nullopt, parse_formula("nu h. AX(~p & h)"));
    CHECK(!r.holds);
    REQUIRE(r.counterexample.has_value());
    // Path s0 -> s1 reaching the p-state.
    CHECK(r.counterexample->size() == 2);
    CHECK(r.counterexample->front() == 0);
    CHECK(r.counterexample->back() == 1);
  }
}

TEST_CASE("restriction narrows the seed set") {
  auto ts = chain2();
  Bits restrict_to(2);
  restrict_to.set(0);  // exclude the p-state s1 itself
  auto r = check(ts, "p", restrict_to, parse_formula("nu h. AX ~p"));
  CHECK(r.holds);  // no seeds at all
}
