#include "dimca/paramcheck.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <set>
#include <sstream>

#include "dimca/abstraction.hpp"
#include "dimca/quotient.hpp"

namespace dimca::paramcheck {

using lang::Expr;
using lang::Program;

std::string to_string(Mode m) {
  switch (m) {
    case Mode::Infinite: return "infinite";
    case Mode::Parameterised: return "parameterised";
    case Mode::Finite: return "finite";
  }
  return "?";
}

std::string to_string(Answer a) {
  switch (a) {
    case Answer::Holds: return "holds";
    case Answer::Fails: return "fails";
    case Answer::HoldsForAllFinite: return "holds-for-all-finite";
    case Answer::Unknown: return "unknown-possible-false-negative";
  }
  return "?";
}

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
      .count();
}

void require_valid(const Program& p) {
  auto diags = lang::validate(p);
  if (!diags.empty()) {
    std::ostringstream os;
    os << "program is not well-formed:";
    for (const auto& d : diags) os << " " << d.message << ";";
    throw std::invalid_argument(os.str());
  }
}

void require_formula(const Program& p, const mu::Formula::Ptr& f) {
  if (!mu::is_closed(f)) throw mu::FormulaError("checking requires a closed formula");
  std::set<std::string> bools(p.booleans.begin(), p.booleans.end());
  for (const auto& o : mu::observables_of(f))
    if (!bools.count(o))
      throw mu::FormulaError("formula observable '" + o + "' is not a program boolean");
}

std::vector<TraceStep> to_trace(const TransitionSystem& ts, const std::vector<uint32_t>& path) {
  std::vector<TraceStep> out;
  for (uint32_t s : path) out.push_back({ts.true_observables(s)});
  return out;
}

struct InfiniteRun {
  Verdict verdict;
  TransitionSystem ts;
  std::vector<uint32_t> ce_states;
  std::function<quotient::CanonicalState(uint32_t)> decode;
  Program translated;
};

InfiniteRun run_infinite(const Program& p, const std::string& b0, const mu::Formula::Ptr& f,
                         const Options& opt) {
  auto t0 = std::chrono::steady_clock::now();
  require_valid(p);
  require_formula(p, f);

  InfiniteRun run;
  run.translated = abstraction::translate_program(p);
  Expr::Ptr constraint = Expr::conj(abstraction::sigma(p), run.translated.init);
  quotient::BuildOptions qopt;
  qopt.max_states = opt.max_states;
  run.ts = quotient::build_quotient_ts(run.translated, constraint, qopt, &run.decode);

  mu::CheckResult res = mu::check(run.ts, b0, run.ts.marked, f);

  Verdict v;
  v.mode = Mode::Infinite;
  v.answer = res.holds ? Answer::Holds : Answer::Fails;
  v.fragment = mu::classify(f).tag();
  v.formula = mu::to_string(f);
  v.stats.states = run.ts.num_states;
  v.stats.edges = run.ts.num_states < (1u << 22) ? run.ts.edge_count() : 0;
  v.stats.max_fixpoint_iterations = res.stats.max_iterations;
  if (!res.holds && res.counterexample) {
    run.ce_states = *res.counterexample;
    v.counterexample = to_trace(run.ts, run.ce_states);
  } else if (!res.holds && res.violating_seed) {
    v.diagnostic_trace = to_trace(run.ts, {*res.violating_seed});
  }
  v.stats.wall_ms = ms_since(t0);
  run.verdict = std::move(v);
  return run;
}

// A canonical quotient state of the translated program corresponds to a
// pruned partial state of the original: cell variables become the array
// entries at the block their index variable holds.
partial::RawPartialState to_partial(const Program& p, const quotient::CanonicalState& cs) {
  partial::RawPartialState r;
  r.bools.assign(cs.bools.begin(), cs.bools.end());
  r.xvals = cs.xpat;
  size_t ny = p.yvars.size();
  r.yvals.assign(cs.ypat.begin(), cs.ypat.begin() + ny);
  r.arrays.resize(p.arrays.size());
  size_t nx = p.xvars.size();
  for (size_t a = 0; a < p.arrays.size(); ++a) {
    for (size_t x = 0; x < nx; ++x) {
      int idx = cs.xpat[x];
      int val = cs.ypat[ny + a * nx + x];
      auto [it, fresh] = r.arrays[a].emplace(idx, val);
      if (!fresh && it->second != val)
        throw std::logic_error("counterexample state violates array consistency");
    }
  }
  return r;
}

std::vector<partial::RawPartialState> replay_partial(const Program& p,
                                                     const InfiniteRun& run) {
  std::vector<partial::RawPartialState> exec;
  exec.push_back(to_partial(p, run.decode(run.ce_states[0])));
  for (size_t i = 1; i < run.ce_states.size(); ++i) {
    partial::PartialState want =
        partial::canonicalize(to_partial(p, run.decode(run.ce_states[i])));
    const partial::RawPartialState& cur = exec.back();
    bool found = false;
    for (const auto& gc : p.commands) {
      if (!partial::eval_bool(p, cur, gc.guard)) continue;
      for (const auto& t : partial::step_partial_raw(p, cur, gc)) {
        if (partial::canonicalize(t) == want) {
          exec.push_back(t);
          found = true;
          break;
        }
      }
      if (found) break;
    }
    if (!found) throw std::logic_error("counterexample does not replay in partial semantics");
  }
  return exec;
}

}  // namespace

WitnessInstance witness_instance(const Program& p,
                                 const std::vector<partial::RawPartialState>& exec) {
  if (exec.empty()) throw std::invalid_argument("empty execution");
  // Carriers: the values occurring anywhere in the execution, renamed to
  // initial segments of the naturals (non-empty).
  std::map<int, int> amap, bmap;
  auto aid = [&](int v) { return amap.emplace(v, int(amap.size())).first->second; };
  auto bid = [&](int v) { return bmap.emplace(v, int(bmap.size())).first->second; };
  for (const auto& s : exec) {
    for (int v : s.xvals) aid(v);
    for (int v : s.yvals) bid(v);
    for (const auto& a : s.arrays)
      for (auto [k, v] : a) {
        aid(k);
        bid(v);
      }
  }
  WitnessInstance w;
  w.asize = std::max<int>(1, int(amap.size()));
  w.bsize = std::max<int>(1, int(bmap.size()));

  size_t l = exec.size();
  std::vector<concrete::ConcreteState> run(l);
  for (size_t i = l; i-- > 0;) {
    const auto& t = exec[i];
    concrete::ConcreteState& s = run[i];
    s.bools = t.bools;
    for (int v : t.xvals) s.xvals.push_back(amap.at(v));
    for (int v : t.yvals) s.yvals.push_back(bmap.at(v));
    s.arrays.assign(p.arrays.size(), std::vector<int>(w.asize, 0));
    for (size_t a = 0; a < p.arrays.size(); ++a) {
      for (int cell = 0; cell < w.asize; ++cell) {
        // Defined entries win; free cells copy the successor state
        // backwards and default to 0 at the end of the run.
        s.arrays[a][cell] = i + 1 < l ? run[i + 1].arrays[a][cell] : 0;
      }
      for (auto [k, v] : t.arrays[a]) s.arrays[a][amap.at(k)] = bmap.at(v);
    }
  }

  // The completed run must replay under the concrete semantics.
  for (size_t i = 0; i + 1 < l; ++i) {
    auto succ = concrete::successors(p, run[i], {w.asize, w.bsize});
    if (std::find(succ.begin(), succ.end(), run[i + 1]) == succ.end())
      throw std::logic_error("witness instantiation does not replay concretely");
  }
  for (size_t i = 0; i < l; ++i) {
    TraceStep step;
    for (size_t b = 0; b < p.booleans.size(); ++b)
      if (run[i].bools[b]) step.observables_true.push_back(p.booleans[b]);
    w.trace.push_back(std::move(step));
  }
  w.run = std::move(run);
  return w;
}

Verdict check_infinite(const Program& p, const std::string& b0, const mu::Formula::Ptr& f,
                       const Options& opt) {
  return run_infinite(p, b0, f, opt).verdict;
}

Verdict check_parameterised(const Program& p, const std::string& b0,
                            const mu::Formula::Ptr& f, const Options& opt) {
  auto t0 = std::chrono::steady_clock::now();
  mu::Fragment fr = mu::classify(f);
  if (!fr.dual_l2) {
    auto off = mu::dual_l2_offender(f);
    throw FragmentError("parameterised checking needs the universal fragment (dual L2); " +
                        mu::to_string(f) + " uses " + off.value_or("a non-universal operator"));
  }
  InfiniteRun run = run_infinite(p, b0, f, opt);
  Verdict v = run.verdict;
  v.mode = Mode::Parameterised;
  if (v.answer == Answer::Holds) {
    v.answer = Answer::HoldsForAllFinite;
  } else if (fr.dual_l4) {
    v.answer = Answer::Fails;
    auto exec = replay_partial(p, run);
    WitnessInstance w = witness_instance(p, exec);
    v.witness_sizes = {w.asize, w.bsize};
    v.counterexample = w.trace;
  } else {
    // One-directional transfer: a failure over the infinite semantics
    // may not occur in any finite instance.
    v.answer = Answer::Unknown;
    v.counterexample.reset();
  }
  v.stats.wall_ms = ms_since(t0);
  return v;
}

Verdict check_finite(const Program& p, int asize, int bsize, const std::string& b0,
                     const mu::Formula::Ptr& f, const Options& opt) {
  auto t0 = std::chrono::steady_clock::now();
  require_valid(p);
  require_formula(p, f);
  concrete::BuildOptions copt;
  copt.max_states = opt.max_states;
  copt.seed = Expr::conj(p.init, Expr::var(b0));
  TransitionSystem ts = concrete::build_ts(p, {asize, bsize}, copt);
  mu::CheckResult res = mu::check(ts, b0, ts.marked, f);
  Verdict v;
  v.mode = Mode::Finite;
  v.answer = res.holds ? Answer::Holds : Answer::Fails;
  v.fragment = mu::classify(f).tag();
  v.formula = mu::to_string(f);
  v.checked_sizes = {asize, bsize};
  v.stats.states = ts.num_states;
  v.stats.edges = ts.edge_count();
  v.stats.max_fixpoint_iterations = res.stats.max_iterations;
  if (!res.holds && res.counterexample) v.counterexample = to_trace(ts, *res.counterexample);
  if (!res.holds && !res.counterexample && res.violating_seed)
    v.diagnostic_trace = to_trace(ts, {*res.violating_seed});
  v.stats.wall_ms = ms_since(t0);
  return v;
}

}  // namespace dimca::paramcheck
