#include "dimca/oracle.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "dimca/concrete.hpp"

namespace dimca::oracle {

namespace {

using CharSet = std::vector<char>;

CharSet full(const TransitionSystem& ts, bool value) {
  return CharSet(ts.num_states, value ? 1 : 0);
}

bool same(const CharSet& a, const CharSet& b) { return a == b; }

// Straightforward recursive evaluator; fixpoints iterate from the
// bottom/top element until stable.
CharSet nrec(const TransitionSystem& ts, const mu::Formula::Ptr& f,
             std::map<std::string, CharSet>& env) {
  using mu::FKind;
  switch (f->kind) {
    case FKind::Obs: {
      int i = ts.obs_index(f->name);
      if (i < 0) throw mu::FormulaError("unknown observable '" + f->name + "'");
      CharSet r = full(ts, false);
      for (uint32_t q = 0; q < ts.num_states; ++q) r[q] = ts.extents[i].test(q);
      return r;
    }
    case FKind::NegObs: {
      int i = ts.obs_index(f->name);
      if (i < 0) throw mu::FormulaError("unknown observable '" + f->name + "'");
      CharSet r = full(ts, false);
      for (uint32_t q = 0; q < ts.num_states; ++q) r[q] = !ts.extents[i].test(q);
      return r;
    }
    case FKind::Var: return env.at(f->name);
    case FKind::Or: {
      CharSet a = nrec(ts, f->a, env), b = nrec(ts, f->b, env);
      for (size_t i = 0; i < a.size(); ++i) a[i] = a[i] || b[i];
      return a;
    }
    case FKind::And: {
      CharSet a = nrec(ts, f->a, env), b = nrec(ts, f->b, env);
      for (size_t i = 0; i < a.size(); ++i) a[i] = a[i] && b[i];
      return a;
    }
    case FKind::EX: {
      CharSet a = nrec(ts, f->a, env);
      CharSet r = full(ts, false);
      for (uint32_t q = 0; q < ts.num_states; ++q) {
        bool any = false;
        ts.for_each_successor(q, [&](uint32_t t) { any = any || a[t]; });
        r[q] = any;
      }
      return r;
    }
    case FKind::AX: {
      CharSet a = nrec(ts, f->a, env);
      CharSet r = full(ts, true);
      for (uint32_t q = 0; q < ts.num_states; ++q) {
        bool all = true;
        ts.for_each_successor(q, [&](uint32_t t) { all = all && a[t]; });
        r[q] = all;
      }
      return r;
    }
    case FKind::Mu:
    case FKind::Nu: {
      CharSet cur = full(ts, f->kind == FKind::Nu);
      while (true) {
        env[f->name] = cur;
        CharSet next = nrec(ts, f->a, env);
        env.erase(f->name);
        if (same(next, cur)) return cur;
        cur = std::move(next);
      }
    }
  }
  return full(ts, false);
}

}  // namespace

std::vector<char> naive_eval(const TransitionSystem& ts, const mu::Formula::Ptr& f) {
  std::map<std::string, CharSet> env;
  return nrec(ts, f, env);
}

bool brute_check(const lang::Program& p, int asize, int bsize, const std::string& b0,
                 const mu::Formula::Ptr& f, uint64_t max_states) {
  concrete::BuildOptions opt;
  opt.max_states = max_states;
  opt.seed = lang::Expr::conj(p.init, lang::Expr::var(b0));
  TransitionSystem ts = concrete::build_ts(p, {asize, bsize}, opt);
  CharSet sat = naive_eval(ts, f);
  int b = ts.obs_index(b0);
  if (b < 0) throw mu::FormulaError("unknown observable '" + b0 + "'");
  for (uint32_t q = 0; q < ts.num_states; ++q)
    if (ts.marked.test(q) && ts.extents[b].test(q) && !sat[q]) return false;
  return true;
}

namespace {

uint64_t obs_signature(const TransitionSystem& ts, uint32_t s) {
  uint64_t sig = 0;
  for (size_t i = 0; i < ts.observables.size(); ++i) {
    sig = sig * 1099511628211ull;
    sig ^= ts.extents[i].test(s) ? 0x9e3779b9u : 0x85ebca6bu;
  }
  return sig;
}

void check_same_observables(const TransitionSystem& a, const TransitionSystem& b) {
  if (a.observables != b.observables)
    throw std::invalid_argument("compared systems must share their observable list");
}

}  // namespace

SimulationResult check_simulation(const TransitionSystem& ts1, const TransitionSystem& ts2) {
  check_same_observables(ts1, ts2);
  SimulationResult res;
  res.relation.assign(ts1.num_states, Bits(ts2.num_states));

  // Start from observable equality.
  std::vector<uint64_t> sig2(ts2.num_states);
  for (uint32_t t = 0; t < ts2.num_states; ++t) sig2[t] = obs_signature(ts2, t);
  for (uint32_t s = 0; s < ts1.num_states; ++s) {
    uint64_t sig = obs_signature(ts1, s);
    for (uint32_t t = 0; t < ts2.num_states; ++t)
      if (sig2[t] == sig) res.relation[s].set(t);
  }

  // Refine: (s, t) survives when every successor of s is matched by a
  // successor of t.
  bool changed = true;
  while (changed) {
    changed = false;
    for (uint32_t s = 0; s < ts1.num_states; ++s) {
      for (size_t t = res.relation[s].find_first(); t != Bits::npos;
           t = res.relation[s].find_next(t)) {
        bool ok = true;
        ts1.for_each_successor(s, [&](uint32_t s2) {
          if (!ok) return;
          bool matched = false;
          ts2.for_each_successor(uint32_t(t), [&](uint32_t t2) {
            matched = matched || res.relation[s2].test(t2);
          });
          if (!matched) ok = false;
        });
        if (!ok) {
          res.relation[s].reset(t);
          changed = true;
        }
      }
    }
  }

  res.total = true;
  for (uint32_t s = 0; s < ts1.num_states; ++s)
    if (res.relation[s].none()) {
      res.total = false;
      res.unmatched.push_back(s);
    }
  return res;
}

BisimulationResult check_bisimulation(const TransitionSystem& ts1,
                                      const TransitionSystem& ts2) {
  check_same_observables(ts1, ts2);
  uint64_t n1 = ts1.num_states, n = n1 + ts2.num_states;
  BisimulationResult res;

  // Blocks on the disjoint union, refined by successor-block signatures.
  std::vector<uint32_t> block(n);
  {
    std::map<uint64_t, uint32_t> by_obs;
    for (uint64_t q = 0; q < n; ++q) {
      uint64_t sig = q < n1 ? obs_signature(ts1, uint32_t(q))
                            : obs_signature(ts2, uint32_t(q - n1));
      auto [it, fresh] = by_obs.emplace(sig, uint32_t(by_obs.size()));
      (void)fresh;
      block[q] = it->second;
    }
  }

  while (true) {
    std::map<std::pair<uint32_t, std::vector<uint32_t>>, uint32_t> classes;
    std::vector<uint32_t> next(n);
    for (uint64_t q = 0; q < n; ++q) {
      std::vector<uint32_t> succ_blocks;
      auto collect = [&](uint32_t t, bool right) {
        succ_blocks.push_back(block[right ? n1 + t : t]);
      };
      if (q < n1)
        ts1.for_each_successor(uint32_t(q), [&](uint32_t t) { collect(t, false); });
      else
        ts2.for_each_successor(uint32_t(q - n1), [&](uint32_t t) { collect(t, true); });
      std::sort(succ_blocks.begin(), succ_blocks.end());
      succ_blocks.erase(std::unique(succ_blocks.begin(), succ_blocks.end()),
                        succ_blocks.end());
      auto key = std::make_pair(block[q], std::move(succ_blocks));
      auto [it, fresh] = classes.emplace(std::move(key), uint32_t(classes.size()));
      (void)fresh;
      next[q] = it->second;
    }
    if (next == block) break;
    block = std::move(next);
  }

  res.block1.assign(block.begin(), block.begin() + n1);
  res.block2.assign(block.begin() + n1, block.end());
  std::set<uint32_t> left(res.block1.begin(), res.block1.end());
  std::set<uint32_t> right(res.block2.begin(), res.block2.end());
  res.total = true;
  for (uint32_t s = 0; s < n1; ++s)
    if (!right.count(res.block1[s])) {
      res.total = false;
      res.unmatched1.push_back(s);
    }
  for (uint32_t t = 0; t + n1 < n; ++t)
    if (!left.count(res.block2[t])) {
      res.total = false;
      res.unmatched2.push_back(t);
    }
  return res;
}

bool trace_member(const TransitionSystem& ts, const std::vector<std::string>& trace) {
  std::vector<ObsStep> steps;
  for (const auto& p : trace) steps.push_back({{p}, false});
  return trace_member(ts, steps);
}

bool trace_member(const TransitionSystem& ts, const std::vector<ObsStep>& steps) {
  if (steps.empty()) return true;
  auto step_set = [&](const ObsStep& st) {
    Bits r(ts.num_states);
    r.set();
    Bits named(ts.observables.size());
    for (const auto& p : st.require_true) {
      int i = ts.obs_index(p);
      if (i < 0) throw std::invalid_argument("unknown observable '" + p + "'");
      named.set(i);
      r &= ts.extents[i];
    }
    if (st.exact)
      for (size_t i = 0; i < ts.observables.size(); ++i)
        if (!named.test(i)) r &= ~ts.extents[i];
    return r;
  };

  Bits cur = step_set(steps[0]);
  for (size_t k = 1; k < steps.size(); ++k) {
    if (cur.none()) return false;
    Bits want = step_set(steps[k]);
    Bits next(ts.num_states);
    for (uint32_t q = 0; q < ts.num_states; ++q) {
      if (!cur.test(q)) continue;
      ts.for_each_successor(q, [&](uint32_t t) {
        if (want.test(t)) next.set(t);
      });
    }
    cur = std::move(next);
  }
  return cur.any();
}

}  // namespace dimca::oracle
