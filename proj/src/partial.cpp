#include "dimca/partial.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "dimca/compiled.hpp"
#include "dimca/flatmap.hpp"
#include "dimca/rgs.hpp"

namespace dimca::partial {

namespace {

struct RawView {
  const RawPartialState& s;
  int bval(int i) const { return s.bools[i]; }
  int eqx(int i, int j) const { return s.xvals[i] == s.xvals[j]; }
  int eqy(int i, int j) const { return s.yvals[i] == s.yvals[j]; }
};

int max_id(const RawPartialState& s) {
  int m = -1;
  for (int v : s.xvals) m = std::max(m, v);
  for (int v : s.yvals) m = std::max(m, v);
  for (const auto& a : s.arrays)
    for (auto [k, v] : a) m = std::max(m, std::max(k, v));
  return m;
}

void prune(RawPartialState& s) {
  std::set<int> held(s.xvals.begin(), s.xvals.end());
  for (auto& a : s.arrays)
    for (auto it = a.begin(); it != a.end();)
      it = held.count(it->first) ? std::next(it) : a.erase(it);
}

// One multiple assignment under the partial-functions transition
// relation, pruned afterwards. Fresh ids start above every id in use.
void apply_cmd(const CCmd& c, const RawPartialState& s, std::vector<RawPartialState>& out) {
  RawPartialState base = s;
  for (const auto& ba : c.bool_assigns) base.bools[ba.target] = ceval(ba.value, RawView{s});
  for (const auto& da : c.data_assigns) {
    switch (da.kind) {
      case CDataAssign::Copy:
        (da.x_typed ? base.xvals : base.yvals)[da.target] =
            (da.x_typed ? s.xvals : s.yvals)[da.src];
        break;
      case CDataAssign::Read: {
        auto it = s.arrays[da.array].find(s.xvals[da.index]);
        if (it == s.arrays[da.array].end())
          throw std::logic_error("array undefined at a held index");
        base.yvals[da.target] = it->second;
        break;
      }
      case CDataAssign::Input: break;
    }
  }
  for (const auto& w : c.writes) base.arrays[w.array][s.xvals[w.index]] = s.yvals[w.value];

  int fresh0 = max_id(s) + 1;
  size_t dx = c.x_dice.size();

  // Candidates for an X die: every held value plus one fresh value per die.
  std::vector<int> xcand(s.xvals.begin(), s.xvals.end());
  std::sort(xcand.begin(), xcand.end());
  xcand.erase(std::unique(xcand.begin(), xcand.end()), xcand.end());
  size_t xheld = xcand.size();
  for (size_t i = 0; i < dx; ++i) xcand.push_back(fresh0 + int(i));
  int yfresh0 = fresh0 + int(dx);

  // Y value pool: every value in view (variables and defined cells).
  std::vector<int> ypool(s.yvals.begin(), s.yvals.end());
  for (const auto& a : s.arrays)
    for (auto [k, v] : a) ypool.push_back(v);
  std::sort(ypool.begin(), ypool.end());
  ypool.erase(std::unique(ypool.begin(), ypool.end()), ypool.end());

  std::vector<size_t> xpick(dx, 0);
  while (true) {
    RawPartialState t = base;
    for (size_t i = 0; i < dx; ++i) t.xvals[c.x_dice[i]] = xcand[xpick[i]];

    // Unknown slots: Y dice, then cells at newly seen indices.
    std::vector<int*> unknowns;
    for (int target : c.y_dice) unknowns.push_back(&t.yvals[target]);
    std::set<int> held(t.xvals.begin(), t.xvals.end());
    for (auto& a : t.arrays)
      for (int v : held)
        if (!a.count(v)) unknowns.push_back(&a[v]);

    std::vector<int> ycand = ypool;
    for (size_t i = 0; i < unknowns.size(); ++i) ycand.push_back(yfresh0 + int(i));

    if (unknowns.empty()) {
      prune(t);
      out.push_back(std::move(t));
    } else {
      std::vector<size_t> ypick(unknowns.size(), 0);
      while (true) {
        for (size_t i = 0; i < unknowns.size(); ++i) *unknowns[i] = ycand[ypick[i]];
        RawPartialState u = t;
        prune(u);
        out.push_back(std::move(u));
        size_t k = 0;
        for (; k < ypick.size(); ++k) {
          if (++ypick[k] < ycand.size()) break;
          ypick[k] = 0;
        }
        if (k == ypick.size()) break;
      }
    }

    size_t k = 0;
    for (; k < xpick.size(); ++k) {
      size_t lim = k < dx ? xheld + dx : 0;
      if (++xpick[k] < lim) break;
      xpick[k] = 0;
    }
    if (k == xpick.size()) break;
  }
}

std::vector<RawPartialState> apply_guarded(const CGuarded& g, const RawPartialState& s) {
  std::vector<RawPartialState> cur;
  apply_cmd(g.base, s, cur);
  for (const auto& seg : g.segs) {
    std::vector<RawPartialState> next;
    for (auto& t : cur) {
      if (ceval(seg.guard, RawView{t}))
        apply_cmd(seg.cmd, t, next);
      else
        next.push_back(std::move(t));
    }
    cur = std::move(next);
  }
  return cur;
}

CGuarded compile_one(const lang::Program& p, const lang::GuardedCommand& gc) {
  lang::Program one = p;
  one.commands = {gc};
  return compile(one).commands[0];
}

}  // namespace

bool PartialState::operator<(const PartialState& o) const {
  if (bools != o.bools) return bools < o.bools;
  if (xvals != o.xvals) return xvals < o.xvals;
  if (yvals != o.yvals) return yvals < o.yvals;
  return arrays < o.arrays;
}

RawPartialState to_raw(const PartialState& s) {
  RawPartialState r;
  r.bools = s.bools;
  r.xvals = s.xvals;
  // Separate the y id space from the x id space so fresh-id generation
  // and canonical renaming cannot conflate them.
  int shift = 0;
  for (int v : s.xvals) shift = std::max(shift, v + 1);
  r.yvals = s.yvals;
  for (int& v : r.yvals) v += shift;
  r.arrays.resize(s.arrays.size());
  for (size_t a = 0; a < s.arrays.size(); ++a)
    for (size_t x = 0; x < s.arrays[a].size(); ++x)
      r.arrays[a][int(x)] = s.arrays[a][x] + shift;
  return r;
}

PartialState canonicalize(const RawPartialState& s0) {
  RawPartialState s = s0;
  prune(s);
  PartialState out;
  out.bools = s.bools;

  std::map<int, int> xmap;
  out.xvals.reserve(s.xvals.size());
  for (int v : s.xvals) {
    auto [it, fresh] = xmap.emplace(v, int(xmap.size()));
    out.xvals.push_back(it->second);
    (void)fresh;
  }
  int kx = int(xmap.size());

  std::map<int, int> ymap;
  auto yid = [&](int v) {
    auto [it, fresh] = ymap.emplace(v, int(ymap.size()));
    (void)fresh;
    return it->second;
  };
  for (int v : s.yvals) out.yvals.push_back(yid(v));
  // Cells scan in array declaration order and canonical index order,
  // which fixes the first-occurrence order of cell values.
  std::vector<int> inv(kx, 0);
  for (auto [old_id, new_id] : xmap) inv[new_id] = old_id;
  out.arrays.assign(s.arrays.size(), std::vector<int>(kx, -1));
  for (size_t a = 0; a < s.arrays.size(); ++a) {
    for (int v = 0; v < kx; ++v) {
      auto it = s.arrays[a].find(inv[v]);
      if (it == s.arrays[a].end())
        throw std::logic_error("array undefined at a held index");
      out.arrays[a][v] = yid(it->second);
    }
  }
  return out;
}

std::vector<PartialState> step_partial(const lang::Program& p, const PartialState& s,
                                       const lang::GuardedCommand& gc) {
  RawPartialState raw = to_raw(s);
  std::vector<PartialState> out;
  for (const auto& r : step_partial_raw(p, raw, gc)) out.push_back(canonicalize(r));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<RawPartialState> step_partial_raw(const lang::Program& p,
                                              const RawPartialState& s,
                                              const lang::GuardedCommand& gc) {
  CGuarded g = compile_one(p, gc);
  if (!ceval(g.guard, RawView{s}))
    throw std::invalid_argument("step_partial requires the guard to hold");
  return apply_guarded(g, s);
}

std::vector<PartialState> successors(const lang::Program& p, const PartialState& s) {
  CProgram cp = compile(p);
  RawPartialState raw = to_raw(s);
  std::vector<PartialState> out;
  for (const auto& g : cp.commands) {
    if (!ceval(g.guard, RawView{raw})) continue;
    for (const auto& r : apply_guarded(g, raw)) out.push_back(canonicalize(r));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool eval_bool(const lang::Program& p, const RawPartialState& s, const lang::Expr::Ptr& e) {
  lang::SymbolTable sym(p);
  CExpr ce = compile_expr(e, sym);
  return ceval(ce, RawView{s});
}

namespace {

// Canonical states pack into small vectors; keep a sorted map from the
// flattened byte form for interning.
std::vector<int> flatten(const PartialState& s) {
  std::vector<int> v;
  v.reserve(s.bools.size() + s.xvals.size() + s.yvals.size() + 8);
  for (char b : s.bools) v.push_back(b);
  v.insert(v.end(), s.xvals.begin(), s.xvals.end());
  v.push_back(-7);
  v.insert(v.end(), s.yvals.begin(), s.yvals.end());
  for (const auto& a : s.arrays) {
    v.push_back(-9);
    v.insert(v.end(), a.begin(), a.end());
  }
  return v;
}

}  // namespace

TransitionSystem build_partial_ts(const lang::Program& p, const BuildOptions& opt) {
  CProgram cp = compile(p);
  std::map<std::vector<int>, uint32_t> visited;
  std::vector<PartialState> states;
  std::vector<char> seedflag;

  auto intern = [&](const PartialState& s, bool is_seed) {
    auto [it, fresh] = visited.emplace(flatten(s), uint32_t(states.size()));
    if (fresh) {
      states.push_back(s);
      seedflag.push_back(is_seed);
      if (states.size() > opt.max_states)
        throw ResourceLimitError("partial state cap exceeded (" +
                                 std::to_string(opt.max_states) + ")");
    } else if (is_seed) {
      seedflag[it->second] = 1;
    }
    return it->second;
  };

  lang::SymbolTable sym(p);
  CExpr seed = compile_expr(opt.seed ? opt.seed : p.init, sym);

  // Enumerate canonical states satisfying the seed constraint (or all of
  // them): boolean valuations are pruned against the constraint once the
  // equality pattern is fixed.
  int nx = cp.nx, ny = cp.ny, na = cp.na;
  for_each_rgs(nx, [&](const std::vector<int>& xr) {
    int kx = nx == 0 ? 0 : *std::max_element(xr.begin(), xr.end()) + 1;
    int yslots = ny + na * kx;
    for_each_rgs(yslots, [&](const std::vector<int>& yr) {
      PartialState s;
      s.xvals = xr;
      s.yvals.assign(yr.begin(), yr.begin() + ny);
      s.arrays.assign(na, std::vector<int>(kx));
      for (int a = 0; a < na; ++a)
        for (int v = 0; v < kx; ++v) s.arrays[a][v] = yr[ny + a * kx + v];
      // The slot order used here is not always first-occurrence order
      // (cells scan in x-id order), so re-canonicalize to dedupe.
      s.bools.assign(cp.nb, 0);
      PartialState canon = canonicalize(to_raw(s));
      if (canon.xvals != s.xvals || canon.yvals != s.yvals || canon.arrays != s.arrays)
        return;  // not a canonical representative; skip duplicate

      struct PatView {
        const PartialState& s;
        int upto;
        int bval(int i) const { return i < upto ? s.bools[i] : -1; }
        int eqx(int i, int j) const { return s.xvals[i] == s.xvals[j]; }
        int eqy(int i, int j) const { return s.yvals[i] == s.yvals[j]; }
      };
      auto rec = [&](auto&& self, int i) -> void {
        int r = eval3(seed, seed.root, PatView{s, i});
        if (!opt.all_states && r == 0) return;
        if (i == cp.nb) {
          intern(s, r == 1);
          return;
        }
        for (int v = 0; v < 2; ++v) {
          s.bools[i] = char(v);
          self(self, i + 1);
        }
        s.bools[i] = 0;
      };
      rec(rec, 0);
    });
  });

  TransitionSystem ts;
  ts.succ_offsets.push_back(0);
  std::vector<uint32_t> local;
  for (uint32_t idx = 0; idx < states.size(); ++idx) {
    PartialState s = states[idx];
    RawPartialState raw = to_raw(s);
    local.clear();
    for (const auto& g : cp.commands) {
      if (!ceval(g.guard, RawView{raw})) continue;
      for (const auto& r : apply_guarded(g, raw)) local.push_back(intern(canonicalize(r), false));
    }
    std::sort(local.begin(), local.end());
    local.erase(std::unique(local.begin(), local.end()), local.end());
    ts.succ_entries.insert(ts.succ_entries.end(), local.begin(), local.end());
    ts.succ_offsets.push_back(uint32_t(ts.succ_entries.size()));
  }

  ts.num_states = uint32_t(states.size());
  ts.observables = p.booleans;
  ts.extents.assign(p.booleans.size(), Bits(ts.num_states));
  ts.marked.resize(ts.num_states);
  for (uint32_t i = 0; i < ts.num_states; ++i) {
    for (int b = 0; b < cp.nb; ++b)
      if (states[i].bools[b]) ts.extents[b].set(i);
    if (seedflag[i]) ts.marked.set(i);
  }
  auto shared = std::make_shared<std::vector<PartialState>>(std::move(states));
  ts.namer = [shared, booleans = p.booleans, xvars = p.xvars, yvars = p.yvars,
              arrays = p.arrays](uint32_t i) {
    const PartialState& s = (*shared)[i];
    std::string out;
    for (size_t b = 0; b < booleans.size(); ++b)
      if (s.bools[b]) out += booleans[b] + " ";
    for (size_t x = 0; x < xvars.size(); ++x)
      out += xvars[x] + "=" + std::to_string(s.xvals[x]) + " ";
    for (size_t y = 0; y < yvars.size(); ++y)
      out += yvars[y] + "=" + std::to_string(s.yvals[y]) + " ";
    for (size_t a = 0; a < arrays.size(); ++a) {
      out += arrays[a] + "=[";
      for (size_t j = 0; j < s.arrays[a].size(); ++j)
        out += (j ? "," : "") + std::to_string(s.arrays[a][j]);
      out += "] ";
    }
    if (!out.empty()) out.pop_back();
    return out;
  };
  return ts;
}

}  // namespace dimca::partial
