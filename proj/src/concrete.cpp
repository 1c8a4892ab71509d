#include "dimca/concrete.hpp"

#include <algorithm>
#include <bit>

#include "dimca/compiled.hpp"
#include "dimca/flatmap.hpp"

namespace dimca::concrete {

namespace {

struct StateView {
  const ConcreteState& s;
  int bval(int i) const { return s.bools[i]; }
  int eqx(int i, int j) const { return s.xvals[i] == s.xvals[j]; }
  int eqy(int i, int j) const { return s.yvals[i] == s.yvals[j]; }
};

// One multiple assignment; dice fan out over the full carrier.
void apply_cmd(const CCmd& c, const ConcreteState& s, Sizes sz,
               std::vector<ConcreteState>& out) {
  ConcreteState base = s;
  for (const auto& ba : c.bool_assigns) base.bools[ba.target] = ceval(ba.value, StateView{s});
  for (const auto& da : c.data_assigns) {
    switch (da.kind) {
      case CDataAssign::Copy:
        (da.x_typed ? base.xvals : base.yvals)[da.target] =
            (da.x_typed ? s.xvals : s.yvals)[da.src];
        break;
      case CDataAssign::Read:
        base.yvals[da.target] = s.arrays[da.array][s.xvals[da.index]];
        break;
      case CDataAssign::Input: break;
    }
  }
  for (const auto& w : c.writes) base.arrays[w.array][s.xvals[w.index]] = s.yvals[w.value];

  size_t dx = c.x_dice.size(), dy = c.y_dice.size();
  if (dx == 0 && dy == 0) {
    out.push_back(std::move(base));
    return;
  }
  std::vector<int> pick(dx + dy, 0);
  while (true) {
    ConcreteState t = base;
    for (size_t i = 0; i < dx; ++i) t.xvals[c.x_dice[i]] = pick[i];
    for (size_t i = 0; i < dy; ++i) t.yvals[c.y_dice[i]] = pick[dx + i];
    out.push_back(std::move(t));
    size_t k = 0;
    for (; k < pick.size(); ++k) {
      int lim = k < dx ? sz.a : sz.b;
      if (++pick[k] < lim) break;
      pick[k] = 0;
    }
    if (k == pick.size()) break;
  }
}

std::vector<ConcreteState> apply_guarded(const CGuarded& g, const ConcreteState& s, Sizes sz) {
  std::vector<ConcreteState> cur;
  apply_cmd(g.base, s, sz, cur);
  for (const auto& seg : g.segs) {
    std::vector<ConcreteState> next;
    for (auto& t : cur) {
      if (ceval(seg.guard, StateView{t}))
        apply_cmd(seg.cmd, t, sz, next);
      else
        next.push_back(std::move(t));
    }
    cur = std::move(next);
  }
  std::sort(cur.begin(), cur.end());
  cur.erase(std::unique(cur.begin(), cur.end()), cur.end());
  return cur;
}

// Bit widths for packing a state into 63 bits.
struct PackLayout {
  int nb, nx, ny, na, asize;
  int xw, yw;
  int total;

  PackLayout(const CProgram& cp, Sizes sz) {
    nb = cp.nb;
    nx = cp.nx;
    ny = cp.ny;
    na = cp.na;
    asize = sz.a;
    xw = width(sz.a);
    yw = width(sz.b);
    total = nb + nx * xw + (ny + na * sz.a) * yw;
  }

  static int width(int n) { return n <= 1 ? 0 : std::bit_width(unsigned(n - 1)); }

  uint64_t pack(const ConcreteState& s) const {
    uint64_t v = 0;
    int off = 0;
    for (int i = 0; i < nb; ++i, ++off) v |= uint64_t(s.bools[i]) << off;
    for (int i = 0; i < nx; ++i, off += xw) v |= uint64_t(s.xvals[i]) << off;
    for (int i = 0; i < ny; ++i, off += yw) v |= uint64_t(s.yvals[i]) << off;
    for (int a = 0; a < na; ++a)
      for (int j = 0; j < asize; ++j, off += yw) v |= uint64_t(s.arrays[a][j]) << off;
    return v;
  }

  ConcreteState unpack(uint64_t v) const {
    ConcreteState s;
    s.bools.resize(nb);
    s.xvals.resize(nx);
    s.yvals.resize(ny);
    s.arrays.assign(na, std::vector<int>(asize));
    int off = 0;
    for (int i = 0; i < nb; ++i, ++off) s.bools[i] = (v >> off) & 1;
    auto take = [&](int w) {
      if (w == 0) return 0;
      int r = int((v >> off) & ((uint64_t(1) << w) - 1));
      off += w;
      return r;
    };
    for (int i = 0; i < nx; ++i) s.xvals[i] = take(xw);
    for (int i = 0; i < ny; ++i) s.yvals[i] = take(yw);
    for (int a = 0; a < na; ++a)
      for (int j = 0; j < asize; ++j) s.arrays[a][j] = take(yw);
    return s;
  }
};

// Full product over data values and array cells; the boolean part is
// pruned against the (data-resolved) constraint.
template <class Emit>
void enumerate_states(const CProgram& cp, Sizes sz, const CExpr& pred, const Emit& emit) {
  ConcreteState s;
  s.bools.assign(cp.nb, 0);
  s.xvals.assign(cp.nx, 0);
  s.yvals.assign(cp.ny, 0);
  s.arrays.assign(cp.na, std::vector<int>(sz.a, 0));

  struct PartialView {
    const ConcreteState& s;
    int upto;
    int bval(int i) const { return i < upto ? s.bools[i] : -1; }
    int eqx(int i, int j) const { return s.xvals[i] == s.xvals[j]; }
    int eqy(int i, int j) const { return s.yvals[i] == s.yvals[j]; }
  };

  auto bool_rec = [&](auto&& self, int i) -> void {
    int r = eval3(pred, pred.root, PartialView{s, i});
    if (r == 0) return;
    if (i == cp.nb) {
      emit(s);
      return;
    }
    for (int v = 0; v < 2; ++v) {
      s.bools[i] = char(v);
      self(self, i + 1);
    }
    s.bools[i] = 0;
  };

  std::vector<int*> slots;
  std::vector<int> lims;
  for (int i = 0; i < cp.nx; ++i) {
    slots.push_back(&s.xvals[i]);
    lims.push_back(sz.a);
  }
  for (int i = 0; i < cp.ny; ++i) {
    slots.push_back(&s.yvals[i]);
    lims.push_back(sz.b);
  }
  for (int a = 0; a < cp.na; ++a)
    for (int j = 0; j < sz.a; ++j) {
      slots.push_back(&s.arrays[a][j]);
      lims.push_back(sz.b);
    }
  while (true) {
    bool_rec(bool_rec, 0);
    size_t k = 0;
    for (; k < slots.size(); ++k) {
      if (++*slots[k] < lims[k]) break;
      *slots[k] = 0;
    }
    if (k == slots.size()) break;
  }
}

}  // namespace

bool ConcreteState::operator<(const ConcreteState& o) const {
  if (bools != o.bools) return bools < o.bools;
  if (xvals != o.xvals) return xvals < o.xvals;
  if (yvals != o.yvals) return yvals < o.yvals;
  return arrays < o.arrays;
}

bool eval_bool(const lang::Program& p, const ConcreteState& s, const lang::Expr::Ptr& e) {
  lang::SymbolTable sym(p);
  CExpr ce = compile_expr(e, sym);
  return ceval(ce, StateView{s});
}

std::vector<ConcreteState> step_command(const lang::Program& p, const ConcreteState& s,
                                        const lang::GuardedCommand& gc, Sizes sizes) {
  lang::Program one = p;
  one.commands = {gc};
  CProgram cp = compile(one);
  return apply_guarded(cp.commands[0], s, sizes);
}

std::vector<ConcreteState> successors(const lang::Program& p, const ConcreteState& s,
                                      Sizes sizes) {
  CProgram cp = compile(p);
  std::vector<ConcreteState> out;
  for (const auto& g : cp.commands) {
    if (!ceval(g.guard, StateView{s})) continue;
    auto succ = apply_guarded(g, s, sizes);
    out.insert(out.end(), succ.begin(), succ.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

TransitionSystem build_ts(const lang::Program& p, Sizes sizes, const BuildOptions& opt) {
  if (sizes.a < 1 || sizes.b < 1)
    throw std::invalid_argument("instantiation sizes must be at least 1");
  CProgram cp = compile(p);
  PackLayout lay(cp, sizes);
  if (lay.total > 63)
    throw ResourceLimitError("state does not pack into 63 bits; choose smaller sizes");
  CExpr seed = opt.seed ? compile_expr(opt.seed, lang::SymbolTable(p)) : cp.init;

  FlatMap64 visited;
  std::vector<uint64_t> states;
  std::vector<char> seedflag;
  auto intern = [&](uint64_t key, bool is_seed) {
    auto [idx, inserted] = visited.insert_or_get(key, uint32_t(states.size()));
    if (inserted) {
      states.push_back(key);
      seedflag.push_back(is_seed);
      if (states.size() > opt.max_states)
        throw ResourceLimitError("state cap exceeded (" + std::to_string(opt.max_states) + ")");
    } else if (is_seed) {
      seedflag[idx] = 1;
    }
    return idx;
  };

  if (opt.all_states) {
    CExpr everything = compile_expr(lang::Expr::truth(), lang::SymbolTable(p));
    enumerate_states(cp, sizes, everything, [&](const ConcreteState& s) {
      intern(lay.pack(s), ceval(seed, StateView{s}));
    });
  } else {
    enumerate_states(cp, sizes, seed, [&](const ConcreteState& s) { intern(lay.pack(s), true); });
  }

  TransitionSystem ts;
  ts.succ_offsets.push_back(0);
  std::vector<uint32_t> local;
  for (uint32_t idx = 0; idx < states.size(); ++idx) {
    ConcreteState s = lay.unpack(states[idx]);
    local.clear();
    for (const auto& g : cp.commands) {
      if (!ceval(g.guard, StateView{s})) continue;
      for (const auto& t : apply_guarded(g, s, sizes))
        local.push_back(intern(lay.pack(t), false));
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
      if ((states[i] >> b) & 1) ts.extents[b].set(i);
    if (seedflag[i]) ts.marked.set(i);
  }
  auto shared_states = std::make_shared<std::vector<uint64_t>>(std::move(states));
  ts.namer = [lay, shared_states, booleans = p.booleans, xvars = p.xvars, yvars = p.yvars,
              arrays = p.arrays](uint32_t i) {
    ConcreteState s = lay.unpack((*shared_states)[i]);
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

}  // namespace dimca::concrete
