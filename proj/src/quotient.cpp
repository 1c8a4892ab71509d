#include "dimca/quotient.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <memory>
#include <cassert>
#include <set>

#include "dimca/compiled.hpp"
#include "dimca/flatmap.hpp"
#include "dimca/rgs.hpp"

namespace dimca::quotient {

namespace {

// Working pattern state: tokens are arbitrary ints, -1 marks a slot
// whose value is not tracked (it must be assigned before any use).
struct Pat {
  std::vector<signed char> bools;  // 0/1, -1 untracked
  std::vector<int> x, y;
};

struct PatView {
  const Pat& s;
  int bval(int i) const { return s.bools[i]; }
  int eqx(int i, int j) const {
    if (s.x[i] < 0 || s.x[j] < 0) return -1;
    return s.x[i] == s.x[j];
  }
  int eqy(int i, int j) const {
    if (s.y[i] < 0 || s.y[j] < 0) return -1;
    return s.y[i] == s.y[j];
  }
};

void distinct_present(const std::vector<int>& v, std::vector<int>& out) {
  out.clear();
  for (int t : v)
    if (t >= 0) out.push_back(t);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
}

// One multiple assignment over patterns. Dice candidates are every block
// currently in view plus one fresh block per die; canonical dedup later
// collapses equivalent joint choices.
void apply_cmd(const CCmd& c, const Pat& s, std::vector<Pat>& out) {
  Pat base = s;
  for (const auto& ba : c.bool_assigns) {
    int v = eval3(ba.value, ba.value.root, PatView{s});
    assert(v >= 0);
    base.bools[ba.target] = (signed char)v;
  }
  for (const auto& da : c.data_assigns) {
    switch (da.kind) {
      case CDataAssign::Copy:
        (da.x_typed ? base.x : base.y)[da.target] = (da.x_typed ? s.x : s.y)[da.src];
        break;
      case CDataAssign::Read:
        throw std::logic_error("array operation in an array-free program");
      case CDataAssign::Input: break;
    }
  }

  size_t dx = c.x_dice.size(), dy = c.y_dice.size();
  if (dx == 0 && dy == 0) {
    out.push_back(std::move(base));
    return;
  }
  std::vector<int> xcand, ycand;
  distinct_present(s.x, xcand);
  int xfresh = (xcand.empty() ? 0 : xcand.back() + 1);
  for (size_t i = 0; i < dx; ++i) xcand.push_back(xfresh + int(i));
  distinct_present(s.y, ycand);
  int yfresh = (ycand.empty() ? 0 : ycand.back() + 1);
  for (size_t i = 0; i < dy; ++i) ycand.push_back(yfresh + int(i));

  std::vector<size_t> pick(dx + dy, 0);
  while (true) {
    Pat t = base;
    for (size_t i = 0; i < dx; ++i) t.x[c.x_dice[i]] = xcand[pick[i]];
    for (size_t i = 0; i < dy; ++i) t.y[c.y_dice[i]] = ycand[pick[dx + i]];
    out.push_back(std::move(t));
    size_t k = 0;
    for (; k < pick.size(); ++k) {
      size_t lim = k < dx ? xcand.size() : ycand.size();
      if (++pick[k] < lim) break;
      pick[k] = 0;
    }
    if (k == pick.size()) break;
  }
}

void apply_guarded_tail(const CGuarded& g, std::vector<Pat>& cur) {
  for (const auto& seg : g.segs) {
    std::vector<Pat> next;
    for (auto& t : cur) {
      if (ceval(seg.guard, PatView{t}))
        apply_cmd(seg.cmd, t, next);
      else
        next.push_back(std::move(t));
    }
    cur = std::move(next);
  }
}

std::vector<Pat> apply_guarded(const CGuarded& g, const Pat& s) {
  std::vector<Pat> cur;
  apply_cmd(g.base, s, cur);
  apply_guarded_tail(g, cur);
  return cur;
}

CanonicalState finish(const Pat& t) {
  CanonicalState c;
  c.bools.assign(t.bools.begin(), t.bools.end());
  c.xpat = t.x;
  c.ypat = t.y;
  for (char b : c.bools) assert(b >= 0);
  for (int v : c.xpat) assert(v >= 0);
  for (int v : c.ypat) assert(v >= 0);
  to_rgs(c.xpat);
  to_rgs(c.ypat);
  return c;
}

Pat from_canonical(const CanonicalState& s) {
  Pat p;
  p.bools.assign(s.bools.begin(), s.bools.end());
  p.x = s.xpat;
  p.y = s.ypat;
  return p;
}

void require_array_free(const lang::Program& p) {
  if (!p.arrays.empty())
    throw std::invalid_argument("equality-pattern construction needs an array-free program");
}

// Variables read by an expression, split per kind.
struct ExprVars {
  std::vector<int> bools, xs, ys;
};

ExprVars expr_vars(const CExpr& e) {
  ExprVars out;
  for (const auto& n : e.nodes) {
    switch (n.kind) {
      case CExprNode::BVar: out.bools.push_back(n.a); break;
      case CExprNode::EqX:
        out.xs.push_back(n.a);
        out.xs.push_back(n.b);
        break;
      case CExprNode::EqY:
        out.ys.push_back(n.a);
        out.ys.push_back(n.b);
        break;
      default: break;
    }
  }
  return out;
}

// Pre-state liveness through the chain: a variable's incoming value is
// dead when an unconditional segment overwrites it before any read.
struct Liveness {
  std::vector<char> b, x, y;  // live flags
  bool any_dead = false;
  bool any_dice = false;
};

Liveness analyze(const CGuarded& g, int nb, int nx, int ny) {
  Liveness lv;
  lv.b.assign(nb, 0);
  lv.x.assign(nx, 0);
  lv.y.assign(ny, 0);
  std::vector<char> ab(nb, 0), ax(nx, 0), ay(ny, 0);  // assigned flags

  auto read_expr = [&](const CExpr& e) {
    ExprVars v = expr_vars(e);
    for (int i : v.bools)
      if (!ab[i]) lv.b[i] = 1;
    for (int i : v.xs)
      if (!ax[i]) lv.x[i] = 1;
    for (int i : v.ys)
      if (!ay[i]) lv.y[i] = 1;
  };
  auto scan_cmd = [&](const CCmd& c, bool unconditional) {
    if (!c.x_dice.empty() || !c.y_dice.empty()) lv.any_dice = true;
    for (const auto& ba : c.bool_assigns) read_expr(ba.value);
    for (const auto& da : c.data_assigns)
      if (da.kind == CDataAssign::Copy) {
        auto& flags = da.x_typed ? ax : ay;
        auto& live = da.x_typed ? lv.x : lv.y;
        if (!flags[da.src]) live[da.src] = 1;
      }
    if (!unconditional) return;
    for (const auto& ba : c.bool_assigns) ab[ba.target] = 1;
    for (const auto& da : c.data_assigns) (da.x_typed ? ax : ay)[da.target] = 1;
  };

  scan_cmd(g.base, true);
  for (const auto& seg : g.segs) {
    if (!seg.guard_is_true) read_expr(seg.guard);
    scan_cmd(seg.cmd, seg.guard_is_true);
  }
  for (int i = 0; i < nb; ++i)
    if (!ab[i]) lv.b[i] = 1;
  for (int i = 0; i < nx; ++i)
    if (!ax[i]) lv.x[i] = 1;
  for (int i = 0; i < ny; ++i)
    if (!ay[i]) lv.y[i] = 1;
  lv.any_dead = std::count(lv.b.begin(), lv.b.end(), 0) +
                    std::count(lv.x.begin(), lv.x.end(), 0) +
                    std::count(lv.y.begin(), lv.y.end(), 0) >
                0;
  return lv;
}

}  // namespace

bool CanonicalState::operator<(const CanonicalState& o) const {
  if (bools != o.bools) return bools < o.bools;
  if (xpat != o.xpat) return xpat < o.xpat;
  return ypat < o.ypat;
}

std::vector<CanonicalState> quotient_successors(const lang::Program& p_sharp,
                                                const CanonicalState& s,
                                                const lang::GuardedCommand& gc) {
  require_array_free(p_sharp);
  lang::Program one = p_sharp;
  one.commands = {gc};
  CProgram cp = compile(one);
  Pat pat = from_canonical(s);
  if (!ceval(cp.commands[0].guard, PatView{pat}))
    throw std::invalid_argument("quotient_successors requires the guard to hold");
  std::vector<CanonicalState> out;
  for (const Pat& t : apply_guarded(cp.commands[0], pat)) out.push_back(finish(t));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<CanonicalState> successors(const lang::Program& p_sharp, const CanonicalState& s) {
  require_array_free(p_sharp);
  CProgram cp = compile(p_sharp);
  Pat pat = from_canonical(s);
  std::vector<CanonicalState> out;
  for (const auto& g : cp.commands) {
    if (!ceval(g.guard, PatView{pat})) continue;
    for (const Pat& t : apply_guarded(g, pat)) out.push_back(finish(t));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<CanonicalState> enumerate_states(const lang::Program& p_sharp,
                                             const lang::Expr::Ptr& constraint,
                                             uint64_t cap) {
  require_array_free(p_sharp);
  CProgram cp = compile(p_sharp);
  CExpr con = compile_expr(constraint, lang::SymbolTable(p_sharp));
  std::vector<CanonicalState> out;

  CanonicalState s;
  s.bools.assign(cp.nb, 0);
  struct V {
    const CanonicalState& s;
    int upto;
    int bval(int i) const { return i < upto ? s.bools[i] : -1; }
    int eqx(int i, int j) const { return s.xpat[i] == s.xpat[j]; }
    int eqy(int i, int j) const { return s.ypat[i] == s.ypat[j]; }
  };
  for_each_rgs(cp.nx, [&](const std::vector<int>& xr) {
    s.xpat = xr;
    for_each_rgs(cp.ny, [&](const std::vector<int>& yr) {
      s.ypat = yr;
      auto rec = [&](auto&& self, int i) -> void {
        int r = eval3(con, con.root, V{s, i});
        if (r == 0) return;
        if (i == cp.nb) {
          out.push_back(s);
          if (out.size() > cap) throw ResourceLimitError("canonical state cap exceeded");
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
  return out;
}

TransitionSystem build_quotient_ts(const lang::Program& p_sharp,
                                   const lang::Expr::Ptr& constraint,
                                   const BuildOptions& opt,
                                   std::function<CanonicalState(uint32_t)>* decoder) {
  require_array_free(p_sharp);
  CProgram cp = compile(p_sharp);
  const int nb = cp.nb, nx = cp.nx, ny = cp.ny;
  if (nx > 25 || ny > 25)
    throw ResourceLimitError("too many data variables for pattern packing");
  RgsCoder cx(nx), cy(ny);
  auto bits_for = [](uint64_t count) {
    return count <= 1 ? 0 : std::bit_width(count - 1);
  };
  int bx = bits_for(cx.count()), by = bits_for(cy.count());
  if (nb + bx + by > 63)
    throw ResourceLimitError("quotient state does not pack into 63 bits");

  auto pack = [&](const CanonicalState& s) {
    uint64_t v = 0;
    for (int i = 0; i < nb; ++i) v |= uint64_t(s.bools[i]) << i;
    v |= cx.rank(s.xpat) << nb;
    v |= cy.rank(s.ypat) << (nb + bx);
    return v;
  };
  auto unpack = [cx, cy, nb, bx, by](uint64_t v) {
    CanonicalState s;
    s.bools.resize(nb);
    for (int i = 0; i < nb; ++i) s.bools[i] = (v >> i) & 1;
    uint64_t xr = bx == 0 ? 0 : (v >> nb) & ((uint64_t(1) << bx) - 1);
    uint64_t yr = by == 0 ? 0 : (v >> (nb + bx)) & ((uint64_t(1) << by) - 1);
    s.xpat = cx.unrank(xr);
    s.ypat = cy.unrank(yr);
    return s;
  };

  // Per-command analysis: liveness plus coders for the projected key.
  struct CmdInfo {
    Liveness lv;
    bool memo = false;
    std::vector<int> lb, lx, ly;  // live indices
    std::unique_ptr<RgsCoder> kx, ky;
    int kbx = 0, kby = 0;
    FlatMap64 keymap{10};
  };
  std::vector<CmdInfo> info(cp.commands.size());
  for (size_t c = 0; c < cp.commands.size(); ++c) {
    CmdInfo& ci = info[c];
    ci.lv = analyze(cp.commands[c], nb, nx, ny);
    if (!ci.lv.any_dice || !ci.lv.any_dead) continue;
    for (int i = 0; i < nb; ++i)
      if (ci.lv.b[i]) ci.lb.push_back(i);
    for (int i = 0; i < nx; ++i)
      if (ci.lv.x[i]) ci.lx.push_back(i);
    for (int i = 0; i < ny; ++i)
      if (ci.lv.y[i]) ci.ly.push_back(i);
    ci.kx = std::make_unique<RgsCoder>(int(ci.lx.size()));
    ci.ky = std::make_unique<RgsCoder>(int(ci.ly.size()));
    ci.kbx = bits_for(ci.kx->count());
    ci.kby = bits_for(ci.ky->count());
    if (int(ci.lb.size()) + ci.kbx + ci.kby <= 63) ci.memo = true;
  }

  FlatMap64 visited{16};
  std::vector<uint64_t> states;
  std::vector<char> seedflag;
  auto intern = [&](uint64_t key, bool is_seed) {
    auto [idx, fresh] = visited.insert_or_get(key, uint32_t(states.size()));
    if (fresh) {
      states.push_back(key);
      seedflag.push_back(is_seed);
      if (states.size() > opt.max_states)
        throw ResourceLimitError("quotient state cap exceeded (" +
                                 std::to_string(opt.max_states) + ")");
    } else if (is_seed) {
      seedflag[idx] = 1;
    }
    return idx;
  };

  // Seeds: every constraint-satisfying canonical state.
  {
    CExpr con = compile_expr(constraint, lang::SymbolTable(p_sharp));
    CanonicalState s;
    s.bools.assign(nb, 0);
    struct V {
      const CanonicalState& s;
      int upto;
      int bval(int i) const { return i < upto ? s.bools[i] : -1; }
      int eqx(int i, int j) const { return s.xpat[i] == s.xpat[j]; }
      int eqy(int i, int j) const { return s.ypat[i] == s.ypat[j]; }
    };
    for_each_rgs(nx, [&](const std::vector<int>& xr) {
      s.xpat = xr;
      for_each_rgs(ny, [&](const std::vector<int>& yr) {
        s.ypat = yr;
        auto rec = [&](auto&& self, int i) -> void {
          int r = eval3(con, con.root, V{s, i});
          if (r == 0) return;
          if (i == nb) {
            intern(pack(s), true);
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
  }

  TransitionSystem ts;
  ts.succ_offsets.push_back(0);
  ts.group_offsets.push_back(0);
  std::vector<uint32_t> entries, group_states;

  for (uint32_t idx = 0; idx < states.size(); ++idx) {
    CanonicalState cs = unpack(states[idx]);
    Pat pat = from_canonical(cs);
    entries.clear();
    for (size_t c = 0; c < cp.commands.size(); ++c) {
      const CGuarded& g = cp.commands[c];
      if (!ceval(g.guard, PatView{pat})) continue;
      CmdInfo& ci = info[c];
      if (!ci.memo) {
        std::vector<uint32_t> local;
        for (const Pat& t : apply_guarded(g, pat))
          local.push_back(intern(pack(finish(t)), false));
        std::sort(local.begin(), local.end());
        local.erase(std::unique(local.begin(), local.end()), local.end());
        entries.insert(entries.end(), local.begin(), local.end());
        continue;
      }
      // Shared successors: key on the live projection.
      std::vector<int> px(ci.lx.size()), py(ci.ly.size());
      for (size_t i = 0; i < ci.lx.size(); ++i) px[i] = cs.xpat[ci.lx[i]];
      for (size_t i = 0; i < ci.ly.size(); ++i) py[i] = cs.ypat[ci.ly[i]];
      to_rgs(px);
      to_rgs(py);
      uint64_t key = 0;
      for (size_t i = 0; i < ci.lb.size(); ++i)
        key |= uint64_t(cs.bools[ci.lb[i]]) << i;
      key |= ci.kx->rank(px) << ci.lb.size();
      key |= ci.ky->rank(py) << (ci.lb.size() + ci.kbx);
      uint32_t next_group = uint32_t(ts.group_offsets.size()) - 1;
      auto [gid, fresh] = ci.keymap.insert_or_get(key, next_group);
      if (fresh) {
        Pat proj;
        proj.bools.assign(nb, -1);
        proj.x.assign(nx, -1);
        proj.y.assign(ny, -1);
        for (size_t i = 0; i < ci.lb.size(); ++i) proj.bools[ci.lb[i]] = cs.bools[ci.lb[i]];
        for (size_t i = 0; i < ci.lx.size(); ++i) proj.x[ci.lx[i]] = px[i];
        for (size_t i = 0; i < ci.ly.size(); ++i) proj.y[ci.ly[i]] = py[i];
        std::vector<uint32_t> local;
        for (const Pat& t : apply_guarded(g, proj))
          local.push_back(intern(pack(finish(t)), false));
        std::sort(local.begin(), local.end());
        local.erase(std::unique(local.begin(), local.end()), local.end());
        group_states.insert(group_states.end(), local.begin(), local.end());
        ts.group_offsets.push_back(uint32_t(group_states.size()));
      }
      entries.push_back(TransitionSystem::kGroupTag | gid);
    }
    ts.succ_entries.insert(ts.succ_entries.end(), entries.begin(), entries.end());
    ts.succ_offsets.push_back(uint32_t(ts.succ_entries.size()));
  }
  ts.group_entries = std::move(group_states);

  ts.num_states = uint32_t(states.size());
  ts.observables = p_sharp.booleans;
  ts.extents.assign(nb, Bits(ts.num_states));
  ts.marked.resize(ts.num_states);
  for (uint32_t i = 0; i < ts.num_states; ++i) {
    for (int b = 0; b < nb; ++b)
      if ((states[i] >> b) & 1) ts.extents[b].set(i);
    if (seedflag[i]) ts.marked.set(i);
  }

  auto shared = std::make_shared<std::vector<uint64_t>>(std::move(states));
  auto unpack_copy = unpack;
  if (decoder)
    *decoder = [shared, unpack_copy](uint32_t i) { return unpack_copy((*shared)[i]); };
  ts.namer = [shared, unpack_copy, booleans = p_sharp.booleans, xvars = p_sharp.xvars,
              yvars = p_sharp.yvars](uint32_t i) {
    CanonicalState s = unpack_copy((*shared)[i]);
    std::string out;
    for (size_t b = 0; b < booleans.size(); ++b)
      if (s.bools[b]) out += booleans[b] + " ";
    auto blocks = [&](const std::vector<int>& pat, const std::vector<std::string>& names) {
      std::string r;
      int nblocks = pat.empty() ? 0 : *std::max_element(pat.begin(), pat.end()) + 1;
      for (int blk = 0; blk < nblocks; ++blk) {
        if (blk) r += "|";
        bool first = true;
        for (size_t v = 0; v < pat.size(); ++v)
          if (pat[v] == blk) {
            if (!first) r += ",";
            r += names[v];
            first = false;
          }
      }
      return r;
    };
    out += "x: " + blocks(s.xpat, xvars) + " ; y: " + blocks(s.ypat, yvars);
    return out;
  };
  return ts;
}

}  // namespace dimca::quotient
