#pragma once

#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "dimca/mu.hpp"
#include "dimca/surface.hpp"
#include "dimca/ts.hpp"

namespace testsupport {

inline std::string slurp(const std::string& path) {
  std::ifstream f(path);
  if (!f.good()) throw std::runtime_error("missing fixture " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

inline dimca::lang::Program load_fixture(const std::string& path) {
  return dimca::lang::load_program(slurp(path));
}

using Rng = std::mt19937_64;

inline int pick(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline bool chance(Rng& rng, double p) {
  return std::uniform_real_distribution<double>(0, 1)(rng) < p;
}

// Small data-independent programs with arrays: at most 2 X variables,
// 2 Y variables, 2 arrays, 4 plain commands.
class ProgramGen {
 public:
  explicit ProgramGen(uint64_t seed) : rng_(seed) {}

  dimca::lang::Program next() {
    using namespace dimca::lang;
    Program p;
    int nb = pick(rng_, 1, 2);
    int na = pick(rng_, 0, 2);
    int nx = pick(rng_, na > 0 ? 1 : 0, 2);
    int ny = pick(rng_, na > 0 ? 1 : 0, 2);
    for (int i = 0; i < nb; ++i) p.booleans.push_back("b" + std::to_string(i));
    for (int i = 0; i < nx; ++i) p.xvars.push_back("x" + std::to_string(i));
    for (int i = 0; i < ny; ++i) p.yvars.push_back("y" + std::to_string(i));
    for (int i = 0; i < na; ++i) p.arrays.push_back("a" + std::to_string(i));
    p.init = chance(rng_, 0.5) ? Expr::truth() : expr(p, 2);
    int ncmd = pick(rng_, 1, 4);
    for (int i = 0; i < ncmd; ++i) p.commands.push_back(command(p));
    return p;
  }

  dimca::lang::Expr::Ptr expr(const dimca::lang::Program& p, int depth) {
    using namespace dimca::lang;
    if (depth == 0 || chance(rng_, 0.4)) {
      switch (pick(rng_, 0, 3)) {
        case 0: return Expr::truth();
        case 1: return Expr::var(p.booleans[pick(rng_, 0, int(p.booleans.size()) - 1)]);
        case 2:
          if (p.xvars.size() >= 2) {
            return Expr::eq(p.xvars[0], p.xvars[1]);
          }
          return Expr::var(p.booleans[0]);
        default:
          if (p.yvars.size() >= 2) {
            return Expr::eq(p.yvars[0], p.yvars[1]);
          }
          return Expr::var(p.booleans.back());
      }
    }
    switch (pick(rng_, 0, 2)) {
      case 0: return Expr::negate(expr(p, depth - 1));
      case 1: return Expr::disj(expr(p, depth - 1), expr(p, depth - 1));
      default: return Expr::conj(expr(p, depth - 1), expr(p, depth - 1));
    }
  }

  dimca::lang::GuardedCommand command(const dimca::lang::Program& p) {
    using namespace dimca::lang;
    GuardedCommand gc;
    gc.guard = chance(rng_, 0.4) ? Expr::truth() : expr(p, 2);
    Command& c = gc.body;
    for (const auto& b : p.booleans)
      if (chance(rng_, 0.35)) c.bool_assigns.push_back({b, expr(p, 1)});
    for (const auto& x : p.xvars) {
      if (!chance(rng_, 0.4)) continue;
      DataAssign da;
      da.target = x;
      if (p.xvars.size() > 1 && chance(rng_, 0.4)) {
        da.kind = DataRhs::Copy;
        da.src = p.xvars[pick(rng_, 0, int(p.xvars.size()) - 1)];
      } else {
        da.kind = DataRhs::Input;
      }
      c.data_assigns.push_back(da);
    }
    for (const auto& y : p.yvars) {
      if (!chance(rng_, 0.45)) continue;
      DataAssign da;
      da.target = y;
      int k = pick(rng_, 0, 2);
      if (k == 0 && !p.arrays.empty() && !p.xvars.empty()) {
        da.kind = DataRhs::Read;
        da.array = p.arrays[pick(rng_, 0, int(p.arrays.size()) - 1)];
        da.index = p.xvars[pick(rng_, 0, int(p.xvars.size()) - 1)];
      } else if (k == 1 && p.yvars.size() > 1) {
        da.kind = DataRhs::Copy;
        da.src = p.yvars[pick(rng_, 0, int(p.yvars.size()) - 1)];
      } else {
        da.kind = DataRhs::Input;
      }
      c.data_assigns.push_back(da);
    }
    for (const auto& a : p.arrays) {
      if (p.xvars.empty() || p.yvars.empty() || !chance(rng_, 0.35)) continue;
      c.array_writes.push_back({a, p.xvars[pick(rng_, 0, int(p.xvars.size()) - 1)],
                                p.yvars[pick(rng_, 0, int(p.yvars.size()) - 1)]});
    }
    if (c.empty())
      c.bool_assigns.push_back(
          {p.booleans[0], dimca::lang::Expr::negate(dimca::lang::Expr::var(p.booleans[0]))});
    return gc;
  }

  Rng& rng() { return rng_; }

 private:
  Rng rng_;
};

// Closed formulas of the universal fragments: dual-L2 avoids positive
// observables and EX; dual-L4 additionally avoids | and mu.
class FormulaGen {
 public:
  explicit FormulaGen(uint64_t seed) : rng_(seed) {}

  dimca::mu::Formula::Ptr dual_l2(const std::vector<std::string>& obs, int depth) {
    return gen(obs, depth, /*allow_or=*/true, {});
  }

  dimca::mu::Formula::Ptr dual_l4(const std::vector<std::string>& obs, int depth) {
    return gen(obs, depth, /*allow_or=*/false, {});
  }

 private:
  dimca::mu::Formula::Ptr gen(const std::vector<std::string>& obs, int depth,
                              bool allow_or, std::vector<std::string> bound) {
    using namespace dimca::mu;
    if (depth == 0 || chance(rng_, 0.25)) {
      if (!bound.empty() && chance(rng_, 0.5))
        return Formula::var(bound[pick(rng_, 0, int(bound.size()) - 1)]);
      return Formula::neg_obs(obs[pick(rng_, 0, int(obs.size()) - 1)]);
    }
    int lim = allow_or ? 5 : 3;
    switch (pick(rng_, 0, lim)) {
      case 0: return Formula::mk1(FKind::AX, gen(obs, depth - 1, allow_or, bound));
      case 1: {
        auto a = gen(obs, depth - 1, allow_or, bound);
        auto b = gen(obs, depth - 1, allow_or, bound);
        return Formula::mk2(FKind::And, a, b);
      }
      case 2:
      case 3: {
        std::string h = "w" + std::to_string(counter_++);
        bound.push_back(h);
        auto body = gen(obs, depth - 1, allow_or, bound);
        return Formula::bind(FKind::Nu, h, body);
      }
      case 4: {
        auto a = gen(obs, depth - 1, allow_or, bound);
        auto b = gen(obs, depth - 1, allow_or, bound);
        return Formula::mk2(FKind::Or, a, b);
      }
      default: {
        std::string h = "w" + std::to_string(counter_++);
        bound.push_back(h);
        auto body = gen(obs, depth - 1, allow_or, bound);
        return Formula::bind(FKind::Mu, h, body);
      }
    }
  }

  Rng rng_;
  int counter_ = 0;
};

// Random explicit systems for engine properties.
inline dimca::TransitionSystem random_ts(Rng& rng, int max_states, int nobs) {
  dimca::TransitionSystem ts;
  int n = pick(rng, 1, max_states);
  ts.num_states = n;
  for (int i = 0; i < nobs; ++i) ts.observables.push_back("p" + std::to_string(i));
  ts.extents.assign(nobs, dimca::Bits(n));
  for (int i = 0; i < nobs; ++i)
    for (int q = 0; q < n; ++q)
      if (chance(rng, 0.5)) ts.extents[i].set(q);
  ts.succ_offsets.push_back(0);
  for (int q = 0; q < n; ++q) {
    int d = pick(rng, 0, 3);
    std::vector<uint32_t> succ;
    for (int k = 0; k < d; ++k) succ.push_back(pick(rng, 0, n - 1));
    std::sort(succ.begin(), succ.end());
    succ.erase(std::unique(succ.begin(), succ.end()), succ.end());
    ts.succ_entries.insert(ts.succ_entries.end(), succ.begin(), succ.end());
    ts.succ_offsets.push_back(uint32_t(ts.succ_entries.size()));
  }
  ts.marked.resize(n);
  return ts;
}

// Every closed formula over tiny alphabets, for lattice-enumeration
// comparisons: generated randomly with full mu-calculus constructors.
inline dimca::mu::Formula::Ptr random_formula(Rng& rng, const std::vector<std::string>& obs,
                                              int depth, std::vector<std::string> bound = {},
                                              int* counter = nullptr) {
  using namespace dimca::mu;
  static int fallback_counter = 0;
  if (!counter) counter = &fallback_counter;
  if (depth == 0 || chance(rng, 0.3)) {
    int k = pick(rng, 0, bound.empty() ? 1 : 2);
    if (k == 2) return Formula::var(bound[pick(rng, 0, int(bound.size()) - 1)]);
    const std::string& p = obs[pick(rng, 0, int(obs.size()) - 1)];
    return k == 0 ? Formula::obs(p) : Formula::neg_obs(p);
  }
  switch (pick(rng, 0, 5)) {
    case 0:
      return Formula::mk2(FKind::Or, random_formula(rng, obs, depth - 1, bound, counter),
                          random_formula(rng, obs, depth - 1, bound, counter));
    case 1:
      return Formula::mk2(FKind::And, random_formula(rng, obs, depth - 1, bound, counter),
                          random_formula(rng, obs, depth - 1, bound, counter));
    case 2: return Formula::mk1(FKind::EX, random_formula(rng, obs, depth - 1, bound, counter));
    case 3: return Formula::mk1(FKind::AX, random_formula(rng, obs, depth - 1, bound, counter));
    default: {
      std::string h = "v" + std::to_string((*counter)++);
      bound.push_back(h);
      auto body = random_formula(rng, obs, depth - 1, bound, counter);
      return Formula::bind(pick(rng, 0, 1) ? FKind::Mu : FKind::Nu, h, body);
    }
  }
}

}  // namespace testsupport
