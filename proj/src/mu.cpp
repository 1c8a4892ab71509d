#include "dimca/mu.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>
#include <set>
#include <sstream>

namespace dimca::mu {

namespace {

Formula::Ptr node(FKind k) {
  auto f = std::make_shared<Formula>();
  f->kind = k;
  return f;
}

}  // namespace

Formula::Ptr Formula::obs(std::string n) {
  auto f = node(FKind::Obs);
  const_cast<Formula&>(*f).name = std::move(n);
  return f;
}

Formula::Ptr Formula::neg_obs(std::string n) {
  auto f = node(FKind::NegObs);
  const_cast<Formula&>(*f).name = std::move(n);
  return f;
}

Formula::Ptr Formula::var(std::string n) {
  auto f = node(FKind::Var);
  const_cast<Formula&>(*f).name = std::move(n);
  return f;
}

Formula::Ptr Formula::mk2(FKind k, Ptr x, Ptr y) {
  auto f = node(k);
  auto& m = const_cast<Formula&>(*f);
  m.a = std::move(x);
  m.b = std::move(y);
  return f;
}

Formula::Ptr Formula::mk1(FKind k, Ptr x) {
  auto f = node(k);
  const_cast<Formula&>(*f).a = std::move(x);
  return f;
}

Formula::Ptr Formula::bind(FKind k, std::string h, Ptr body) {
  auto f = node(k);
  auto& m = const_cast<Formula&>(*f);
  m.name = std::move(h);
  m.a = std::move(body);
  return f;
}

namespace {

class FormulaParser {
 public:
  explicit FormulaParser(const std::string& s) : s_(s) {}

  Formula::Ptr run() {
    auto f = or_level();
    skip();
    if (i_ != s_.size()) throw FormulaError("trailing input in formula at '" + rest() + "'");
    return f;
  }

 private:
  std::string rest() const { return s_.substr(i_, 12); }

  void skip() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }

  bool take(const char* kw) {
    skip();
    size_t n = std::strlen(kw);
    if (s_.compare(i_, n, kw) != 0) return false;
    if (std::isalpha(static_cast<unsigned char>(kw[0]))) {
      char c = i_ + n < s_.size() ? s_[i_ + n] : ' ';
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') return false;
    }
    i_ += n;
    return true;
  }

  std::string ident() {
    skip();
    size_t b = i_;
    while (i_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_'))
      ++i_;
    if (b == i_) throw FormulaError("expected identifier in formula at '" + rest() + "'");
    return s_.substr(b, i_ - b);
  }

  Formula::Ptr or_level() {
    auto f = and_level();
    while (take("|")) f = Formula::mk2(FKind::Or, f, and_level());
    return f;
  }

  Formula::Ptr and_level() {
    auto f = unary();
    while (take("&")) f = Formula::mk2(FKind::And, f, unary());
    return f;
  }

  Formula::Ptr unary() {
    if (take("~") || take("!")) {
      skip();
      if (i_ < s_.size() && s_[i_] == '(')
        throw FormulaError("negation applies to observables only");
      std::string n = ident();
      if (bound(n)) throw FormulaError("negation applies to observables only: ~" + n);
      return Formula::neg_obs(n);
    }
    if (take("EX")) return Formula::mk1(FKind::EX, unary());
    if (take("AX")) return Formula::mk1(FKind::AX, unary());
    if (take("mu")) return binder(FKind::Mu);
    if (take("nu")) return binder(FKind::Nu);
    if (take("(")) {
      auto f = or_level();
      if (!take(")")) throw FormulaError("missing ')' in formula");
      return f;
    }
    std::string n = ident();
    if (auto r = renamed(n)) return Formula::var(*r);
    return Formula::obs(n);
  }

  Formula::Ptr binder(FKind k) {
    std::string h = ident();
    if (!take(".") && !take(":")) throw FormulaError("expected '.' after binder variable");
    std::string fresh = "h" + std::to_string(++binder_count_);
    scopes_.push_back({h, fresh});
    auto body = or_level();
    scopes_.pop_back();
    return Formula::bind(k, fresh, body);
  }

  bool bound(const std::string& n) const { return renamed(n).has_value(); }

  std::optional<std::string> renamed(const std::string& n) const {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it)
      if (it->first == n) return it->second;
    return std::nullopt;
  }

  const std::string& s_;
  size_t i_ = 0;
  int binder_count_ = 0;
  std::vector<std::pair<std::string, std::string>> scopes_;
};

void collect_free(const Formula::Ptr& f, std::set<std::string>& bound,
                  std::set<std::string>& free) {
  switch (f->kind) {
    case FKind::Obs:
    case FKind::NegObs: return;
    case FKind::Var:
      if (!bound.count(f->name)) free.insert(f->name);
      return;
    case FKind::Or:
    case FKind::And:
      collect_free(f->a, bound, free);
      collect_free(f->b, bound, free);
      return;
    case FKind::EX:
    case FKind::AX: collect_free(f->a, bound, free); return;
    case FKind::Mu:
    case FKind::Nu: {
      bool fresh = bound.insert(f->name).second;
      collect_free(f->a, bound, free);
      if (fresh) bound.erase(f->name);
      return;
    }
  }
}

}  // namespace

Formula::Ptr parse_formula(const std::string& text) { return FormulaParser(text).run(); }

std::string to_string(const Formula::Ptr& f) {
  // Precedence: binders weakest, then |, &, prefixes.
  std::ostringstream os;
  auto rec = [&](auto&& self, const Formula::Ptr& g, int ctx) -> void {
    auto paren = [&](int prec, auto body) {
      if (prec < ctx) os << '(';
      body();
      if (prec < ctx) os << ')';
    };
    switch (g->kind) {
      case FKind::Obs: os << g->name; return;
      case FKind::NegObs: os << '~' << g->name; return;
      case FKind::Var: os << g->name; return;
      case FKind::Or:
        paren(1, [&] {
          self(self, g->a, 1);
          os << " | ";
          self(self, g->b, 2);
        });
        return;
      case FKind::And:
        paren(2, [&] {
          self(self, g->a, 2);
          os << " & ";
          self(self, g->b, 3);
        });
        return;
      case FKind::EX:
      case FKind::AX:
        paren(3, [&] {
          os << (g->kind == FKind::EX ? "EX " : "AX ");
          self(self, g->a, 3);
        });
        return;
      case FKind::Mu:
      case FKind::Nu:
        paren(0, [&] {
          os << (g->kind == FKind::Mu ? "mu " : "nu ") << g->name << ". ";
          self(self, g->a, 0);
        });
        return;
    }
  };
  rec(rec, f, 0);
  return os.str();
}

bool is_closed(const Formula::Ptr& f) {
  std::set<std::string> bound, free;
  collect_free(f, bound, free);
  return free.empty();
}

std::vector<std::string> observables_of(const Formula::Ptr& f) {
  std::vector<std::string> out;
  auto rec = [&](auto&& self, const Formula::Ptr& g) -> void {
    switch (g->kind) {
      case FKind::Obs:
      case FKind::NegObs: out.push_back(g->name); return;
      case FKind::Var: return;
      case FKind::Or:
      case FKind::And:
        self(self, g->a);
        self(self, g->b);
        return;
      default:
        if (g->a) self(self, g->a);
        return;
    }
  };
  rec(rec, f);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Formula::Ptr dualize(const Formula::Ptr& f) {
  switch (f->kind) {
    case FKind::Obs: return Formula::neg_obs(f->name);
    case FKind::NegObs: return Formula::obs(f->name);
    case FKind::Var: return f;
    case FKind::Or: return Formula::mk2(FKind::And, dualize(f->a), dualize(f->b));
    case FKind::And: return Formula::mk2(FKind::Or, dualize(f->a), dualize(f->b));
    case FKind::EX: return Formula::mk1(FKind::AX, dualize(f->a));
    case FKind::AX: return Formula::mk1(FKind::EX, dualize(f->a));
    case FKind::Mu: return Formula::bind(FKind::Nu, f->name, dualize(f->a));
    case FKind::Nu: return Formula::bind(FKind::Mu, f->name, dualize(f->a));
  }
  return f;
}

namespace {

bool in_l2(const Formula::Ptr& f) {
  switch (f->kind) {
    case FKind::NegObs:
    case FKind::AX: return false;
    case FKind::Obs:
    case FKind::Var: return true;
    default: return (!f->a || in_l2(f->a)) && (!f->b || in_l2(f->b));
  }
}

bool in_l4(const Formula::Ptr& f) {
  switch (f->kind) {
    case FKind::NegObs:
    case FKind::AX:
    case FKind::And:
    case FKind::Nu: return false;
    case FKind::Obs:
    case FKind::Var: return true;
    default: return (!f->a || in_l4(f->a)) && (!f->b || in_l4(f->b));
  }
}

}  // namespace

Fragment classify(const Formula::Ptr& f) {
  if (!is_closed(f)) throw FormulaError("classification requires a closed formula");
  Fragment fr;
  fr.l2 = in_l2(f);
  fr.l4 = in_l4(f);
  auto d = dualize(f);
  fr.dual_l2 = in_l2(d);
  fr.dual_l4 = in_l4(d);
  return fr;
}

std::string Fragment::tag() const {
  if (l4) return "L4";
  if (dual_l4) return "dualL4";
  if (l2) return "L2";
  if (dual_l2) return "dualL2";
  return "L1";
}

std::optional<std::string> dual_l2_offender(const Formula::Ptr& f) {
  // dualize(f) is in L2 iff f avoids positive observables and EX.
  switch (f->kind) {
    case FKind::Obs: return "positive observable '" + f->name + "'";
    case FKind::EX: {
      auto inner = dual_l2_offender(f->a);
      return inner ? inner : std::optional<std::string>("EX");
    }
    case FKind::NegObs:
    case FKind::Var: return std::nullopt;
    default: {
      if (f->a)
        if (auto r = dual_l2_offender(f->a)) return r;
      if (f->b)
        if (auto r = dual_l2_offender(f->b)) return r;
      return std::nullopt;
    }
  }
}

namespace {

struct LevelRecorder {
  // For each mu-variable: iteration index at which a state entered the
  // growing set (1-based); UINT32_MAX outside the fixpoint.
  std::map<std::string, std::vector<uint32_t>> levels;
};

class Evaluator {
 public:
  Evaluator(const TransitionSystem& ts, EvalStats* stats, LevelRecorder* rec)
      : ts_(ts), stats_(stats), rec_(rec) {}

  Bits eval(const Formula::Ptr& f, std::map<std::string, const Bits*>& env) {
    switch (f->kind) {
      case FKind::Obs: {
        int i = ts_.obs_index(f->name);
        if (i < 0) throw FormulaError("unknown observable '" + f->name + "'");
        return ts_.extents[i];
      }
      case FKind::NegObs: {
        int i = ts_.obs_index(f->name);
        if (i < 0) throw FormulaError("unknown observable '" + f->name + "'");
        return ~ts_.extents[i];
      }
      case FKind::Var: {
        auto it = env.find(f->name);
        if (it == env.end()) throw FormulaError("free variable '" + f->name + "'");
        return *it->second;
      }
      case FKind::Or: {
        Bits r = eval(f->a, env);
        r |= eval(f->b, env);
        return r;
      }
      case FKind::And: {
        Bits r = eval(f->a, env);
        r &= eval(f->b, env);
        return r;
      }
      case FKind::EX: {
        Bits s = eval(f->a, env);
        return pre_exists(s);
      }
      case FKind::AX: {
        Bits s = eval(f->a, env);
        return pre_all(s);
      }
      case FKind::Mu:
      case FKind::Nu: {
        bool is_mu = f->kind == FKind::Mu;
        Bits cur(ts_.num_states);
        if (!is_mu) cur.set();
        std::vector<uint32_t>* lv = nullptr;
        if (rec_ && is_mu) {
          lv = &rec_->levels[f->name];
          lv->assign(ts_.num_states, UINT32_MAX);
        }
        uint64_t iters = 0;
        while (true) {
          const Bits* curp = &cur;
          env[f->name] = curp;
          Bits next = eval(f->a, env);
          env.erase(f->name);
          if (next == cur) break;
          ++iters;
          if (lv) {
            Bits fresh = next & ~cur;
            for (size_t i = fresh.find_first(); i != Bits::npos; i = fresh.find_next(i))
              (*lv)[i] = uint32_t(iters);
          }
          cur = std::move(next);
        }
        if (stats_) {
          stats_->max_iterations = std::max(stats_->max_iterations, iters);
          stats_->fixpoint_evals++;
        }
        return cur;
      }
    }
    return Bits(ts_.num_states);
  }

  Bits pre_exists(const Bits& s) {
    std::vector<char> gany(ts_.num_groups(), 0);
    for (size_t g = 0; g < ts_.num_groups(); ++g)
      for (uint32_t j = ts_.group_offsets[g]; j < ts_.group_offsets[g + 1]; ++j)
        if (s.test(ts_.group_entries[j])) {
          gany[g] = 1;
          break;
        }
    Bits out(ts_.num_states);
    for (uint32_t q = 0; q < ts_.num_states; ++q) {
      bool any = false;
      for (uint32_t i = ts_.succ_offsets[q]; !any && i < ts_.succ_offsets[q + 1]; ++i) {
        uint32_t e = ts_.succ_entries[i];
        any = (e & TransitionSystem::kGroupTag) ? gany[e & ~TransitionSystem::kGroupTag]
                                                : s.test(e);
      }
      if (any) out.set(q);
    }
    return out;
  }

  Bits pre_all(const Bits& s) {
    std::vector<char> gall(ts_.num_groups(), 1);
    for (size_t g = 0; g < ts_.num_groups(); ++g)
      for (uint32_t j = ts_.group_offsets[g]; j < ts_.group_offsets[g + 1]; ++j)
        if (!s.test(ts_.group_entries[j])) {
          gall[g] = 0;
          break;
        }
    Bits out(ts_.num_states);
    out.set();
    for (uint32_t q = 0; q < ts_.num_states; ++q) {
      for (uint32_t i = ts_.succ_offsets[q]; i < ts_.succ_offsets[q + 1]; ++i) {
        uint32_t e = ts_.succ_entries[i];
        bool ok = (e & TransitionSystem::kGroupTag) ? gall[e & ~TransitionSystem::kGroupTag]
                                                    : s.test(e);
        if (!ok) {
          out.reset(q);
          break;
        }
      }
    }
    return out;
  }

 private:
  const TransitionSystem& ts_;
  EvalStats* stats_;
  LevelRecorder* rec_;
};

// Witness extraction for L4 formulas (p | h | or | EX | mu): a finite
// path ending at a satisfied observable.
class L4Witness {
 public:
  L4Witness(const TransitionSystem& ts, const LevelRecorder& rec) : ts_(ts), rec_(rec) {}

  void index_bodies(const Formula::Ptr& f) {
    if (f->kind == FKind::Mu) bodies_[f->name] = f->a;
    if (f->a) index_bodies(f->a);
    if (f->b) index_bodies(f->b);
  }

  bool member(const Formula::Ptr& f, uint32_t s, std::map<std::string, uint32_t>& bound) {
    switch (f->kind) {
      case FKind::Obs: return ts_.extents[ts_.obs_index(f->name)].test(s);
      case FKind::Var: {
        auto lv = rec_.levels.at(f->name)[s];
        auto it = bound.find(f->name);
        uint32_t lim = it == bound.end() ? UINT32_MAX - 1 : it->second;
        return lv != UINT32_MAX && lv <= lim;
      }
      case FKind::Or: return member(f->a, s, bound) || member(f->b, s, bound);
      case FKind::EX: {
        bool found = false;
        ts_.for_each_successor(s, [&](uint32_t t) {
          if (!found && member(f->a, t, bound)) found = true;
        });
        return found;
      }
      case FKind::Mu: return rec_.levels.at(f->name)[s] != UINT32_MAX;
      default: throw FormulaError("witness extraction outside L4");
    }
  }

  // Pre: member(f, s, bound).
  void descend(const Formula::Ptr& f, uint32_t s, std::map<std::string, uint32_t> bound,
               std::vector<uint32_t>& path) {
    switch (f->kind) {
      case FKind::Obs: path.push_back(s); return;
      case FKind::Or:
        if (member(f->a, s, bound))
          descend(f->a, s, bound, path);
        else
          descend(f->b, s, bound, path);
        return;
      case FKind::EX: {
        uint32_t best = UINT32_MAX;
        ts_.for_each_successor(s, [&](uint32_t t) {
          if (best == UINT32_MAX && member(f->a, t, bound)) best = t;
        });
        if (best == UINT32_MAX) throw FormulaError("witness descent lost the path");
        path.push_back(s);
        descend(f->a, best, std::move(bound), path);
        return;
      }
      case FKind::Var: {
        uint32_t lv = rec_.levels.at(f->name)[s];
        bound[f->name] = lv - 1;
        descend(bodies_.at(f->name), s, std::move(bound), path);
        return;
      }
      case FKind::Mu: {
        uint32_t lv = rec_.levels.at(f->name)[s];
        bound[f->name] = lv - 1;
        descend(f->a, s, std::move(bound), path);
        return;
      }
      default: throw FormulaError("witness extraction outside L4");
    }
  }

 private:
  const TransitionSystem& ts_;
  const LevelRecorder& rec_;
  std::map<std::string, Formula::Ptr> bodies_;
};

}  // namespace

Bits eval(const TransitionSystem& ts, const Formula::Ptr& f, const Env& env,
          EvalStats* stats) {
  std::map<std::string, const Bits*> e;
  for (const auto& [k, v] : env) e[k] = &v;
  Evaluator ev(ts, stats, nullptr);
  return ev.eval(f, e);
}

CheckResult check(const TransitionSystem& ts, const std::string& b0,
                  const std::optional<Bits>& restrict_to, const Formula::Ptr& f) {
  if (!is_closed(f)) throw FormulaError("check requires a closed formula");
  int b = ts.obs_index(b0);
  if (b < 0) throw FormulaError("unknown observable '" + b0 + "'");
  Bits seeds = ts.extents[b];
  if (restrict_to) seeds &= *restrict_to;

  CheckResult res;
  Fragment fr = classify(f);
  std::map<std::string, const Bits*> env;
  if (fr.dual_l4) {
    // Evaluate the dual and use complementation; a failing seed then has
    // an L4 witness path extracted from the recorded fixpoint levels.
    auto d = dualize(f);
    LevelRecorder rec;
    Evaluator ev(ts, &res.stats, &rec);
    Bits bad = ev.eval(d, env);
    bad &= seeds;
    res.holds = bad.none();
    if (!res.holds) {
      uint32_t seed = uint32_t(bad.find_first());
      res.violating_seed = seed;
      L4Witness w(ts, rec);
      w.index_bodies(d);
      std::vector<uint32_t> path;
      std::map<std::string, uint32_t> bound;
      w.descend(d, seed, bound, path);
      res.counterexample = std::move(path);
    }
    return res;
  }

  Evaluator ev(ts, &res.stats, nullptr);
  Bits good = ev.eval(f, env);
  Bits bad = seeds & ~good;
  res.holds = bad.none();
  if (!res.holds) res.violating_seed = uint32_t(bad.find_first());
  return res;
}

}  // namespace dimca::mu
