#include "scw/hp/exec.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <deque>
#include <limits>
#include <set>
#include <sstream>

#include "scw/rng.hpp"

namespace scw::hp {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double fetch(const Valuation& s, const std::string& name) {
  const auto it = s.find(name);
  if (it == s.end()) throw UnboundVariable(name);
  return it->second;
}

double ipow(double base, int e) {
  double r = 1.0;
  for (int k = 0; k < e; ++k) r *= base;
  return r;
}
}  // namespace

double eval_term(const Term& t, const Valuation& s) {
  switch (t.kind) {
    case Term::Kind::Var: return fetch(s, t.name);
    case Term::Kind::Const: return rational_to_double(t.value);
    case Term::Kind::Add: return eval_term(*t.lhs, s) + eval_term(*t.rhs, s);
    case Term::Kind::Mul: return eval_term(*t.lhs, s) * eval_term(*t.rhs, s);
    case Term::Kind::Neg: return -eval_term(*t.lhs, s);
    case Term::Kind::Pow: return ipow(eval_term(*t.lhs, s), t.exponent);
  }
  throw std::logic_error("bad term kind");
}

namespace {
bool cmp_holds(CmpOp op, double l, double r) {
  switch (op) {
    case CmpOp::Ge: return l >= r;
    case CmpOp::Eq: return l == r;
    case CmpOp::Gt: return l > r;
    case CmpOp::Le: return l <= r;
    case CmpOp::Lt: return l < r;
  }
  return false;
}
}  // namespace

bool eval_formula(const Formula& f, const Valuation& s) {
  switch (f.kind) {
    case Formula::Kind::Cmp:
      return cmp_holds(f.op, eval_term(*f.tl, s), eval_term(*f.tr, s));
    case Formula::Kind::Not: return !eval_formula(*f.l, s);
    case Formula::Kind::And: return eval_formula(*f.l, s) && eval_formula(*f.r, s);
    case Formula::Kind::Or: return eval_formula(*f.l, s) || eval_formula(*f.r, s);
    case Formula::Kind::Imp: return !eval_formula(*f.l, s) || eval_formula(*f.r, s);
    case Formula::Kind::Iff: return eval_formula(*f.l, s) == eval_formula(*f.r, s);
    case Formula::Kind::True: return true;
    case Formula::Kind::False: return false;
    case Formula::Kind::Forall:
    case Formula::Kind::Exists:
      throw UnsupportedConstruct("quantifiers are unsupported in the executable subset");
  }
  throw std::logic_error("bad formula kind");
}

namespace {

// --------------------------------------------------------------------------
// Linear shape extraction (for nondet bounds and ODE right-hand sides).
// --------------------------------------------------------------------------

// expr = coeff * var + rest, with coeff/rest evaluated in the surrounding
// valuation. nullopt when expr is not linear in var.
struct Linear {
  double coeff{0.0};
  double rest{0.0};
};

std::optional<Linear> linearize(const Term& t, const std::string& var,
                                const Valuation& s) {
  switch (t.kind) {
    case Term::Kind::Var:
      if (t.name == var) return Linear{1.0, 0.0};
      return Linear{0.0, fetch(s, t.name)};
    case Term::Kind::Const:
      return Linear{0.0, rational_to_double(t.value)};
    case Term::Kind::Add: {
      auto l = linearize(*t.lhs, var, s), r = linearize(*t.rhs, var, s);
      if (!l || !r) return std::nullopt;
      return Linear{l->coeff + r->coeff, l->rest + r->rest};
    }
    case Term::Kind::Neg: {
      auto l = linearize(*t.lhs, var, s);
      if (!l) return std::nullopt;
      return Linear{-l->coeff, -l->rest};
    }
    case Term::Kind::Mul: {
      auto l = linearize(*t.lhs, var, s), r = linearize(*t.rhs, var, s);
      if (!l || !r) return std::nullopt;
      if (l->coeff != 0.0 && r->coeff != 0.0) return std::nullopt;
      if (l->coeff == 0.0) return Linear{l->rest * r->coeff, l->rest * r->rest};
      return Linear{l->coeff * r->rest, l->rest * r->rest};
    }
    case Term::Kind::Pow: {
      auto l = linearize(*t.lhs, var, s);
      if (!l) return std::nullopt;
      if (l->coeff != 0.0) {
        if (t.exponent == 1) return l;
        return std::nullopt;
      }
      return Linear{0.0, ipow(l->rest, t.exponent)};
    }
  }
  return std::nullopt;
}

bool mentions(const Term& t, const std::string& var) {
  switch (t.kind) {
    case Term::Kind::Var: return t.name == var;
    case Term::Kind::Const: return false;
    case Term::Kind::Add:
    case Term::Kind::Mul: return mentions(*t.lhs, var) || mentions(*t.rhs, var);
    case Term::Kind::Neg:
    case Term::Kind::Pow: return mentions(*t.lhs, var);
  }
  return false;
}

bool mentions_any(const Term& t, const std::set<std::string>& vars) {
  switch (t.kind) {
    case Term::Kind::Var: return vars.count(t.name) > 0;
    case Term::Kind::Const: return false;
    case Term::Kind::Add:
    case Term::Kind::Mul:
      return mentions_any(*t.lhs, vars) || mentions_any(*t.rhs, vars);
    case Term::Kind::Neg:
    case Term::Kind::Pow: return mentions_any(*t.lhs, vars);
  }
  return false;
}

void collect_conjuncts(const FormulaPtr& f, std::vector<FormulaPtr>& out) {
  if (f->kind == Formula::Kind::And) {
    collect_conjuncts(f->l, out);
    collect_conjuncts(f->r, out);
  } else {
    out.push_back(f);
  }
}

// --------------------------------------------------------------------------
// Sample interval for x := *; ?(F).
// --------------------------------------------------------------------------

struct SampleInterval {
  double lo{-kInf};
  double hi{kInf};
  bool constrained{false};  // some conjunct mentions the variable
  bool empty{false};        // contradictory bounds
};

SampleInterval bounds_for(const std::vector<FormulaPtr>& conjuncts,
                          const std::string& var, const Valuation& s) {
  SampleInterval iv;
  for (const auto& c : conjuncts) {
    if (c->kind != Formula::Kind::Cmp) continue;
    if (!mentions(*c->tl, var) && !mentions(*c->tr, var)) continue;
    const auto l = linearize(*c->tl, var, s);
    const auto r = linearize(*c->tr, var, s);
    if (!l || !r) continue;  // nonlinear in var; left to the test itself
    // l - r = a*var + b, compared against 0.
    const double a = l->coeff - r->coeff;
    const double b = l->rest - r->rest;
    if (a == 0.0) continue;  // var cancelled; the test will decide
    iv.constrained = true;
    const double bound = -b / a;
    const bool lower = (a > 0.0) == (c->op == CmpOp::Ge || c->op == CmpOp::Gt);
    switch (c->op) {
      case CmpOp::Eq:
        iv.lo = std::max(iv.lo, bound);
        iv.hi = std::min(iv.hi, bound);
        break;
      default:
        if (lower)
          iv.lo = std::max(iv.lo, bound);
        else
          iv.hi = std::min(iv.hi, bound);
    }
  }
  if (iv.lo > iv.hi) iv.empty = true;
  return iv;
}

// Nudges a candidate sample until the conjuncts that mention the variable
// hold, so interval endpoints computed through a division survive the test.
double tighten(const std::vector<FormulaPtr>& conjuncts, const std::string& var,
               Valuation s, double value, double toward) {
  const auto ok = [&](double v) {
    s[var] = v;
    for (const auto& c : conjuncts) {
      if (c->kind != Formula::Kind::Cmp) continue;
      if (!mentions(*c->tl, var) && !mentions(*c->tr, var)) continue;
      if (!eval_formula(*c, s)) return false;
    }
    return true;
  };
  double v = value;
  for (int k = 0; k < 8 && !ok(v); ++k) v = std::nextafter(v, toward);
  return ok(v) ? v : value;
}

// --------------------------------------------------------------------------
// Nilpotent ODE flows in closed form.
// --------------------------------------------------------------------------

struct FlowQuad {
  std::string var;
  double c0{0.0}, c1{0.0}, c2{0.0};  // var(t) = c0 + c1 t + c2 t^2/2
};

// expr = sum coeff_i * ode_var_i + rest; nullopt if nonlinear in ODE vars.
struct MultiLinear {
  std::map<std::string, double> coeffs;
  double rest{0.0};
};

std::optional<MultiLinear> multi_linearize(const Term& t,
                                           const std::set<std::string>& vars,
                                           const Valuation& s) {
  switch (t.kind) {
    case Term::Kind::Var:
      if (vars.count(t.name)) {
        MultiLinear m;
        m.coeffs[t.name] = 1.0;
        return m;
      }
      return MultiLinear{{}, fetch(s, t.name)};
    case Term::Kind::Const:
      return MultiLinear{{}, rational_to_double(t.value)};
    case Term::Kind::Add: {
      auto l = multi_linearize(*t.lhs, vars, s), r = multi_linearize(*t.rhs, vars, s);
      if (!l || !r) return std::nullopt;
      for (const auto& [k, v] : r->coeffs) l->coeffs[k] += v;
      l->rest += r->rest;
      return l;
    }
    case Term::Kind::Neg: {
      auto l = multi_linearize(*t.lhs, vars, s);
      if (!l) return std::nullopt;
      for (auto& [k, v] : l->coeffs) v = -v;
      l->rest = -l->rest;
      return l;
    }
    case Term::Kind::Mul: {
      auto l = multi_linearize(*t.lhs, vars, s), r = multi_linearize(*t.rhs, vars, s);
      if (!l || !r) return std::nullopt;
      const bool lconst = l->coeffs.empty(), rconst = r->coeffs.empty();
      if (!lconst && !rconst) return std::nullopt;
      const MultiLinear& lin = lconst ? *r : *l;
      const double k = lconst ? l->rest : r->rest;
      MultiLinear out;
      out.rest = lin.rest * k;
      for (const auto& [name, v] : lin.coeffs)
        if (v * k != 0.0) out.coeffs[name] = v * k;
      return out;
    }
    case Term::Kind::Pow: {
      auto l = multi_linearize(*t.lhs, vars, s);
      if (!l) return std::nullopt;
      if (!l->coeffs.empty()) {
        if (t.exponent == 1) return l;
        return std::nullopt;
      }
      return MultiLinear{{}, ipow(l->rest, t.exponent)};
    }
  }
  return std::nullopt;
}

// Polynomial in t of degree <= 2 (coeffs[k] multiplies t^k).
struct Poly {
  double c[3]{0.0, 0.0, 0.0};
  double at(double t) const { return c[0] + t * (c[1] + t * c[2]); }
};

Poly poly_add(const Poly& a, const Poly& b) {
  Poly p;
  for (int k = 0; k < 3; ++k) p.c[k] = a.c[k] + b.c[k];
  return p;
}
Poly poly_neg(const Poly& a) {
  Poly p;
  for (int k = 0; k < 3; ++k) p.c[k] = -a.c[k];
  return p;
}
std::optional<Poly> poly_mul(const Poly& a, const Poly& b) {
  Poly p;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const double term = a.c[i] * b.c[j];
      if (term == 0.0) continue;
      if (i + j > 2) return std::nullopt;  // beyond quadratic root isolation
      p.c[i + j] += term;
    }
  return p;
}

// Term -> polynomial in t under the flow substitution.
std::optional<Poly> term_poly(const Term& t, const std::map<std::string, Poly>& subst,
                              const Valuation& s) {
  switch (t.kind) {
    case Term::Kind::Var: {
      const auto it = subst.find(t.name);
      if (it != subst.end()) return it->second;
      return Poly{{fetch(s, t.name), 0.0, 0.0}};
    }
    case Term::Kind::Const:
      return Poly{{rational_to_double(t.value), 0.0, 0.0}};
    case Term::Kind::Add: {
      auto l = term_poly(*t.lhs, subst, s), r = term_poly(*t.rhs, subst, s);
      if (!l || !r) return std::nullopt;
      return poly_add(*l, *r);
    }
    case Term::Kind::Neg: {
      auto l = term_poly(*t.lhs, subst, s);
      if (!l) return std::nullopt;
      return poly_neg(*l);
    }
    case Term::Kind::Mul: {
      auto l = term_poly(*t.lhs, subst, s), r = term_poly(*t.rhs, subst, s);
      if (!l || !r) return std::nullopt;
      return poly_mul(*l, *r);
    }
    case Term::Kind::Pow: {
      auto l = term_poly(*t.lhs, subst, s);
      if (!l) return std::nullopt;
      Poly acc{{1.0, 0.0, 0.0}};
      for (int k = 0; k < t.exponent; ++k) {
        auto m = poly_mul(acc, *l);
        if (!m) return std::nullopt;
        acc = *m;
      }
      return acc;
    }
  }
  return std::nullopt;
}

struct DomainAtom {
  const Formula* cmp;  // the comparison node
  Poly poly;           // lhs - rhs as polynomial in t
};

// Real roots of a degree-<=2 polynomial, ascending.
void poly_roots(const Poly& p, std::vector<double>& out) {
  if (p.c[2] != 0.0) {
    const double a = p.c[2], b = p.c[1], c = p.c[0];
    const double disc = b * b - 4.0 * a * c;
    if (disc < 0.0) return;
    const double sq = std::sqrt(disc);
    const double q = -0.5 * (b + (b >= 0.0 ? sq : -sq));
    double r1 = q / a;
    double r2 = (q != 0.0) ? c / q : r1;
    if (r1 > r2) std::swap(r1, r2);
    out.push_back(r1);
    if (r2 != r1) out.push_back(r2);
  } else if (p.c[1] != 0.0) {
    out.push_back(-p.c[0] / p.c[1]);
  }
}

struct OdeSolution {
  std::vector<FlowQuad> quads;
  std::vector<DomainAtom> atoms;
  const Formula* domain;
  double t_max{0.0};
  bool inclusive{true};
  bool empty{false};  // domain false at t = 0: no run at all
  std::vector<const Formula*> binding;  // atoms whose root is exactly t_max
};

bool domain_holds_at(const Formula& f, const std::vector<DomainAtom>& atoms, double t);

bool atom_truth(const Formula& cmp, const std::vector<DomainAtom>& atoms, double t) {
  for (const auto& a : atoms)
    if (a.cmp == &cmp) return cmp_holds(cmp.op, a.poly.at(t), 0.0);
  return false;
}

bool domain_holds_at(const Formula& f, const std::vector<DomainAtom>& atoms,
                     double t) {
  switch (f.kind) {
    case Formula::Kind::Cmp: return atom_truth(f, atoms, t);
    case Formula::Kind::Not: return !domain_holds_at(*f.l, atoms, t);
    case Formula::Kind::And:
      return domain_holds_at(*f.l, atoms, t) && domain_holds_at(*f.r, atoms, t);
    case Formula::Kind::Or:
      return domain_holds_at(*f.l, atoms, t) || domain_holds_at(*f.r, atoms, t);
    case Formula::Kind::Imp:
      return !domain_holds_at(*f.l, atoms, t) || domain_holds_at(*f.r, atoms, t);
    case Formula::Kind::Iff:
      return domain_holds_at(*f.l, atoms, t) == domain_holds_at(*f.r, atoms, t);
    case Formula::Kind::True: return true;
    case Formula::Kind::False: return false;
    default:
      throw UnsupportedConstruct("quantifier in evolution domain");
  }
}

void collect_atoms(const FormulaPtr& f, std::vector<const Formula*>& out) {
  switch (f->kind) {
    case Formula::Kind::Cmp:
      out.push_back(f.get());
      return;
    case Formula::Kind::Not:
      collect_atoms(f->l, out);
      return;
    case Formula::Kind::And:
    case Formula::Kind::Or:
    case Formula::Kind::Imp:
    case Formula::Kind::Iff:
      collect_atoms(f->l, out);
      collect_atoms(f->r, out);
      return;
    case Formula::Kind::True:
    case Formula::Kind::False:
      return;
    default:
      throw UnsupportedConstruct("quantifier in evolution domain");
  }
}

OdeSolution solve_ode(const Program& ode, const Valuation& s) {
  std::set<std::string> vars;
  for (const auto& fl : ode.flows) vars.insert(fl.var);
  if (vars.size() != ode.flows.size())
    throw UnsupportedConstruct("duplicate variable in ODE system");

  // Rates as linear forms over the ODE variables; nilpotency of order <= 2:
  // variables appearing in a rate must themselves have constant rates.
  std::map<std::string, MultiLinear> rate;
  for (const auto& fl : ode.flows) {
    auto m = multi_linearize(*fl.rhs, vars, s);
    if (!m)
      throw UnsupportedConstruct("ODE right-hand side not linear in flow variables");
    rate[fl.var] = *m;
  }
  OdeSolution sol;
  for (const auto& fl : ode.flows) {
    const MultiLinear& m = rate[fl.var];
    FlowQuad q;
    q.var = fl.var;
    q.c0 = fetch(s, fl.var);
    q.c1 = m.rest;
    q.c2 = 0.0;
    for (const auto& [dep, coeff] : m.coeffs) {
      const MultiLinear& dm = rate[dep];
      if (!dm.coeffs.empty())
        throw UnsupportedConstruct("ODE system is not nilpotent of order <= 2");
      q.c1 += coeff * fetch(s, dep);
      q.c2 += coeff * dm.rest;
    }
    sol.quads.push_back(q);
  }

  std::map<std::string, Poly> subst;
  for (const auto& q : sol.quads)
    subst[q.var] = Poly{{q.c0, q.c1, 0.5 * q.c2}};

  sol.domain = ode.formula.get();
  std::vector<const Formula*> atom_nodes;
  collect_atoms(ode.formula, atom_nodes);
  for (const Formula* cmp : atom_nodes) {
    auto lp = term_poly(*cmp->tl, subst, s);
    auto rp = term_poly(*cmp->tr, subst, s);
    if (!lp || !rp)
      throw UnsupportedConstruct("evolution domain atom beyond quadratic in time");
    sol.atoms.push_back({cmp, poly_add(*lp, poly_neg(*rp))});
  }

  if (!domain_holds_at(*sol.domain, sol.atoms, 0.0)) {
    sol.empty = true;
    return sol;
  }

  // Maximal duration by root isolation: walk the boundary candidates in
  // order; the domain holds on closed segments whose interiors test true.
  std::vector<std::pair<double, const Formula*>> roots;
  for (const auto& a : sol.atoms) {
    std::vector<double> rs;
    poly_roots(a.poly, rs);
    for (double r : rs)
      if (r > 0.0 && std::isfinite(r)) roots.emplace_back(r, a.cmp);
  }
  std::sort(roots.begin(), roots.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });

  double reach = 0.0;
  bool open_end = false;
  bool unbounded = true;
  for (std::size_t i = 0; i < roots.size(); ++i) {
    const double b = roots[i].first;
    if (b > reach) {
      const double mid = reach + 0.5 * (b - reach);
      if (!domain_holds_at(*sol.domain, sol.atoms, mid)) {
        unbounded = false;
        open_end = false;
        break;
      }
      if (!domain_holds_at(*sol.domain, sol.atoms, b)) {
        reach = b;
        open_end = true;
        unbounded = false;
        break;
      }
      reach = b;
    }
    // Passing through a boundary point where the domain still holds.
  }
  if (unbounded) {
    const double probe = (roots.empty() ? 1.0 : roots.back().first + 1.0) * 2.0;
    if (domain_holds_at(*sol.domain, sol.atoms, probe))
      throw UnsupportedConstruct("unbounded ODE duration (domain never closes)");
  }
  sol.t_max = reach;
  sol.inclusive = !open_end;
  for (const auto& [r, cmp] : roots)
    if (r == sol.t_max) sol.binding.push_back(cmp);
  return sol;
}

bool term_is_ode_free(const Term& t, const std::set<std::string>& vars) {
  return !mentions_any(t, vars);
}

// Advance the valuation along the flow; at the inclusive boundary, variables
// bound by a simple atom (var cmp ode-free-term) snap exactly to the bound,
// removing the root-isolation residual (v = 0 at a stop, tau = T).
void advance_flow(Valuation& s, const OdeSolution& sol, double t) {
  std::set<std::string> vars;
  for (const auto& q : sol.quads) vars.insert(q.var);
  Valuation pre = s;
  for (const auto& q : sol.quads)
    s[q.var] = q.c0 + t * (q.c1 + 0.5 * t * q.c2);
  if (t == sol.t_max && sol.inclusive) {
    for (const Formula* cmp : sol.binding) {
      if (cmp->tl->kind == Term::Kind::Var && vars.count(cmp->tl->name) &&
          term_is_ode_free(*cmp->tr, vars)) {
        s[cmp->tl->name] = eval_term(*cmp->tr, pre);
      } else if (cmp->tr->kind == Term::Kind::Var && vars.count(cmp->tr->name) &&
                 term_is_ode_free(*cmp->tl, vars)) {
        s[cmp->tr->name] = eval_term(*cmp->tl, pre);
      }
    }
  }
}

// --------------------------------------------------------------------------
// Exploration engine.
// --------------------------------------------------------------------------

std::uint64_t hash_log(const EventLog& log, std::uint64_t seed) {
  std::uint64_t h = 0xcbf29ce484222325ull ^ seed;
  const auto mix = [&](std::uint64_t x) {
    h ^= x;
    h *= 0x100000001b3ull;
  };
  for (const auto& e : log) {
    mix(static_cast<std::uint64_t>(e.kind) + 1);
    std::uint64_t bits;
    static_assert(sizeof bits == sizeof e.value);
    std::memcpy(&bits, &e.value, sizeof bits);
    mix(bits);
  }
  return h;
}

struct StackItem {
  ProgramPtr prog;
  int loop_remaining{-1};  // -1 = fresh entry; counts down on Loop items
};

struct Config {
  std::vector<StackItem> stack;  // back = next statement
  Valuation val;
  EventLog log;
};

class Engine {
 public:
  Engine(const ExplorationBudget& budget, FormulaPtr monitor_post)
      : budget_(budget), monitor_post_(std::move(monitor_post)) {}

  RunResult explore(const ProgramPtr& prog, const Valuation& initial) {
    RunResult result;
    std::deque<Config> queue;
    queue.push_back({{{prog, -1}}, initial, {}});
    std::size_t created = 1;

    const auto spawn = [&](Config c) {
      if (created >= budget_.max_branches) {
        result.budget_exhausted = true;
        return;
      }
      ++created;
      queue.push_back(std::move(c));
    };

    while (!queue.empty()) {
      Config cfg = std::move(queue.front());
      queue.pop_front();

      if (cfg.stack.empty()) {
        result.outcomes.push_back({false, std::move(cfg.val), std::move(cfg.log)});
        continue;
      }
      StackItem item = std::move(cfg.stack.back());
      cfg.stack.pop_back();
      const Program& p = *item.prog;

      switch (p.kind) {
        case Program::Kind::Assign:
          cfg.val[p.var] = eval_term(*p.term, cfg.val);
          spawn(std::move(cfg));
          break;

        case Program::Kind::Test:
          if (eval_formula(*p.formula, cfg.val)) {
            spawn(std::move(cfg));
          } else {
            result.outcomes.push_back({true, std::move(cfg.val), std::move(cfg.log)});
          }
          break;

        case Program::Kind::NondetAssign: {
          // The adjacent bounding test may sit behind sequencing nodes on the
          // continuation; the next executable statement decides.
          const Program* next_stmt = nullptr;
          if (!cfg.stack.empty()) {
            const Program* q = cfg.stack.back().prog.get();
            while (q->kind == Program::Kind::Seq) q = q->first.get();
            if (q->kind == Program::Kind::Test) next_stmt = q;
          }
          if (!next_stmt)
            throw BudgetError("nondeterministic assignment to '" + p.var +
                              "' has no adjacent bounding test");
          std::vector<FormulaPtr> conjuncts;
          collect_conjuncts(next_stmt->formula, conjuncts);
          SampleInterval iv = bounds_for(conjuncts, p.var, cfg.val);
          if (!iv.constrained)
            throw BudgetError("nondeterministic assignment to '" + p.var +
                              "' is unbounded (no linear bound in the adjacent test)");
          if (iv.lo == -kInf && iv.hi == kInf)
            throw BudgetError("nondeterministic assignment to '" + p.var +
                              "' is unbounded in both directions");
          if (iv.lo == -kInf) iv.lo = iv.hi - budget_.half_interval_span;
          if (iv.hi == kInf) iv.hi = iv.lo + budget_.half_interval_span;

          std::vector<double> samples;
          if (iv.empty) {
            samples.push_back(iv.lo);  // will abort at the test
          } else if (iv.lo == iv.hi) {
            samples.push_back(tighten(conjuncts, p.var, cfg.val, iv.lo, iv.hi));
          } else {
            samples.push_back(tighten(conjuncts, p.var, cfg.val, iv.lo, iv.hi));
            if (budget_.nondet_samples > 1)
              samples.push_back(tighten(conjuncts, p.var, cfg.val, iv.hi, iv.lo));
            Rng rng(hash_log(cfg.log, budget_.seed));
            for (int k = 2; k < budget_.nondet_samples; ++k)
              samples.push_back(rng.uniform(iv.lo, iv.hi));
          }
          for (double v : samples) {
            Config child = cfg;
            child.val[p.var] = v;
            child.log.push_back({Event::Kind::Sample, v});
            spawn(std::move(child));
          }
          break;
        }

        case Program::Kind::Ode: {
          const OdeSolution sol = solve_ode(p, cfg.val);
          if (sol.empty) {
            result.outcomes.push_back({true, std::move(cfg.val), std::move(cfg.log)});
            break;
          }
          double hi = sol.t_max;
          if (!sol.inclusive && hi > 0.0) hi = std::nextafter(hi, 0.0);
          std::vector<double> durations{0.0};
          if (hi > 0.0) {
            durations.push_back(hi);
            Rng rng(hash_log(cfg.log, budget_.seed ^ 0x9e37ull));
            for (int k = 2; k < budget_.ode_durations; ++k)
              durations.push_back(rng.uniform(0.0, hi));
          }
          // Dense postcondition monitor: fork the first violating grid point
          // (a dyadic grid, so enlarging the budget refines it in place).
          if (monitor_post_ && budget_.monitor_points >= 2 && hi > 0.0) {
            int L = 1;
            while ((1 << L) < budget_.monitor_points - 1 && L < 20) ++L;
            const int n = 1 << L;
            for (int j = 1; j < n; ++j) {
              const double tj = hi * j / n;
              Valuation probe = cfg.val;
              advance_flow(probe, sol, tj);
              if (!eval_formula(*monitor_post_, probe)) {
                durations.push_back(tj);
                break;
              }
            }
          }
          for (double d : durations) {
            Config child = cfg;
            advance_flow(child.val, sol, d);
            child.log.push_back({Event::Kind::Duration, d});
            spawn(std::move(child));
          }
          break;
        }

        case Program::Kind::Choice: {
          Config left = cfg;
          left.stack.push_back({p.first, -1});
          left.log.push_back({Event::Kind::ChoiceLeft, 0.0});
          spawn(std::move(left));
          cfg.stack.push_back({p.second, -1});
          cfg.log.push_back({Event::Kind::ChoiceRight, 0.0});
          spawn(std::move(cfg));
          break;
        }

        case Program::Kind::Seq:
          cfg.stack.push_back({p.second, -1});
          cfg.stack.push_back({p.first, -1});
          spawn(std::move(cfg));
          break;

        case Program::Kind::Loop: {
          const int remaining =
              item.loop_remaining < 0 ? budget_.loop_depth : item.loop_remaining;
          Config exit = cfg;
          exit.log.push_back({Event::Kind::LoopExit, 0.0});
          spawn(std::move(exit));
          if (remaining > 0) {
            cfg.stack.push_back({item.prog, remaining - 1});
            cfg.stack.push_back({p.first, -1});
            cfg.log.push_back({Event::Kind::LoopIter, 0.0});
            spawn(std::move(cfg));
          }
          break;
        }
      }
    }
    return result;
  }

 private:
  ExplorationBudget budget_;
  FormulaPtr monitor_post_;
};

}  // namespace

RunResult run(const ProgramPtr& prog, const Valuation& initial,
              const ExplorationBudget& budget, FormulaPtr monitor_post) {
  Engine e(budget, std::move(monitor_post));
  return e.explore(prog, initial);
}

namespace {

class Replayer {
 public:
  Replayer(const EventLog& log) : log_(log) {}

  RunOutcome go(const ProgramPtr& prog, const Valuation& initial) {
    RunOutcome out;
    out.val = initial;
    std::vector<ProgramPtr> stack{prog};
    while (!stack.empty()) {
      ProgramPtr cur = stack.back();
      stack.pop_back();
      const Program& p = *cur;
      switch (p.kind) {
        case Program::Kind::Assign:
          out.val[p.var] = eval_term(*p.term, out.val);
          break;
        case Program::Kind::Test:
          if (!eval_formula(*p.formula, out.val)) {
            out.aborted = true;
            out.log = log_;
            return out;
          }
          break;
        case Program::Kind::NondetAssign:
          out.val[p.var] = take(Event::Kind::Sample).value;
          break;
        case Program::Kind::Ode: {
          const OdeSolution sol = solve_ode(p, out.val);
          if (sol.empty) {
            out.aborted = true;
            out.log = log_;
            return out;
          }
          advance_flow(out.val, sol, take(Event::Kind::Duration).value);
          break;
        }
        case Program::Kind::Choice: {
          const Event e = take_choice();
          stack.push_back(e.kind == Event::Kind::ChoiceLeft ? p.first : p.second);
          break;
        }
        case Program::Kind::Seq:
          stack.push_back(p.second);
          stack.push_back(p.first);
          break;
        case Program::Kind::Loop: {
          const Event e = take_loop();
          if (e.kind == Event::Kind::LoopIter) {
            stack.push_back(cur);
            stack.push_back(p.first);
          }
          break;
        }
      }
    }
    out.log = log_;
    return out;
  }

 private:
  Event take(Event::Kind want) {
    if (pos_ >= log_.size() || log_[pos_].kind != want)
      throw std::runtime_error("replay log does not match the program");
    return log_[pos_++];
  }
  Event take_choice() {
    if (pos_ >= log_.size() || (log_[pos_].kind != Event::Kind::ChoiceLeft &&
                                log_[pos_].kind != Event::Kind::ChoiceRight))
      throw std::runtime_error("replay log does not match the program");
    return log_[pos_++];
  }
  Event take_loop() {
    if (pos_ >= log_.size() || (log_[pos_].kind != Event::Kind::LoopIter &&
                                log_[pos_].kind != Event::Kind::LoopExit))
      throw std::runtime_error("replay log does not match the program");
    return log_[pos_++];
  }

  const EventLog& log_;
  std::size_t pos_{0};
};

}  // namespace

RunOutcome replay(const ProgramPtr& prog, const Valuation& initial,
                  const EventLog& log) {
  return Replayer(log).go(prog, initial);
}

BoxVerdict check_box(const FormulaPtr& init, const ProgramPtr& prog,
                     const FormulaPtr& post, const ExplorationBudget& budget,
                     const InitSampler& sampler) {
  BoxVerdict verdict;
  Rng rng(mix_seed(budget.seed, 0xb0c5ull));
  for (int i = 0; i < sampler.samples; ++i) {
    Valuation v;
    for (const auto& r : sampler.ranges) {
      double x;
      if (i == 0)
        x = r.lo;
      else if (i == 1)
        x = r.hi;
      else
        x = rng.uniform(r.lo, r.hi);
      v[r.var] = x;
    }
    ++verdict.stats.init_candidates;
    if (!eval_formula(*init, v)) continue;
    ++verdict.stats.init_admitted;

    const RunResult result = run(prog, v, budget, post);
    verdict.budget_exhausted = verdict.budget_exhausted || result.budget_exhausted;
    for (const auto& out : result.outcomes) {
      if (out.aborted) {
        ++verdict.stats.aborted_runs;
        continue;
      }
      ++verdict.stats.completed_runs;
      if (!eval_formula(*post, out.val)) {
        verdict.found = true;
        verdict.counterexample = Counterexample{v, out.log, out.val};
        return verdict;
      }
    }
  }
  return verdict;
}

namespace {
std::string fmt_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}
}  // namespace

std::string serialize_counterexample(const Counterexample& cex) {
  std::ostringstream os;
  for (const auto& [name, value] : cex.initial)
    os << "init " << name << " " << fmt_double(value) << "\n";
  for (const auto& e : cex.log) {
    switch (e.kind) {
      case Event::Kind::ChoiceLeft: os << "choice L\n"; break;
      case Event::Kind::ChoiceRight: os << "choice R\n"; break;
      case Event::Kind::LoopIter: os << "loop iter\n"; break;
      case Event::Kind::LoopExit: os << "loop exit\n"; break;
      case Event::Kind::Sample: os << "sample " << fmt_double(e.value) << "\n"; break;
      case Event::Kind::Duration:
        os << "duration " << fmt_double(e.value) << "\n";
        break;
    }
  }
  for (const auto& [name, value] : cex.final_state)
    os << "final " << name << " " << fmt_double(value) << "\n";
  return os.str();
}

Counterexample parse_counterexample(std::string_view text) {
  Counterexample cex;
  std::istringstream is{std::string(text)};
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string head;
    ls >> head;
    if (head == "init" || head == "final") {
      std::string name, value;
      ls >> name >> value;
      (head == "init" ? cex.initial : cex.final_state)[name] = std::strtod(value.c_str(), nullptr);
    } else if (head == "choice") {
      std::string side;
      ls >> side;
      cex.log.push_back({side == "L" ? Event::Kind::ChoiceLeft : Event::Kind::ChoiceRight, 0.0});
    } else if (head == "loop") {
      std::string what;
      ls >> what;
      cex.log.push_back({what == "iter" ? Event::Kind::LoopIter : Event::Kind::LoopExit, 0.0});
    } else if (head == "sample" || head == "duration") {
      std::string value;
      ls >> value;
      cex.log.push_back({head == "sample" ? Event::Kind::Sample : Event::Kind::Duration,
                         std::strtod(value.c_str(), nullptr)});
    } else {
      throw std::runtime_error("bad replay line: " + line);
    }
  }
  return cex;
}

}  // namespace scw::hp
