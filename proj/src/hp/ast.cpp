#include "scw/hp/ast.hpp"

namespace scw::hp {

namespace {
std::shared_ptr<Term> mk_term(Term::Kind k) {
  auto t = std::make_shared<Term>();
  t->kind = k;
  return t;
}
std::shared_ptr<Formula> mk_formula(Formula::Kind k) {
  auto f = std::make_shared<Formula>();
  f->kind = k;
  return f;
}
std::shared_ptr<Program> mk_program(Program::Kind k) {
  auto p = std::make_shared<Program>();
  p->kind = k;
  return p;
}
}  // namespace

TermPtr t_var(std::string name) {
  auto t = mk_term(Term::Kind::Var);
  t->name = std::move(name);
  return t;
}
TermPtr t_const(Rational value) {
  auto t = mk_term(Term::Kind::Const);
  t->value = std::move(value);
  return t;
}
TermPtr t_add(TermPtr l, TermPtr r) {
  auto t = mk_term(Term::Kind::Add);
  t->lhs = std::move(l);
  t->rhs = std::move(r);
  return t;
}
TermPtr t_mul(TermPtr l, TermPtr r) {
  auto t = mk_term(Term::Kind::Mul);
  t->lhs = std::move(l);
  t->rhs = std::move(r);
  return t;
}
TermPtr t_neg(TermPtr e) {
  auto t = mk_term(Term::Kind::Neg);
  t->lhs = std::move(e);
  return t;
}
TermPtr t_pow(TermPtr base, int exponent) {
  if (exponent < 1) throw std::invalid_argument("power exponent must be positive");
  auto t = mk_term(Term::Kind::Pow);
  t->lhs = std::move(base);
  t->exponent = exponent;
  return t;
}
TermPtr t_sub(TermPtr l, TermPtr r) { return t_add(std::move(l), t_neg(std::move(r))); }

bool equal(const Term& a, const Term& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Term::Kind::Var: return a.name == b.name;
    case Term::Kind::Const: return a.value == b.value;
    case Term::Kind::Add:
    case Term::Kind::Mul: return equal(*a.lhs, *b.lhs) && equal(*a.rhs, *b.rhs);
    case Term::Kind::Neg: return equal(*a.lhs, *b.lhs);
    case Term::Kind::Pow: return a.exponent == b.exponent && equal(*a.lhs, *b.lhs);
  }
  return false;
}

FormulaPtr f_cmp(CmpOp op, TermPtr l, TermPtr r) {
  auto f = mk_formula(Formula::Kind::Cmp);
  f->op = op;
  f->tl = std::move(l);
  f->tr = std::move(r);
  return f;
}
FormulaPtr f_not(FormulaPtr x) {
  auto f = mk_formula(Formula::Kind::Not);
  f->l = std::move(x);
  return f;
}
namespace {
FormulaPtr binary(Formula::Kind k, FormulaPtr l, FormulaPtr r) {
  auto f = mk_formula(k);
  f->l = std::move(l);
  f->r = std::move(r);
  return f;
}
}  // namespace
FormulaPtr f_and(FormulaPtr l, FormulaPtr r) { return binary(Formula::Kind::And, std::move(l), std::move(r)); }
FormulaPtr f_or(FormulaPtr l, FormulaPtr r) { return binary(Formula::Kind::Or, std::move(l), std::move(r)); }
FormulaPtr f_imp(FormulaPtr l, FormulaPtr r) { return binary(Formula::Kind::Imp, std::move(l), std::move(r)); }
FormulaPtr f_iff(FormulaPtr l, FormulaPtr r) { return binary(Formula::Kind::Iff, std::move(l), std::move(r)); }
FormulaPtr f_true() { return mk_formula(Formula::Kind::True); }
FormulaPtr f_false() { return mk_formula(Formula::Kind::False); }
FormulaPtr f_forall(std::string var, FormulaPtr body) {
  auto f = mk_formula(Formula::Kind::Forall);
  f->var = std::move(var);
  f->l = std::move(body);
  return f;
}
FormulaPtr f_exists(std::string var, FormulaPtr body) {
  auto f = mk_formula(Formula::Kind::Exists);
  f->var = std::move(var);
  f->l = std::move(body);
  return f;
}

bool equal(const Formula& a, const Formula& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Formula::Kind::Cmp:
      return a.op == b.op && equal(*a.tl, *b.tl) && equal(*a.tr, *b.tr);
    case Formula::Kind::Not: return equal(*a.l, *b.l);
    case Formula::Kind::And:
    case Formula::Kind::Or:
    case Formula::Kind::Imp:
    case Formula::Kind::Iff: return equal(*a.l, *b.l) && equal(*a.r, *b.r);
    case Formula::Kind::True:
    case Formula::Kind::False: return true;
    case Formula::Kind::Forall:
    case Formula::Kind::Exists: return a.var == b.var && equal(*a.l, *b.l);
  }
  return false;
}

ProgramPtr p_assign(std::string var, TermPtr value) {
  auto p = mk_program(Program::Kind::Assign);
  p->var = std::move(var);
  p->term = std::move(value);
  return p;
}
ProgramPtr p_nondet(std::string var) {
  auto p = mk_program(Program::Kind::NondetAssign);
  p->var = std::move(var);
  return p;
}
ProgramPtr p_test(FormulaPtr condition) {
  auto p = mk_program(Program::Kind::Test);
  p->formula = std::move(condition);
  return p;
}
ProgramPtr p_ode(std::vector<OdeFlow> flows, FormulaPtr domain) {
  auto p = mk_program(Program::Kind::Ode);
  p->flows = std::move(flows);
  p->formula = std::move(domain);
  return p;
}
ProgramPtr p_choice(ProgramPtr a, ProgramPtr b) {
  auto p = mk_program(Program::Kind::Choice);
  p->first = std::move(a);
  p->second = std::move(b);
  return p;
}
ProgramPtr p_seq(ProgramPtr a, ProgramPtr b) {
  auto p = mk_program(Program::Kind::Seq);
  p->first = std::move(a);
  p->second = std::move(b);
  return p;
}
ProgramPtr p_loop(ProgramPtr body) {
  auto p = mk_program(Program::Kind::Loop);
  p->first = std::move(body);
  return p;
}

bool equal(const Program& a, const Program& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Program::Kind::Assign:
      return a.var == b.var && equal(*a.term, *b.term);
    case Program::Kind::NondetAssign: return a.var == b.var;
    case Program::Kind::Test: return equal(*a.formula, *b.formula);
    case Program::Kind::Ode: {
      if (a.flows.size() != b.flows.size()) return false;
      for (std::size_t i = 0; i < a.flows.size(); ++i) {
        if (a.flows[i].var != b.flows[i].var) return false;
        if (!equal(*a.flows[i].rhs, *b.flows[i].rhs)) return false;
      }
      return equal(*a.formula, *b.formula);
    }
    case Program::Kind::Choice:
    case Program::Kind::Seq:
      return equal(*a.first, *b.first) && equal(*a.second, *b.second);
    case Program::Kind::Loop: return equal(*a.first, *b.first);
  }
  return false;
}

ProgramPtr desugar_if(FormulaPtr condition, ProgramPtr then_branch,
                      ProgramPtr else_branch) {
  return p_choice(p_seq(p_test(condition), std::move(then_branch)),
                  p_seq(p_test(f_not(condition)), std::move(else_branch)));
}

}  // namespace scw::hp
