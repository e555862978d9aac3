#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "scw/rational.hpp"

namespace scw::hp {

// ---------------------------------------------------------------------------
// Terms: polynomials with rational coefficients.
// ---------------------------------------------------------------------------

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Term {
  enum class Kind { Var, Const, Add, Mul, Neg, Pow };
  Kind kind;
  std::string name;    // Var
  Rational value;      // Const
  TermPtr lhs, rhs;    // Add/Mul children; lhs also holds Neg/Pow child
  int exponent{0};     // Pow, a positive integer
};

TermPtr t_var(std::string name);
TermPtr t_const(Rational value);
TermPtr t_add(TermPtr l, TermPtr r);
TermPtr t_mul(TermPtr l, TermPtr r);
TermPtr t_neg(TermPtr e);
TermPtr t_pow(TermPtr base, int exponent);
// a - b, stored as a + (-b).
TermPtr t_sub(TermPtr l, TermPtr r);

bool equal(const Term& a, const Term& b);

// ---------------------------------------------------------------------------
// First-order formulas over terms. Quantifiers are representable (the grammar
// accepts them) but the executable subset rejects them at interpretation.
// ---------------------------------------------------------------------------

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

enum class CmpOp { Ge, Eq, Gt, Le, Lt };

struct Formula {
  enum class Kind { Cmp, Not, And, Or, Imp, Iff, True, False, Forall, Exists };
  Kind kind;
  CmpOp op{CmpOp::Ge};  // Cmp
  TermPtr tl, tr;       // Cmp operands
  FormulaPtr l, r;      // connective children (l only for Not and quantifiers)
  std::string var;      // quantified variable
};

FormulaPtr f_cmp(CmpOp op, TermPtr l, TermPtr r);
FormulaPtr f_not(FormulaPtr f);
FormulaPtr f_and(FormulaPtr l, FormulaPtr r);
FormulaPtr f_or(FormulaPtr l, FormulaPtr r);
FormulaPtr f_imp(FormulaPtr l, FormulaPtr r);
FormulaPtr f_iff(FormulaPtr l, FormulaPtr r);
FormulaPtr f_true();
FormulaPtr f_false();
FormulaPtr f_forall(std::string var, FormulaPtr body);
FormulaPtr f_exists(std::string var, FormulaPtr body);

bool equal(const Formula& a, const Formula& b);

// ---------------------------------------------------------------------------
// Hybrid programs: the seven statement forms.
// ---------------------------------------------------------------------------

struct Program;
using ProgramPtr = std::shared_ptr<const Program>;

struct OdeFlow {
  std::string var;
  TermPtr rhs;
};

struct Program {
  enum class Kind { Assign, NondetAssign, Test, Ode, Choice, Seq, Loop };
  Kind kind;
  std::string var;             // Assign/NondetAssign target
  TermPtr term;                // Assign value
  FormulaPtr formula;          // Test condition; Ode evolution domain
  std::vector<OdeFlow> flows;  // Ode
  ProgramPtr first, second;    // Choice/Seq children; first also holds Loop body
};

ProgramPtr p_assign(std::string var, TermPtr value);
ProgramPtr p_nondet(std::string var);
ProgramPtr p_test(FormulaPtr condition);
ProgramPtr p_ode(std::vector<OdeFlow> flows, FormulaPtr domain);
ProgramPtr p_choice(ProgramPtr a, ProgramPtr b);
ProgramPtr p_seq(ProgramPtr a, ProgramPtr b);
ProgramPtr p_loop(ProgramPtr body);

bool equal(const Program& a, const Program& b);

// if (P) a else b, encoded as (?P; a) ++ (?!P; b).
ProgramPtr desugar_if(FormulaPtr condition, ProgramPtr then_branch,
                      ProgramPtr else_branch);

// ---------------------------------------------------------------------------
// Pretty-printing. parse(pretty(x)) is structurally equal to x.
// ---------------------------------------------------------------------------

std::string pretty(const Term& t);
std::string pretty(const Formula& f);
std::string pretty(const Program& p);

}  // namespace scw::hp
