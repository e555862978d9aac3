#include <sstream>

#include "scw/hp/ast.hpp"

namespace scw::hp {

namespace {

// Term precedence: Add < Mul < Neg < Pow < atom. Add/Mul print left-
// associatively, so a right child at the same level needs parentheses.
constexpr int kAdd = 1, kMul = 2, kNeg = 3, kPow = 4, kAtom = 5;

int term_prec(const Term& t) {
  switch (t.kind) {
    case Term::Kind::Add: return kAdd;
    case Term::Kind::Mul: return kMul;
    case Term::Kind::Neg: return kNeg;
    case Term::Kind::Pow: return kPow;
    default: return kAtom;
  }
}

void print_term(std::ostream& os, const Term& t, int min_prec) {
  const int prec = term_prec(t);
  const bool parens = prec < min_prec;
  if (parens) os << "(";
  switch (t.kind) {
    case Term::Kind::Var:
      os << t.name;
      break;
    case Term::Kind::Const:
      os << rational_to_decimal(t.value);
      break;
    case Term::Kind::Add:
      print_term(os, *t.lhs, kAdd);
      // a + (-b) renders as subtraction.
      if (t.rhs->kind == Term::Kind::Neg) {
        os << " - ";
        print_term(os, *t.rhs->lhs, kAdd + 1);
      } else {
        os << " + ";
        print_term(os, *t.rhs, kAdd + 1);
      }
      break;
    case Term::Kind::Mul:
      print_term(os, *t.lhs, kMul);
      os << "*";
      print_term(os, *t.rhs, kMul + 1);
      break;
    case Term::Kind::Neg:
      os << "-";
      print_term(os, *t.lhs, kNeg);
      break;
    case Term::Kind::Pow:
      print_term(os, *t.lhs, kAtom);  // base must be atomic or parenthesized
      os << "^" << t.exponent;
      break;
  }
  if (parens) os << ")";
}

constexpr int kIff = 1, kImp = 2, kOr = 3, kAnd = 4, kFAtom = 5;

int formula_prec(const Formula& f) {
  switch (f.kind) {
    case Formula::Kind::Iff: return kIff;
    case Formula::Kind::Imp: return kImp;
    case Formula::Kind::Or: return kOr;
    case Formula::Kind::And: return kAnd;
    default: return kFAtom;
  }
}

const char* cmp_text(CmpOp op) {
  switch (op) {
    case CmpOp::Ge: return " >= ";
    case CmpOp::Eq: return " = ";
    case CmpOp::Gt: return " > ";
    case CmpOp::Le: return " <= ";
    case CmpOp::Lt: return " < ";
  }
  return "?";
}

void print_formula(std::ostream& os, const Formula& f, int min_prec) {
  const int prec = formula_prec(f);
  const bool parens = prec < min_prec;
  if (parens) os << "(";
  switch (f.kind) {
    case Formula::Kind::Cmp:
      print_term(os, *f.tl, kAdd);
      os << cmp_text(f.op);
      print_term(os, *f.tr, kAdd);
      break;
    case Formula::Kind::Not:
      os << "!(";
      print_formula(os, *f.l, kIff);
      os << ")";
      break;
    case Formula::Kind::And:
      print_formula(os, *f.l, kAnd);
      os << " & ";
      print_formula(os, *f.r, kAnd + 1);
      break;
    case Formula::Kind::Or:
      print_formula(os, *f.l, kOr);
      os << " | ";
      print_formula(os, *f.r, kOr + 1);
      break;
    case Formula::Kind::Imp:
      // Right-associative.
      print_formula(os, *f.l, kImp + 1);
      os << " -> ";
      print_formula(os, *f.r, kImp);
      break;
    case Formula::Kind::Iff:
      print_formula(os, *f.l, kIff);
      os << " <-> ";
      print_formula(os, *f.r, kIff + 1);
      break;
    case Formula::Kind::True:
      os << "true";
      break;
    case Formula::Kind::False:
      os << "false";
      break;
    case Formula::Kind::Forall:
    case Formula::Kind::Exists:
      os << (f.kind == Formula::Kind::Forall ? "forall " : "exists ") << f.var
         << " (";
      print_formula(os, *f.l, kIff);
      os << ")";
      break;
  }
  if (parens) os << ")";
}

// Program precedence: Choice < Seq < atom. Seq prints right-associatively
// (a; b; c); a left-nested Seq or any Choice child of Seq gets braces.
constexpr int kChoice = 1, kSeq = 2, kPAtom = 3;

int program_prec(const Program& p) {
  switch (p.kind) {
    case Program::Kind::Choice: return kChoice;
    case Program::Kind::Seq: return kSeq;
    default: return kPAtom;
  }
}

void print_program(std::ostream& os, const Program& p, int min_prec) {
  const int prec = program_prec(p);
  const bool braces = prec < min_prec;
  if (braces) os << "{";
  switch (p.kind) {
    case Program::Kind::Assign:
      os << p.var << " := ";
      print_term(os, *p.term, kAdd);
      break;
    case Program::Kind::NondetAssign:
      os << p.var << " := *";
      break;
    case Program::Kind::Test:
      os << "?(";
      print_formula(os, *p.formula, kIff);
      os << ")";
      break;
    case Program::Kind::Ode: {
      os << "{";
      bool sep = false;
      for (const auto& flow : p.flows) {
        if (sep) os << ", ";
        sep = true;
        os << flow.var << "'=";
        print_term(os, *flow.rhs, kAdd);
      }
      if (p.formula->kind != Formula::Kind::True) {
        os << " & ";
        print_formula(os, *p.formula, kIff);
      }
      os << "}";
      break;
    }
    case Program::Kind::Choice:
      print_program(os, *p.first, kChoice);
      os << " ++ ";
      print_program(os, *p.second, kChoice + 1);
      break;
    case Program::Kind::Seq:
      print_program(os, *p.first, kSeq + 1);
      os << "; ";
      print_program(os, *p.second, kSeq);
      break;
    case Program::Kind::Loop:
      os << "{";
      print_program(os, *p.first, kChoice);
      os << "}*";
      break;
  }
  if (braces) os << "}";
}

}  // namespace

std::string pretty(const Term& t) {
  std::ostringstream os;
  print_term(os, t, kAdd);
  return os.str();
}

std::string pretty(const Formula& f) {
  std::ostringstream os;
  print_formula(os, f, kIff);
  return os.str();
}

std::string pretty(const Program& p) {
  std::ostringstream os;
  print_program(os, p, kChoice);
  return os.str();
}

}  // namespace scw::hp
