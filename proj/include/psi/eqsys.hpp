#pragma once

#include "psi/extint.hpp"

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace psi {

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, int col, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line) + ", col " +
                           std::to_string(col) + ": " + msg),
        line(line),
        col(col) {}
  int line, col;
};

// Parametric integer expression:
//   e ::= a | p | -p | x | e1 /\ e2 | e1 + e2 | e1 ; e2 | c*e1
// Maxima (\/) appear only as the alternatives of an equation.
struct ParamExpr;
using ExprPtr = std::shared_ptr<const ParamExpr>;

struct ParamExpr {
  enum class Kind { Const, Param, NegParam, Var, Min, Add, Guard, Scale };

  Kind kind;
  ExtInt cval;       // Const
  int index = -1;    // Param / NegParam
  std::string var;   // Var
  ExprPtr lhs, rhs;  // Min / Add / Guard; Scale uses rhs
  Int scale;         // Scale, >= 0

  static ExprPtr constant(ExtInt v);
  static ExprPtr param(int i);
  static ExprPtr neg_param(int i);
  static ExprPtr variable(std::string name);
  static ExprPtr min(ExprPtr a, ExprPtr b);
  static ExprPtr add(ExprPtr a, ExprPtr b);
  static ExprPtr guard(ExprPtr a, ExprPtr b);
  static ExprPtr scaled(Int c, ExprPtr e);
};

// Normal form: alternatives[0] is a constant; systems parsed from text are
// normalized by prepending -inf when needed.
struct Equation {
  std::string lhs;
  std::vector<ExprPtr> alternatives;
};

struct EquationSystem {
  std::vector<std::string> params;
  std::vector<Equation> equations;

  int k() const { return static_cast<int>(params.size()); }
  int param_index(const std::string& name) const;  // -1 if absent
  const Equation* find(const std::string& var) const;
};

using VarAssign = std::map<std::string, ExtInt>;

EquationSystem parse_system(const std::string& text);
std::string print_system(const EquationSystem& sys);
std::string print_expr(const ParamExpr& e, const std::vector<std::string>& params);

ExtInt eval_pointwise(const ParamExpr& e, const ParamSetting& pi, const VarAssign& xi);

// Value of a full right-hand side: maximum over the alternatives.
ExtInt eval_rhs(const Equation& eq, const ParamSetting& pi, const VarAssign& xi);

// Replaces every parameter with its value; the result has k = 0.
EquationSystem instantiate(const EquationSystem& sys, const ParamSetting& pi);

}  // namespace psi
