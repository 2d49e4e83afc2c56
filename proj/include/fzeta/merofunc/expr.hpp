#pragma once

#include <memory>
#include <vector>

#include <json.hpp>

#include "fzeta/common.hpp"

namespace fzeta::merofunc {

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Immutable expression tree in the complex variable s.
struct Expr {
  enum class Op {
    Const,            // value
    Var,              // s
    RealPow,          // base^{arg}, base > 0 real, principal branch
    Add,              // Σ args
    Mul,              // Π args
    Div,              // args[0] / args[1]
    IPow,             // arg^n, n ∈ ℤ
    Shift,            // arg evaluated at s - shift
    FactorialSeries,  // Σ_{n=1}^{n_max} (n!)^{-s} arg^{-n}
  };

  Op op = Op::Const;
  cplx value{};
  double base = 1.0;
  double shift = 0.0;
  int n = 0;  // IPow exponent or series truncation
  std::vector<ExprPtr> args;

  /// Value with an absolute error bound; only truncated series contribute error
  /// (infinite when a series tail cannot be bounded at s).
  Estimate<cplx> eval(cplx s) const;
};

ExprPtr constant(cplx c);
ExprPtr var();
ExprPtr real_pow(double base, ExprPtr exponent);
ExprPtr add(std::vector<ExprPtr> terms);
ExprPtr mul(std::vector<ExprPtr> factors);
ExprPtr div(ExprPtr num, ExprPtr den);
ExprPtr ipow(ExprPtr x, int n);
ExprPtr shifted(ExprPtr x, double c);
ExprPtr factorial_series(ExprPtr x, int n_max);

inline ExprPtr operator+(ExprPtr a, ExprPtr b) { return add({std::move(a), std::move(b)}); }
inline ExprPtr operator-(ExprPtr a, ExprPtr b) { return add({std::move(a), mul({constant(-1.0), std::move(b)})}); }
inline ExprPtr operator*(ExprPtr a, ExprPtr b) { return mul({std::move(a), std::move(b)}); }
inline ExprPtr operator/(ExprPtr a, ExprPtr b) { return div(std::move(a), std::move(b)); }

nlohmann::json expr_to_json(const Expr& e);
ExprPtr expr_from_json(const nlohmann::json& j);

}  // namespace fzeta::merofunc
