#include "fzeta/merofunc/expr.hpp"

#include <cmath>

#include "fzeta/numeric/special.hpp"

namespace fzeta::merofunc {

namespace {

using nlohmann::json;

ExprPtr make(Expr e) { return std::make_shared<const Expr>(std::move(e)); }

Estimate<cplx> eval_series(const Expr& e, cplx s) {
  const auto x = e.args[0]->eval(s);
  if (x.value == cplx{0.0}) return {cplx{kInf, 0.0}, kInf};
  const cplx inv = 1.0 / x.value;
  const double log_abs_inv = -std::log(std::abs(x.value));

  // term_n = exp(-s lgamma(n+1)) x^{-n}, accumulated in log form to avoid overflow
  cplx acc = 0.0;
  cplx log_term = 0.0;
  const cplx log_inv = std::log(inv);
  for (int k = 1; k <= e.n; ++k) {
    log_term += log_inv - s * std::log(static_cast<double>(k));
    acc += std::exp(log_term);
  }

  // tail: ratio of consecutive terms is (n+1)^{-s}/x, decreasing in n when Re s > 0
  double err = kInf;
  const double next = std::exp(log_term.real() + log_abs_inv - s.real() * std::log(e.n + 1.0));
  const double ratio = std::exp(log_abs_inv - s.real() * std::log(e.n + 2.0));
  if (s.real() > 0.0 && ratio < 1.0) err = next / (1.0 - ratio);

  // first-order propagation of the argument's own error: d/dx Σ c_n x^{-n} ≈ -Σ n c_n x^{-n-1}
  if (x.error > 0.0) err += x.error * std::abs(acc) * e.n / std::abs(x.value);
  return {acc, err};
}

}  // namespace

Estimate<cplx> Expr::eval(cplx s) const {
  switch (op) {
    case Op::Const:
      return {value, 0.0};
    case Op::Var:
      return {s, 0.0};
    case Op::RealPow: {
      const auto a = args[0]->eval(s);
      const cplx v = numeric::real_pow(base, a.value);
      return {v, std::abs(v) * std::abs(std::log(base)) * a.error};
    }
    case Op::Add: {
      cplx v = 0.0;
      double err = 0.0;
      for (const auto& a : args) {
        const auto t = a->eval(s);
        v += t.value;
        err += t.error;
      }
      return {v, err};
    }
    case Op::Mul: {
      cplx v = 1.0;
      double err = 0.0;
      for (const auto& a : args) {
        const auto t = a->eval(s);
        err = std::abs(v) * t.error + std::abs(t.value) * err + err * t.error;
        v *= t.value;
      }
      return {v, err};
    }
    case Op::Div: {
      const auto a = args[0]->eval(s);
      const auto b = args[1]->eval(s);
      const cplx v = a.value / b.value;
      const double err = (a.error + std::abs(v) * b.error) / std::abs(b.value);
      return {v, err};
    }
    case Op::IPow: {
      const auto a = args[0]->eval(s);
      const cplx v = std::pow(a.value, n);
      const double err = a.error == 0.0 ? 0.0 : std::abs(static_cast<double>(n) * v / a.value) * a.error;
      return {v, err};
    }
    case Op::Shift:
      return args[0]->eval(s - shift);
    case Op::FactorialSeries:
      return eval_series(*this, s);
  }
  return {cplx{0.0}, kInf};
}

ExprPtr constant(cplx c) { return make({.op = Expr::Op::Const, .value = c, .args = {}}); }
ExprPtr var() { return make({.op = Expr::Op::Var, .args = {}}); }

ExprPtr real_pow(double base, ExprPtr exponent) {
  if (!(base > 0.0)) throw Error(ErrorCode::InvalidParameters, "power base must be a positive real");
  return make({.op = Expr::Op::RealPow, .base = base, .args = {std::move(exponent)}});
}

ExprPtr add(std::vector<ExprPtr> terms) {
  if (terms.empty()) return constant(0.0);
  if (terms.size() == 1) return terms[0];
  return make({.op = Expr::Op::Add, .args = std::move(terms)});
}

ExprPtr mul(std::vector<ExprPtr> factors) {
  if (factors.empty()) return constant(1.0);
  if (factors.size() == 1) return factors[0];
  return make({.op = Expr::Op::Mul, .args = std::move(factors)});
}

ExprPtr div(ExprPtr num, ExprPtr den) { return make({.op = Expr::Op::Div, .args = {std::move(num), std::move(den)}}); }

ExprPtr ipow(ExprPtr x, int n) { return make({.op = Expr::Op::IPow, .n = n, .args = {std::move(x)}}); }

ExprPtr shifted(ExprPtr x, double c) {
  if (c == 0.0) return x;
  return make({.op = Expr::Op::Shift, .shift = c, .args = {std::move(x)}});
}

ExprPtr factorial_series(ExprPtr x, int n_max) {
  if (n_max < 1) throw Error(ErrorCode::InvalidOrder, "series truncation must be at least 1");
  return make({.op = Expr::Op::FactorialSeries, .n = n_max, .args = {std::move(x)}});
}

json expr_to_json(const Expr& e) {
  auto children = [&e] {
    json a = json::array();
    for (const auto& c : e.args) a.push_back(expr_to_json(*c));
    return a;
  };
  switch (e.op) {
    case Expr::Op::Const:
      return {{"op", "const"}, {"re", e.value.real()}, {"im", e.value.imag()}};
    case Expr::Op::Var:
      return {{"op", "s"}};
    case Expr::Op::RealPow:
      return {{"op", "pow"}, {"base", e.base}, {"args", children()}};
    case Expr::Op::Add:
      return {{"op", "add"}, {"args", children()}};
    case Expr::Op::Mul:
      return {{"op", "mul"}, {"args", children()}};
    case Expr::Op::Div:
      return {{"op", "div"}, {"args", children()}};
    case Expr::Op::IPow:
      return {{"op", "ipow"}, {"n", e.n}, {"args", children()}};
    case Expr::Op::Shift:
      return {{"op", "shift"}, {"c", e.shift}, {"args", children()}};
    case Expr::Op::FactorialSeries:
      return {{"op", "factorial_series"}, {"n_max", e.n}, {"args", children()}};
  }
  return {};
}

ExprPtr expr_from_json(const json& j) {
  try {
    const auto op = j.at("op").get<std::string>();
    std::vector<ExprPtr> args;
    if (j.contains("args"))
      for (const auto& a : j["args"]) args.push_back(expr_from_json(a));
    auto arg = [&args, &op](std::size_t count) {
      if (args.size() != count) throw Error(ErrorCode::InvalidSpec, "wrong argument count for '" + op + "'");
    };
    if (op == "const") return constant({j.value("re", 0.0), j.value("im", 0.0)});
    if (op == "s") return var();
    if (op == "add") return add(std::move(args));
    if (op == "mul") return mul(std::move(args));
    if (op == "pow") return arg(1), real_pow(j.at("base").get<double>(), args[0]);
    if (op == "div") return arg(2), div(args[0], args[1]);
    if (op == "ipow") return arg(1), ipow(args[0], j.at("n").get<int>());
    if (op == "shift") return arg(1), shifted(args[0], j.at("c").get<double>());
    if (op == "factorial_series") return arg(1), factorial_series(args[0], j.at("n_max").get<int>());
    throw Error(ErrorCode::InvalidSpec, "unknown expression op '" + op + "'");
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidSpec, std::string("malformed expression: ") + e.what());
  }
}

}  // namespace fzeta::merofunc
