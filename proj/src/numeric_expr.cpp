#include "findbench/numeric_expr.hpp"

#include <cmath>
#include <unordered_map>

namespace findbench {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

const std::pair<Family, const char*> kFamilyNames[] = {
    {Family::Linear, "linear"},
    {Family::Polynomial, "polynomial"},
    {Family::Absolute, "absolute"},
    {Family::Root, "root"},
    {Family::Logarithm, "logarithm"},
    {Family::Step, "step"},
    {Family::Relu, "relu"},
    {Family::Sigmoid, "sigmoid"},
    {Family::Tanh, "tanh"},
    {Family::Constant, "constant"},
    {Family::Power, "power"},
    {Family::Sin, "sin"},
    {Family::Cos, "cos"},
    {Family::Tan, "tan"},
    {Family::Reciprocal, "reciprocal"},
    {Family::Gaussian, "gaussian"},
    {Family::StudentT, "student_t"},
    {Family::Rational, "rational"},
    {Family::Rectangle, "rectangle"},
    {Family::SquareWave, "square_wave"},
    {Family::Exponential, "exponential"},
    {Family::Ceiling, "ceiling"},
    {Family::Floor, "floor"},
    {Family::ErrorFunction, "error_function"},
};

double poly_eval(const std::vector<double>& coeffs, double x) {
  double acc = 0.0;
  for (std::size_t i = coeffs.size(); i > 0; --i) acc = acc * x + coeffs[i - 1];
  return acc;
}

// Native shape g(x); nullopt where mathematically undefined.
std::optional<double> native(const NumericExpr& e, double x) {
  switch (e.family) {
    case Family::Linear:
      return x;
    case Family::Polynomial:
      return poly_eval(e.params, x);
    case Family::Absolute:
      return std::fabs(x);
    case Family::Root: {
      const int k = static_cast<int>(e.params.at(0));
      if (k % 2 == 0) {
        if (x < 0.0) return std::nullopt;
        return std::pow(x, 1.0 / k);
      }
      // Odd roots extend to negative reals.
      return std::copysign(std::pow(std::fabs(x), 1.0 / k), x);
    }
    case Family::Logarithm: {
      if (x <= 0.0) return std::nullopt;
      return std::log(x) / std::log(e.params.at(0));
    }
    case Family::Step:
      return x >= e.params.at(0) ? 1.0 : 0.0;
    case Family::Relu:
      return x > 0.0 ? x : 0.0;
    case Family::Sigmoid:
      return 1.0 / (1.0 + std::exp(-x / e.params.at(0)));
    case Family::Tanh:
      return std::tanh(kTwoPi / e.params.at(0) * (x - e.params.at(1)));
    case Family::Constant:
      return e.params.at(0);
    case Family::Power:
      return std::pow(x, e.params.at(0));
    case Family::Sin:
      return std::sin(kTwoPi / e.params.at(0) * (x - e.params.at(1)));
    case Family::Cos:
      return std::cos(kTwoPi / e.params.at(0) * (x - e.params.at(1)));
    case Family::Tan: {
      const double t = kTwoPi / e.params.at(0) * (x - e.params.at(1));
      if (std::cos(t) == 0.0) return std::nullopt;
      return std::tan(t);
    }
    case Family::Reciprocal:
      if (x == 0.0) return std::nullopt;
      return 1.0 / x;
    case Family::Gaussian: {
      const double mu = e.params.at(0), s = e.params.at(1);
      const double z = (x - mu) / s;
      return std::exp(-0.5 * z * z) / (s * std::sqrt(kTwoPi));
    }
    case Family::StudentT: {
      const double nu = e.params.at(0);
      const double c = std::exp(std::lgamma((nu + 1.0) / 2.0) - std::lgamma(nu / 2.0)) /
                       std::sqrt(nu * M_PI);
      return c * std::pow(1.0 + x * x / nu, -(nu + 1.0) / 2.0);
    }
    case Family::Rational: {
      const double q = poly_eval(e.params2, x);
      if (q == 0.0) return std::nullopt;
      return poly_eval(e.params, x) / q;
    }
    case Family::Rectangle:
      return std::fabs(x) <= e.params.at(0) / 2.0 ? 1.0 : 0.0;
    case Family::SquareWave: {
      const double s = std::sin(kTwoPi / e.params.at(0) * (x - e.params.at(1)));
      return s > 0.0 ? 1.0 : (s < 0.0 ? -1.0 : 0.0);
    }
    case Family::Exponential:
      return std::exp(e.params.at(0) * x);
    case Family::Ceiling:
      return std::ceil(x);
    case Family::Floor:
      return std::floor(x);
    case Family::ErrorFunction:
      return std::erf(x);
  }
  return std::nullopt;
}

}  // namespace

const char* family_name(Family f) {
  for (const auto& [fam, name] : kFamilyNames)
    if (fam == f) return name;
  return "unknown";
}

std::optional<Family> family_from_name(const std::string& name) {
  for (const auto& [fam, fname] : kFamilyNames)
    if (name == fname) return fam;
  return std::nullopt;
}

NumericExpr NumericExpr::atomic(Family f, double scale, double bias,
                                std::vector<double> params,
                                std::vector<double> params2) {
  NumericExpr e;
  e.family = f;
  e.scale = scale;
  e.bias = bias;
  e.params = std::move(params);
  e.params2 = std::move(params2);
  return e;
}

NumericExpr NumericExpr::compose(Combine op, NumericExpr left, NumericExpr right) {
  NumericExpr e;
  e.op = op;
  e.children.push_back(std::move(left));
  e.children.push_back(std::move(right));
  return e;
}

bool NumericExpr::operator==(const NumericExpr& other) const {
  if (op != other.op) return false;
  if (op.has_value()) return children == other.children;
  return family == other.family && scale == other.scale && bias == other.bias &&
         params == other.params && params2 == other.params2;
}

const std::vector<Family>& composition_families() {
  static const std::vector<Family> kSet = {
      Family::Linear,    Family::Polynomial, Family::Step,
      Family::Relu,      Family::Constant,   Family::Ceiling,
      Family::Floor,     Family::Rectangle,  Family::SquareWave,
  };
  return kSet;
}

const std::vector<Family>& atomic_families() {
  static const std::vector<Family> kSet = {
      Family::Linear,   Family::Polynomial, Family::Absolute,  Family::Root,
      Family::Logarithm, Family::Step,      Family::Relu,      Family::Sigmoid,
      Family::Tanh,     Family::Constant,   Family::Power,     Family::Sin,
      Family::Cos,      Family::Tan,        Family::Reciprocal, Family::Gaussian,
      Family::StudentT, Family::Rational,   Family::Rectangle, Family::SquareWave,
  };
  return kSet;
}

std::optional<double> eval_numeric(const NumericExpr& expr, double x) {
  if (expr.is_composed()) {
    const auto left = eval_numeric(expr.children[0], x);
    if (!left) return std::nullopt;
    const auto right = eval_numeric(expr.children[1], x);
    if (!right) return std::nullopt;
    const double v = *expr.op == Combine::Sum ? *left + *right : *left * *right;
    if (!std::isfinite(v)) return std::nullopt;
    return v;
  }
  const auto g = native(expr, x);
  if (!g) return std::nullopt;
  const double v = expr.scale * *g + expr.bias;
  if (!std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<std::string> validate(const NumericExpr& expr) {
  if (expr.is_composed()) {
    if (expr.children.size() != 2) return "composed node must have exactly two children";
    for (const auto& child : expr.children) {
      if (child.is_composed()) return "children of composed nodes must be atomic";
      bool allowed = false;
      for (Family f : composition_families()) allowed |= (f == child.family);
      if (!allowed) return "composition child outside the allowed family subset";
      if (auto err = validate(child)) return err;
    }
    return std::nullopt;
  }
  const std::size_t arity = [&] {
    switch (expr.family) {
      case Family::Polynomial: return expr.params.size();  // checked below
      case Family::Rational: return expr.params.size();
      case Family::Root:
      case Family::Logarithm:
      case Family::Step:
      case Family::Sigmoid:
      case Family::Constant:
      case Family::Power:
      case Family::Exponential: return std::size_t{1};
      case Family::Gaussian:
      case Family::Tanh:
      case Family::Sin:
      case Family::Cos:
      case Family::Tan:
      case Family::SquareWave: return std::size_t{2};
      case Family::StudentT:
      case Family::Rectangle: return std::size_t{1};
      default: return std::size_t{0};
    }
  }();
  if (expr.family == Family::Polynomial) {
    if (expr.params.size() < 2) return "polynomial degree must be >= 1";
    if (expr.params.back() == 0.0) return "polynomial leading coefficient must be nonzero";
  } else if (expr.family == Family::Rational) {
    if (expr.params.empty() || expr.params2.empty()) return "rational needs both coefficient lists";
    bool nonzero = false;
    for (double q : expr.params2) nonzero |= (q != 0.0);
    if (!nonzero) return "rational denominator is identically zero";
  } else if (expr.params.size() != arity) {
    return std::string("wrong native parameter count for ") + family_name(expr.family);
  }
  if (!expr.params2.empty() && expr.family != Family::Rational)
    return "params2 is reserved for rational denominators";
  return std::nullopt;
}

int parameter_count(const NumericExpr& expr) {
  if (expr.is_composed())
    return parameter_count(expr.children[0]) + parameter_count(expr.children[1]);
  return 2 + static_cast<int>(expr.params.size() + expr.params2.size());
}

}  // namespace findbench
