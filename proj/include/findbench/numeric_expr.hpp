#pragma once

#include <optional>
#include <string>
#include <vector>

namespace findbench {

// Atomic numeric function families. Every atomic node evaluates as
// scale * g(x) + bias, where g is the family's native shape.
enum class Family {
  Linear,        // g(x) = x
  Polynomial,    // g(x) = c0 + c1 x + ... + cd x^d          params = {c0..cd}, d >= 1
  Absolute,      // g(x) = |x|
  Root,          // g(x) = x^(1/k)                           params = {k}; even k undefined for x < 0
  Logarithm,     // g(x) = log_base(x), x > 0                params = {base}
  Step,          // g(x) = 1 if x >= s else 0                params = {s}
  Relu,          // g(x) = max(0, x)
  Sigmoid,       // g(x) = 1 / (1 + exp(-x/t))               params = {t}
  Tanh,          // g(x) = tanh(2*pi/b * (x - c))            params = {b, c}
  Constant,      // g(x) = c                                 params = {c}
  Power,         // g(x) = x^p, integer p >= 2               params = {p}
  Sin,           // g(x) = sin(2*pi/b * (x - c))             params = {b, c}
  Cos,           // g(x) = cos(2*pi/b * (x - c))             params = {b, c}
  Tan,           // g(x) = tan(2*pi/b * (x - c))             params = {b, c}
  Reciprocal,    // g(x) = 1/x, undefined at 0
  Gaussian,      // g(x) = exp(-(x-mu)^2/(2 s^2)) / (s sqrt(2 pi))   params = {mu, s}
  StudentT,      // g(x) = standard Student-t pdf with nu dof        params = {nu}
  Rational,      // g(x) = P(x)/Q(x)                         params = P coeffs, params2 = Q coeffs
  Rectangle,     // g(x) = 1 if |x| <= w/2 else 0            params = {w}
  SquareWave,    // g(x) = sgn(sin(2*pi/T * (x - phi)))      params = {T, phi}
  Exponential,   // g(x) = exp(r x)                          params = {r}
  Ceiling,       // g(x) = ceil(x)
  Floor,         // g(x) = floor(x)
  ErrorFunction, // g(x) = erf(x)
};

enum class Combine { Sum, Product };

const char* family_name(Family f);
std::optional<Family> family_from_name(const std::string& name);

// Expression tree for numeric black boxes. A node is either atomic
// (children empty) or a pointwise sum/product of exactly two children.
struct NumericExpr {
  Family family = Family::Linear;
  double scale = 1.0;
  double bias = 0.0;
  std::vector<double> params;
  std::vector<double> params2;  // rational denominator coefficients

  std::optional<Combine> op;
  std::vector<NumericExpr> children;

  bool is_composed() const { return op.has_value(); }

  static NumericExpr atomic(Family f, double scale, double bias,
                            std::vector<double> params = {},
                            std::vector<double> params2 = {});
  static NumericExpr compose(Combine op, NumericExpr left, NumericExpr right);

  bool operator==(const NumericExpr& other) const;
};

// Families eligible as children of composed nodes.
const std::vector<Family>& composition_families();

// Families sampled as stand-alone atomic functions.
const std::vector<Family>& atomic_families();

// Pure evaluation. Returns nullopt exactly where the expression is
// mathematically undefined over the reals (log of a non-positive value,
// division by zero, even root of a negative) or where the value is not
// representable as a finite double.
std::optional<double> eval_numeric(const NumericExpr& expr, double x);

// Structural invariant check; returns an explanation for the first
// violation found.
std::optional<std::string> validate(const NumericExpr& expr);

// Number of sampled degrees of freedom (scale, bias, native parameters),
// used by model selection in the reference interpreter.
int parameter_count(const NumericExpr& expr);

}  // namespace findbench
