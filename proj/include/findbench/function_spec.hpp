#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "findbench/fact_table.hpp"
#include "findbench/numeric_expr.hpp"
#include "findbench/rng.hpp"
#include "findbench/string_program.hpp"

namespace findbench {

enum class Category { Numeric, Strings, Relations };

const char* category_name(Category c);
std::optional<Category> category_from_name(const std::string& name);

enum class NoiseKind { Normal, Uniform, Poisson };

const char* noise_kind_name(NoiseKind k);

// Additive observation noise on numeric outputs. `param` is sigma for
// normal, the half-width for uniform (draws on [-param, param]), and the
// rate lambda for poisson. Normal and uniform draws are mean-centered;
// poisson draws are non-negative with mean lambda.
struct NoiseSpec {
  NoiseKind kind = NoiseKind::Normal;
  double param = 1.0;
  std::uint64_t seed = 0;

  double draw(Rng& rng) const;

  bool operator==(const NoiseSpec&) const = default;
};

enum class IntervalKind { Bounded, RightInfinite, LeftInfinite };
enum class Polarity { Inside, Outside };

// Replaces function values on one side of an interval with draws from
// N(mean, variance). `lo`/`hi` bound the interval: [lo, hi] when bounded,
// [lo, inf) when right-infinite, (-inf, hi] when left-infinite.
struct CorruptionSpec {
  IntervalKind kind = IntervalKind::Bounded;
  double lo = 0.0;
  double hi = 0.0;
  Polarity polarity = Polarity::Inside;
  double mean = 0.0;
  double variance = 0.01;
  std::uint64_t seed = 0;

  bool in_interval(double x) const;
  // True where the replacement applies.
  bool corrupted_at(double x) const {
    return polarity == Polarity::Inside ? in_interval(x) : !in_interval(x);
  }
  std::string interval_text() const;

  bool operator==(const CorruptionSpec&) const = default;
};

// Reference to a trained two-layer ReLU net served in place of the
// expression; weights live in a sidecar file next to the manifest.
struct ApproximationRef {
  std::string weights_path;

  bool operator==(const ApproximationRef&) const = default;
};

// Evaluation inputs frozen at generation time. Numeric functions are
// scored on the canonical grid; corrupted ones carry extra in-region
// points. String and relation functions carry 10 literal inputs.
struct TestSet {
  std::vector<double> numeric_extras;
  std::vector<std::string> inputs;

  bool operator==(const TestSet&) const = default;
};

// The full recipe for one benchmark function.
struct FunctionSpec {
  std::string id;
  Category category = Category::Numeric;

  std::optional<NumericExpr> numeric;
  std::optional<StringProgram> program;
  std::optional<RelationSpec> relation;

  std::optional<NoiseSpec> noise;
  std::optional<CorruptionSpec> corruption;
  std::optional<ApproximationRef> approximation;

  std::uint64_t seed = 0;
  std::string description;
  std::string domain_note;
  TestSet test_set;

  // Disjoint subcategory used in reports: numeric ->
  // composition|noise|corruption|approximation|atomic; strings ->
  // composition|atomic; relations -> corruption|atomic.
  std::string subcategory() const;

  std::optional<std::string> validate() const;

  bool operator==(const FunctionSpec&) const = default;
};

std::string make_function_id(std::size_t index);

// Noiseless, uncorrupted numeric value.
std::optional<double> eval_base(const FunctionSpec& spec, double x);

// Forward pass of the spec's approximation net, supplied by the caller
// when the spec carries one (keeps fn-core independent of the trainer).
using ApproxForward = double (*)(const void* net, double x);

// Applies the modifier stack: approximation replaces the base value,
// corruption replaces values on its side with N(mean, variance) draws,
// then additive noise. Draws come from `draws`, which the session keys
// by (spec seed, nonce, query counter) so replays are exact.
std::optional<double> eval_with_modifiers(const FunctionSpec& spec, double x, Rng& draws,
                                          const void* approx_net = nullptr,
                                          ApproxForward approx_forward = nullptr);

// Per-evaluation draw stream.
inline Rng query_rng(const FunctionSpec& spec, std::uint64_t nonce, std::uint64_t counter) {
  return Rng(mix_keys(spec.seed, nonce, counter));
}

// Deterministic English templates for ground-truth descriptions.
std::string describe(const FunctionSpec& spec, const std::vector<FactTable>* tables = nullptr);
std::string describe_expr(const NumericExpr& expr);
std::string describe_program(const StringProgram& prog);
std::string domain_note_text(const FunctionSpec& spec, const std::vector<FactTable>* tables = nullptr);

// Mean of the noiseless expression over the canonical 513-point grid on
// [-128, 128], skipping undefined points; feeds CorruptionSpec::mean.
std::optional<double> grid_mean(const NumericExpr& expr);

// The canonical NMSE grid: 513 points, step 0.5, on [-128, 128].
std::vector<double> canonical_grid();

}  // namespace findbench
