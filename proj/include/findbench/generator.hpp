#pragma once

#include <cstdint>

#include "findbench/serialization.hpp"

namespace findbench {

// Fixed rounding convention for fractional counts: round half up;
// remainders stay plain atomics.
int round_half_up(double v);

struct NumericGenOptions {
  double composed_frac = 0.15;
  // Fractions of the atomic functions carrying each modifier; the three
  // sets are disjoint.
  double noise_frac = 0.15;
  double corruption_frac = 0.15;
  double approximation_frac = 0.15;
  std::size_t id_offset = 0;
};

struct StringGenOptions {
  double composed_frac = 0.70;
  std::size_t id_offset = 0;
};

// Samples `count` numeric FunctionSpecs: round_half_up(composed_frac *
// count) compositions over the restricted family subset with operators
// {+, .}, the rest parameterized atomics with integer scale/bias in
// [-30, 30] (scale nonzero). Modifier roles are assigned by a seeded
// shuffle. Throws std::runtime_error naming the minimum viable count
// when the proportions cannot be honored.
DatasetManifest sample_numeric_dataset(int count, std::uint64_t seed,
                                       const NumericGenOptions& opts = {});

// Samples atomic (30%) and depth-2 composed (70%) string programs;
// composed pairs that compute the identity on the 50-string probe set
// are resampled.
DatasetManifest sample_string_dataset(int count, std::uint64_t seed,
                                      const StringGenOptions& opts = {});

// Builds relation specs by cycling the shipped tables in name order:
// for each table the uncorrupted relation, then one corrupted variant
// per tag in tag order.
DatasetManifest sample_relation_dataset(int count, std::uint64_t seed,
                                        const std::vector<FactTable>& tables,
                                        std::size_t id_offset = 0);

// Fills per-function test sets: numeric specs use the canonical grid
// (plus 16 points inside the corrupted region when corrupted); string
// specs get 10 inputs mixing dictionary words and random a-z strings of
// length 3-8; relation specs get 10 distinct keys with exactly 2 from
// the corrupted subdomain when one exists. Throws when a relation table
// is too small for 10 distinct inputs.
void make_test_sets(DatasetManifest& manifest, const std::vector<FactTable>* tables = nullptr);

// Single-spec samplers used by the dataset samplers; exposed for tests.
FunctionSpec sample_numeric_spec(std::uint64_t fn_seed, const std::string& id, int role);
FunctionSpec sample_string_spec(std::uint64_t fn_seed, const std::string& id, bool composed);

// Numeric modifier roles.
inline constexpr int kRolePlain = 0;
inline constexpr int kRoleNoise = 1;
inline constexpr int kRoleCorruption = 2;
inline constexpr int kRoleApproximation = 3;
inline constexpr int kRoleComposed = 4;

}  // namespace findbench
