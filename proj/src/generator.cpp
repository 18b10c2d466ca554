#include "findbench/generator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "findbench/word_list.hpp"

namespace findbench {

namespace {

double snap(double v, double step) { return std::round(v / step) * step; }

double sample_snapped(Rng& rng, double lo, double hi, double step) {
  return snap(rng.uniform(lo, hi), step);
}

int sample_int(Rng& rng, int lo, int hi) { return static_cast<int>(rng.uniform_int(lo, hi)); }

double sample_scale(Rng& rng) {
  int s = 0;
  while (s == 0) s = sample_int(rng, -30, 30);
  return static_cast<double>(s);
}

double sample_bias(Rng& rng) { return static_cast<double>(sample_int(rng, -30, 30)); }

std::vector<double> sample_poly_coeffs(Rng& rng, int degree) {
  std::vector<double> coeffs(degree + 1);
  for (double& c : coeffs) c = sample_snapped(rng, -5.0, 5.0, 0.1);
  while (coeffs.back() == 0.0) coeffs.back() = sample_snapped(rng, -5.0, 5.0, 0.1);
  return coeffs;
}

NumericExpr sample_atomic_expr(Rng& rng, Family family) {
  const double scale = sample_scale(rng);
  const double bias = sample_bias(rng);
  switch (family) {
    case Family::Linear:
    case Family::Absolute:
    case Family::Relu:
    case Family::Reciprocal:
    case Family::Ceiling:
    case Family::Floor:
    case Family::ErrorFunction:
      return NumericExpr::atomic(family, scale, bias);
    case Family::Polynomial:
      return NumericExpr::atomic(family, scale, bias, sample_poly_coeffs(rng, sample_int(rng, 2, 5)));
    case Family::Root:
      return NumericExpr::atomic(family, scale, bias, {static_cast<double>(sample_int(rng, 2, 3))});
    case Family::Logarithm: {
      const double bases[] = {2.0, M_E, 10.0};
      return NumericExpr::atomic(family, scale, bias, {bases[sample_int(rng, 0, 2)]});
    }
    case Family::Step:
      return NumericExpr::atomic(family, scale, bias, {sample_snapped(rng, -50.0, 50.0, 0.5)});
    case Family::Sigmoid:
      return NumericExpr::atomic(family, scale, bias, {sample_snapped(rng, 1.0, 20.0, 0.1)});
    case Family::Tanh:
    case Family::Sin:
    case Family::Cos:
    case Family::Tan:
    case Family::SquareWave:
      return NumericExpr::atomic(family, scale, bias,
                                 {sample_snapped(rng, 8.0, 64.0, 0.5),
                                  sample_snapped(rng, -20.0, 20.0, 0.5)});
    case Family::Constant:
      return NumericExpr::atomic(family, scale, bias, {sample_snapped(rng, -10.0, 10.0, 0.1)});
    case Family::Power:
      return NumericExpr::atomic(family, scale, bias, {static_cast<double>(sample_int(rng, 2, 5))});
    case Family::Gaussian:
      return NumericExpr::atomic(family, scale, bias,
                                 {sample_snapped(rng, -50.0, 50.0, 0.5),
                                  sample_snapped(rng, 1.0, 20.0, 0.1)});
    case Family::StudentT:
      return NumericExpr::atomic(family, scale, bias, {static_cast<double>(sample_int(rng, 1, 10))});
    case Family::Rational: {
      auto p = sample_poly_coeffs(rng, sample_int(rng, 1, 2));
      auto q = sample_poly_coeffs(rng, sample_int(rng, 1, 2));
      return NumericExpr::atomic(family, scale, bias, std::move(p), std::move(q));
    }
    case Family::Rectangle:
      return NumericExpr::atomic(family, scale, bias, {sample_snapped(rng, 4.0, 60.0, 0.5)});
    case Family::Exponential:
      return NumericExpr::atomic(family, scale, bias, {sample_snapped(rng, -0.05, 0.05, 0.001)});
  }
  return NumericExpr::atomic(Family::Linear, scale, bias);
}

NumericExpr sample_numeric_expr(Rng& rng, bool composed) {
  if (!composed) {
    const auto& families = atomic_families();
    return sample_atomic_expr(rng, families[sample_int(rng, 0, static_cast<int>(families.size()) - 1)]);
  }
  const auto& pool = composition_families();
  const Family f = pool[sample_int(rng, 0, static_cast<int>(pool.size()) - 1)];
  const Family g = pool[sample_int(rng, 0, static_cast<int>(pool.size()) - 1)];
  const Combine op = rng.uniform01() < 0.5 ? Combine::Sum : Combine::Product;
  return NumericExpr::compose(op, sample_atomic_expr(rng, f), sample_atomic_expr(rng, g));
}

NoiseSpec sample_noise(Rng& rng, std::uint64_t fn_seed) {
  NoiseSpec n;
  const int kind = sample_int(rng, 0, 2);
  n.kind = static_cast<NoiseKind>(kind);
  switch (n.kind) {
    case NoiseKind::Normal:
    case NoiseKind::Uniform:
      n.param = sample_snapped(rng, 0.5, 5.0, 0.1);
      break;
    case NoiseKind::Poisson:
      n.param = sample_snapped(rng, 1.0, 10.0, 0.1);
      break;
  }
  n.seed = fn_seed;
  return n;
}

CorruptionSpec sample_corruption(Rng& rng, const NumericExpr& expr, std::uint64_t fn_seed) {
  CorruptionSpec c;
  const int kind = sample_int(rng, 0, 2);
  c.kind = static_cast<IntervalKind>(kind);
  const double a = sample_snapped(rng, -100.0, 100.0, 0.5);
  switch (c.kind) {
    case IntervalKind::Bounded: {
      c.lo = a;
      c.hi = a + sample_snapped(rng, 5.0, 20.0, 0.5);
      break;
    }
    case IntervalKind::RightInfinite:
      c.lo = a;
      c.hi = a;
      break;
    case IntervalKind::LeftInfinite:
      c.lo = a;
      c.hi = a;
      break;
  }
  c.polarity = rng.uniform01() < 0.5 ? Polarity::Inside : Polarity::Outside;
  const auto mu = grid_mean(expr);
  c.mean = mu.value_or(0.0);
  c.variance = 0.01;
  c.seed = fn_seed;
  return c;
}

StringOp sample_string_op(Rng& rng, bool composition_slot) {
  // Lowercase is vacuous as a stand-alone function on the a-z alphabet,
  // so it only appears inside compositions.
  static const std::vector<StrOpKind> kAtomicPool = {
      StrOpKind::Concatenate,      StrOpKind::Replace,      StrOpKind::Reverse,
      StrOpKind::Capitalize,       StrOpKind::ShiftLast,    StrOpKind::ShiftFirst,
      StrOpKind::DuplicateLast,    StrOpKind::RemoveDuplicates,
      StrOpKind::RemoveVowels,     StrOpKind::SwapHalves,   StrOpKind::RotateLeft,
      StrOpKind::Prepend,          StrOpKind::DropFirst,    StrOpKind::DropLast,
  };
  static const std::vector<StrOpKind> kCompositionPool = [] {
    auto pool = kAtomicPool;
    pool.push_back(StrOpKind::Lowercase);
    return pool;
  }();
  const auto& pool = composition_slot ? kCompositionPool : kAtomicPool;
  StringOp op;
  op.kind = pool[sample_int(rng, 0, static_cast<int>(pool.size()) - 1)];
  switch (op.kind) {
    case StrOpKind::Concatenate:
    case StrOpKind::Prepend: {
      const int len = sample_int(rng, 1, 3);
      for (int i = 0; i < len; ++i) op.text.push_back(static_cast<char>('a' + sample_int(rng, 0, 25)));
      break;
    }
    case StrOpKind::Replace: {
      op.from = static_cast<char>('a' + sample_int(rng, 0, 25));
      do {
        op.to = static_cast<char>('a' + sample_int(rng, 0, 25));
      } while (op.to == op.from);
      break;
    }
    case StrOpKind::RotateLeft:
      op.amount = sample_int(rng, 1, 3);
      break;
    default:
      break;
  }
  return op;
}

bool is_identity_on_probes(const StringProgram& prog) {
  for (const auto& probe : identity_probe_set())
    if (eval_string(prog, probe) != probe) return false;
  return true;
}

}  // namespace

int round_half_up(double v) { return static_cast<int>(std::floor(v + 0.5)); }

FunctionSpec sample_numeric_spec(std::uint64_t fn_seed, const std::string& id, int role) {
  Rng rng(fn_seed);
  FunctionSpec spec;
  spec.id = id;
  spec.category = Category::Numeric;
  spec.seed = fn_seed;
  spec.numeric = sample_numeric_expr(rng, role == kRoleComposed);
  switch (role) {
    case kRoleNoise:
      spec.noise = sample_noise(rng, fn_seed);
      break;
    case kRoleCorruption:
      spec.corruption = sample_corruption(rng, *spec.numeric, fn_seed);
      break;
    case kRoleApproximation:
      spec.approximation = ApproximationRef{"weights/" + id + ".json"};
      break;
    default:
      break;
  }
  spec.description = describe(spec);
  spec.domain_note = domain_note_text(spec);
  return spec;
}

FunctionSpec sample_string_spec(std::uint64_t fn_seed, const std::string& id, bool composed) {
  Rng rng(fn_seed);
  FunctionSpec spec;
  spec.id = id;
  spec.category = Category::Strings;
  spec.seed = fn_seed;
  StringProgram prog;
  if (!composed) {
    prog.ops = {sample_string_op(rng, false)};
  } else {
    do {
      prog.ops = {sample_string_op(rng, true), sample_string_op(rng, true)};
    } while (is_identity_on_probes(prog));
  }
  spec.program = prog;
  spec.description = describe(spec);
  spec.domain_note = domain_note_text(spec);
  return spec;
}

DatasetManifest sample_numeric_dataset(int count, std::uint64_t seed,
                                       const NumericGenOptions& opts) {
  if (count < 1) throw std::runtime_error("numeric dataset: count must be >= 1");
  const auto plan = [&opts](int n) {
    const int composed = round_half_up(opts.composed_frac * n);
    const int atomic = n - composed;
    const int modified = round_half_up(opts.noise_frac * atomic) +
                         round_half_up(opts.corruption_frac * atomic) +
                         round_half_up(opts.approximation_frac * atomic);
    return std::pair<int, bool>(composed, atomic >= 0 && modified <= atomic);
  };
  if (!plan(count).second) {
    int minimum = count + 1;
    while (!plan(minimum).second) ++minimum;
    throw std::runtime_error("numeric dataset: count too small to honor the proportions; "
                             "minimum viable count is " + std::to_string(minimum));
  }
  const int composed = plan(count).first;
  const int atomic = count - composed;
  const int n_noise = round_half_up(opts.noise_frac * atomic);
  const int n_corrupt = round_half_up(opts.corruption_frac * atomic);
  const int n_approx = round_half_up(opts.approximation_frac * atomic);

  std::vector<int> roles;
  roles.reserve(count);
  roles.insert(roles.end(), composed, kRoleComposed);
  roles.insert(roles.end(), n_noise, kRoleNoise);
  roles.insert(roles.end(), n_corrupt, kRoleCorruption);
  roles.insert(roles.end(), n_approx, kRoleApproximation);
  roles.insert(roles.end(), count - static_cast<int>(roles.size()), kRolePlain);
  Rng shuffle_rng(mix_keys(seed, 0x726f6c65u));  // role assignment stream
  shuffle_rng.shuffle(roles);

  DatasetManifest manifest;
  manifest.dataset_id = "numeric-" + std::to_string(count) + "-" + std::to_string(seed);
  manifest.seed = seed;
  manifest.functions.reserve(count);
  for (int i = 0; i < count; ++i) {
    const std::size_t index = opts.id_offset + i;
    const std::uint64_t fn_seed = mix_keys(seed, index);
    manifest.functions.push_back(sample_numeric_spec(fn_seed, make_function_id(index), roles[i]));
  }
  return manifest;
}

DatasetManifest sample_string_dataset(int count, std::uint64_t seed, const StringGenOptions& opts) {
  if (count < 1) throw std::runtime_error("string dataset: count must be >= 1");
  const int composed = round_half_up(opts.composed_frac * count);

  std::vector<int> roles;
  roles.reserve(count);
  roles.insert(roles.end(), composed, 1);
  roles.insert(roles.end(), count - composed, 0);
  Rng shuffle_rng(mix_keys(seed, 0x726f6c65u));
  shuffle_rng.shuffle(roles);

  DatasetManifest manifest;
  manifest.dataset_id = "strings-" + std::to_string(count) + "-" + std::to_string(seed);
  manifest.seed = seed;
  manifest.functions.reserve(count);
  for (int i = 0; i < count; ++i) {
    const std::size_t index = opts.id_offset + i;
    const std::uint64_t fn_seed = mix_keys(seed, index);
    manifest.functions.push_back(sample_string_spec(fn_seed, make_function_id(index), roles[i] == 1));
  }
  return manifest;
}

DatasetManifest sample_relation_dataset(int count, std::uint64_t seed,
                                        const std::vector<FactTable>& tables,
                                        std::size_t id_offset) {
  if (count < 1) throw std::runtime_error("relation dataset: count must be >= 1");
  if (tables.empty()) throw std::runtime_error("relation dataset: no fact tables loaded");

  std::vector<FactTable> sorted = tables;
  std::sort(sorted.begin(), sorted.end(),
            [](const FactTable& a, const FactTable& b) { return a.name < b.name; });

  std::vector<RelationSpec> units;
  for (const auto& t : sorted) {
    units.push_back(RelationSpec{t.name, std::nullopt});
    for (const auto& [tag, keys] : t.tags) units.push_back(RelationSpec{t.name, tag});
  }

  DatasetManifest manifest;
  manifest.dataset_id = "relations-" + std::to_string(count) + "-" + std::to_string(seed);
  manifest.seed = seed;
  manifest.functions.reserve(count);
  for (int i = 0; i < count; ++i) {
    const std::size_t index = id_offset + i;
    FunctionSpec spec;
    spec.id = make_function_id(index);
    spec.category = Category::Relations;
    spec.seed = mix_keys(seed, index);
    spec.relation = units[i % units.size()];
    spec.description = describe(spec, &sorted);
    spec.domain_note = domain_note_text(spec, &sorted);
    manifest.functions.push_back(std::move(spec));
  }
  return manifest;
}

void make_test_sets(DatasetManifest& manifest, const std::vector<FactTable>* tables) {
  for (std::size_t i = 0; i < manifest.functions.size(); ++i) {
    auto& spec = manifest.functions[i];
    Rng rng(mix_keys(manifest.seed, 0x74657374u, spec.seed));
    switch (spec.category) {
      case Category::Numeric: {
        spec.test_set.numeric_extras.clear();
        if (spec.corruption) {
          // 16 points inside the corrupted region, clipped to the grid range.
          const auto& c = *spec.corruption;
          double lo = -128.0, hi = 128.0;
          std::vector<std::pair<double, double>> segments;
          if (c.polarity == Polarity::Inside) {
            switch (c.kind) {
              case IntervalKind::Bounded: segments = {{c.lo, c.hi}}; break;
              case IntervalKind::RightInfinite: segments = {{c.lo, hi}}; break;
              case IntervalKind::LeftInfinite: segments = {{lo, c.hi}}; break;
            }
          } else {
            switch (c.kind) {
              case IntervalKind::Bounded: segments = {{lo, c.lo}, {c.hi, hi}}; break;
              case IntervalKind::RightInfinite: segments = {{lo, c.lo}}; break;
              case IntervalKind::LeftInfinite: segments = {{c.hi, hi}}; break;
            }
          }
          // Clip and drop empty segments.
          std::vector<std::pair<double, double>> clipped;
          double total = 0.0;
          for (auto [a, b] : segments) {
            a = std::max(a, lo);
            b = std::min(b, hi);
            if (b > a) {
              clipped.emplace_back(a, b);
              total += b - a;
            }
          }
          for (int k = 0; k < 16 && total > 0.0; ++k) {
            double u = rng.uniform(0.0, total);
            for (const auto& [a, b] : clipped) {
              if (u <= b - a) {
                spec.test_set.numeric_extras.push_back(a + u);
                break;
              }
              u -= b - a;
            }
          }
        }
        break;
      }
      case Category::Strings: {
        spec.test_set.inputs.clear();
        const auto& words = common_words();
        std::vector<int> idx(words.size());
        for (std::size_t k = 0; k < idx.size(); ++k) idx[k] = static_cast<int>(k);
        rng.shuffle(idx);
        for (int k = 0; k < 5; ++k) spec.test_set.inputs.push_back(words[idx[k]]);
        for (int k = 0; k < 5; ++k) {
          const int len = static_cast<int>(rng.uniform_int(3, 8));
          std::string s;
          for (int c = 0; c < len; ++c)
            s.push_back(static_cast<char>('a' + rng.uniform_int(0, 25)));
          spec.test_set.inputs.push_back(s);
        }
        break;
      }
      case Category::Relations: {
        if (!tables) throw std::runtime_error("make_test_sets: relation specs need fact tables");
        const auto& table = find_table(*tables, spec.relation->table);
        std::vector<std::string> corrupted, clean;
        const std::set<std::string>* tag_keys = nullptr;
        if (spec.relation->corrupt_tag) {
          const auto it = table.tags.find(*spec.relation->corrupt_tag);
          if (it == table.tags.end())
            throw std::runtime_error("corrupt tag missing from table " + table.name);
          tag_keys = &it->second;
        }
        for (const auto& [key, value] : table.pairs) {
          if (tag_keys && tag_keys->count(key)) {
            corrupted.push_back(key);
          } else {
            clean.push_back(key);
          }
        }
        rng.shuffle(corrupted);
        rng.shuffle(clean);
        const int want_corrupted = tag_keys ? 2 : 0;
        const int want_clean = 10 - want_corrupted;
        if (static_cast<int>(corrupted.size()) < want_corrupted ||
            static_cast<int>(clean.size()) < want_clean)
          throw std::runtime_error("fact table " + table.name +
                                   " too small for a 10-input test set");
        spec.test_set.inputs.clear();
        for (int k = 0; k < want_corrupted; ++k) spec.test_set.inputs.push_back(corrupted[k]);
        for (int k = 0; k < want_clean; ++k) spec.test_set.inputs.push_back(clean[k]);
        // Deterministic interleave so corrupted samples are not always first.
        rng.shuffle(spec.test_set.inputs);
        break;
      }
    }
  }
}

}  // namespace findbench
