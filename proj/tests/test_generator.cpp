#include <doctest.h>

#include <set>

#include "findbench/generator.hpp"
#include "findbench/word_list.hpp"

using namespace findbench;

TEST_CASE("numeric proportions are exact at 1000") {
  const auto manifest = sample_numeric_dataset(1000, 7);
  const auto counts = manifest.counts().at("numeric");
  CHECK(counts.at("composition") == 150);
  const int atomics = 1000 - 150;
  CHECK(counts.at("noise") == round_half_up(0.15 * atomics));
  CHECK(counts.at("corruption") == round_half_up(0.15 * atomics));
  CHECK(counts.at("approximation") == round_half_up(0.15 * atomics));
  CHECK(counts.at("atomic") ==
        atomics - counts.at("noise") - counts.at("corruption") - counts.at("approximation"));
}

TEST_CASE("count 20 gives 3 compositions and 3 of each modifier") {
  const auto manifest = sample_numeric_dataset(20, 99);
  const auto counts = manifest.counts().at("numeric");
  CHECK(counts.at("composition") == 3);
  CHECK(counts.at("noise") == 3);       // round_half_up(0.15 * 17) = 3
  CHECK(counts.at("corruption") == 3);
  CHECK(counts.at("approximation") == 3);
}

TEST_CASE("string proportions are exact at 1000") {
  const auto manifest = sample_string_dataset(1000, 7);
  const auto counts = manifest.counts().at("strings");
  CHECK(counts.at("atomic") == 300);
  CHECK(counts.at("composition") == 700);
}

TEST_CASE("seed replay reproduces the manifest exactly") {
  auto a = sample_numeric_dataset(120, 41);
  auto b = sample_numeric_dataset(120, 41);
  make_test_sets(a);
  make_test_sets(b);
  CHECK(a.functions == b.functions);

  const auto c = sample_string_dataset(120, 41);
  const auto d = sample_string_dataset(120, 41);
  CHECK(c.functions == d.functions);
}

TEST_CASE("impossible proportions raise an error naming the minimum") {
  NumericGenOptions opts;
  opts.noise_frac = 0.45;
  opts.corruption_frac = 0.45;
  opts.approximation_frac = 0.45;
  try {
    sample_numeric_dataset(2, 1, opts);  // 3 modifier slots but only 2 atomics
    FAIL("expected an error");
  } catch (const std::exception& e) {
    CHECK(std::string(e.what()).find("minimum viable count") != std::string::npos);
  }
}

TEST_CASE("parameter ranges hold over a 10000-function fuzz run") {
  const auto manifest = sample_numeric_dataset(10000, 1234);
  int corrupted = 0;
  for (const auto& spec : manifest.functions) {
    std::vector<const NumericExpr*> atoms;
    if (spec.numeric->is_composed()) {
      atoms = {&spec.numeric->children[0], &spec.numeric->children[1]};
    } else {
      atoms = {&*spec.numeric};
    }
    for (const auto* e : atoms) {
      CHECK(e->scale == std::floor(e->scale));
      CHECK(e->bias == std::floor(e->bias));
      CHECK(e->scale != 0.0);
      CHECK(std::fabs(e->scale) <= 30.0);
      CHECK(std::fabs(e->bias) <= 30.0);
      CHECK(!validate(*e));
    }
    if (spec.corruption) {
      ++corrupted;
      const auto& c = *spec.corruption;
      if (c.kind == IntervalKind::Bounded) {
        CHECK(c.hi - c.lo >= 5.0);
        CHECK(c.hi - c.lo <= 20.0);
        CHECK(c.lo >= -100.0);
        CHECK(c.lo <= 100.0);
      } else {
        const double a = c.kind == IntervalKind::RightInfinite ? c.lo : c.hi;
        CHECK(a >= -100.0);
        CHECK(a <= 100.0);
      }
      CHECK(c.variance == 0.01);
    }
    if (spec.noise) {
      CHECK(spec.noise->param > 0.0);
      CHECK(spec.noise->param <= 10.0);
    }
  }
  CHECK(corrupted == round_half_up(0.15 * (10000 - round_half_up(0.15 * 10000))));
}

TEST_CASE("composition children come from the restricted subset") {
  const auto manifest = sample_numeric_dataset(400, 88);
  for (const auto& spec : manifest.functions) {
    if (!spec.numeric->is_composed()) continue;
    for (const auto& child : spec.numeric->children) {
      bool allowed = false;
      for (Family f : composition_families()) allowed |= (child.family == f);
      CHECK(allowed);
    }
  }
}

TEST_CASE("composed string programs are never the identity on the probe set") {
  const auto manifest = sample_string_dataset(400, 23);
  for (const auto& spec : manifest.functions) {
    if (spec.program->ops.size() != 2) continue;
    bool differs = false;
    for (const auto& probe : identity_probe_set())
      differs |= (eval_string(*spec.program, probe) != probe);
    CHECK(differs);
  }
}

TEST_CASE("test sets have the documented shapes") {
  auto manifest = sample_numeric_dataset(80, 15);
  make_test_sets(manifest);
  for (const auto& spec : manifest.functions) {
    if (spec.corruption) {
      CHECK(spec.test_set.numeric_extras.size() == 16);
      for (double x : spec.test_set.numeric_extras) {
        CHECK(spec.corruption->corrupted_at(x));
        CHECK(x >= -128.0);
        CHECK(x <= 128.0);
      }
    } else {
      CHECK(spec.test_set.numeric_extras.empty());
    }
  }

  auto strings = sample_string_dataset(40, 15);
  make_test_sets(strings);
  for (const auto& spec : strings.functions) {
    CHECK(spec.test_set.inputs.size() == 10);
    for (const auto& s : spec.test_set.inputs) CHECK(valid_input(s));
  }

  const auto tables = load_fact_tables(std::string(FINDBENCH_SOURCE_DATA_DIR) + "/facts");
  auto relations = sample_relation_dataset(30, 15, tables);
  make_test_sets(relations, &tables);
  for (const auto& spec : relations.functions) {
    CHECK(spec.test_set.inputs.size() == 10);
    std::set<std::string> distinct(spec.test_set.inputs.begin(), spec.test_set.inputs.end());
    CHECK(distinct.size() == 10);
    const auto& table = find_table(tables, spec.relation->table);
    int undefined_count = 0;
    for (const auto& input : spec.test_set.inputs)
      if (eval_relation(*spec.relation, table, input) == kUndefined) ++undefined_count;
    CHECK(undefined_count == (spec.relation->corrupt_tag ? 2 : 0));
  }
}

TEST_CASE("tiny relation tables cannot produce a 10-input test set") {
  FactTable tiny;
  tiny.name = "tiny";
  tiny.input_kind = "tiny";
  for (int i = 0; i < 5; ++i) tiny.pairs["k" + std::to_string(i)] = "v";
  std::vector<FactTable> tables = {tiny};
  auto manifest = sample_relation_dataset(1, 2, tables);
  CHECK_THROWS(make_test_sets(manifest, &tables));
}
