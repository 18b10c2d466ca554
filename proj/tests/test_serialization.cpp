#include <doctest.h>

#include <filesystem>

#include "findbench/generator.hpp"
#include "findbench/serialization.hpp"

using namespace findbench;

TEST_CASE("parse(serialize(spec)) == spec across all generated categories") {
  const auto numeric = sample_numeric_dataset(60, 5);
  for (const auto& spec : numeric.functions) {
    const auto round = function_spec_from_json(nlohmann::json::parse(manifest_record_line(spec)));
    CHECK(round == spec);
  }
  const auto strings = sample_string_dataset(60, 5);
  for (const auto& spec : strings.functions) {
    const auto round = function_spec_from_json(nlohmann::json::parse(manifest_record_line(spec)));
    CHECK(round == spec);
  }
  const auto tables = load_fact_tables(std::string(FINDBENCH_SOURCE_DATA_DIR) + "/facts");
  auto relations = sample_relation_dataset(20, 5, tables);
  make_test_sets(relations, &tables);
  for (const auto& spec : relations.functions) {
    const auto round = function_spec_from_json(nlohmann::json::parse(manifest_record_line(spec)));
    CHECK(round == spec);
  }
}

TEST_CASE("serialization is byte-stable") {
  auto m1 = sample_numeric_dataset(30, 9);
  auto m2 = sample_numeric_dataset(30, 9);
  make_test_sets(m1);
  make_test_sets(m2);
  REQUIRE(m1.functions.size() == m2.functions.size());
  for (std::size_t i = 0; i < m1.functions.size(); ++i)
    CHECK(manifest_record_line(m1.functions[i]) == manifest_record_line(m2.functions[i]));
}

TEST_CASE("manifest directory round-trips") {
  namespace fs = std::filesystem;
  const std::string dir = (fs::temp_directory_path() / "fb_manifest_rt").string();
  fs::remove_all(dir);
  auto manifest = sample_numeric_dataset(25, 3);
  make_test_sets(manifest);
  manifest.dataset_id = "rt-test";
  write_manifest(manifest, dir);
  const auto loaded = read_manifest(dir);
  CHECK(loaded.dataset_id == manifest.dataset_id);
  CHECK(loaded.seed == manifest.seed);
  REQUIRE(loaded.functions.size() == manifest.functions.size());
  for (std::size_t i = 0; i < manifest.functions.size(); ++i)
    CHECK(loaded.functions[i] == manifest.functions[i]);
  fs::remove_all(dir);
}

TEST_CASE("manifest counts partition the functions") {
  auto manifest = sample_numeric_dataset(40, 12);
  int total = 0;
  for (const auto& [cat, subs] : manifest.counts())
    for (const auto& [sub, n] : subs) total += n;
  CHECK(total == 40);
}
