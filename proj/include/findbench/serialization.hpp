#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "findbench/function_spec.hpp"

namespace findbench {

inline constexpr const char* kFormatVersion = "1";
inline constexpr const char* kEngineVersion = "findbench 0.1.0";

// Canonical JSON forms. Field order is fixed (ordered_json) and floats
// print in shortest round-trip form, so serialized datasets are
// byte-stable under replay.
nlohmann::ordered_json to_json(const NumericExpr& expr);
nlohmann::ordered_json to_json(const StringProgram& prog);
nlohmann::ordered_json to_json(const RelationSpec& rel);
nlohmann::ordered_json to_json(const NoiseSpec& n);
nlohmann::ordered_json to_json(const CorruptionSpec& c);
nlohmann::ordered_json to_json(const TestSet& t);
nlohmann::ordered_json to_json(const FunctionSpec& spec);

NumericExpr numeric_expr_from_json(const nlohmann::json& j);
StringProgram string_program_from_json(const nlohmann::json& j);
RelationSpec relation_spec_from_json(const nlohmann::json& j);
NoiseSpec noise_spec_from_json(const nlohmann::json& j);
CorruptionSpec corruption_spec_from_json(const nlohmann::json& j);
TestSet test_set_from_json(const nlohmann::json& j);
FunctionSpec function_spec_from_json(const nlohmann::json& j);

struct DatasetManifest {
  std::string dataset_id;
  std::uint64_t seed = 0;
  std::string format_version = kFormatVersion;
  std::string engine_version = kEngineVersion;
  std::vector<FunctionSpec> functions;

  const FunctionSpec& find(const std::string& id) const;
  // category -> subcategory -> count
  std::map<std::string, std::map<std::string, int>> counts() const;
};

// Dataset directory layout:
//   <dir>/dataset.json     counts, seed, versions
//   <dir>/manifest.jsonl   one function record per line
//   <dir>/weights/<id>.json   MLP sidecars (approximated functions)
//   <dir>/facts/<table>.json  fact tables referenced by relation specs
void write_manifest(const DatasetManifest& manifest, const std::string& dir);
DatasetManifest read_manifest(const std::string& dir);

std::string manifest_record_line(const FunctionSpec& spec);

}  // namespace findbench
