#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace findbench {

// Sentinel printed for out-of-domain and corrupted relation inputs.
inline constexpr const char* kUndefined = "undefined";

// Static key->value data backing one relation, with tagged key subsets
// available as corruption subdomains.
struct FactTable {
  std::string name;                              // e.g. "country_capital"
  std::string description;                       // e.g. "maps a country to its capital city"
  std::string input_kind;                        // e.g. "country"; names the probe lexicon
  std::map<std::string, std::string> pairs;      // canonical keys
  std::map<std::string, std::set<std::string>> tags;
  std::map<std::string, std::string> tag_notes;  // tag -> human phrase ("the country is in Asia")

  // Case-insensitive key lookup; returns the canonical key.
  std::optional<std::string> find_key(const std::string& input) const;

  // Invariant check: unique keys (map guarantees), tags reference
  // existing keys, non-empty table. Returns the first violation.
  std::optional<std::string> validate() const;
};

struct RelationSpec {
  std::string table;                      // fact table name
  std::optional<std::string> corrupt_tag; // keys in this tag return undefined

  bool operator==(const RelationSpec&) const = default;
};

// Deterministic lookup semantics: canonical value for known keys,
// `undefined` for unknown inputs and for keys inside the corrupted tag.
std::string eval_relation(const RelationSpec& spec, const FactTable& table,
                          const std::string& input);

// Loads every *.json fact table in a directory. Throws std::runtime_error
// with path and offending key on schema or invariant violations.
std::vector<FactTable> load_fact_tables(const std::string& dir);

// Loads one fact-table file.
FactTable load_fact_table(const std::string& path);

void save_fact_table(const FactTable& table, const std::string& path);

const FactTable& find_table(const std::vector<FactTable>& tables, const std::string& name);

}  // namespace findbench
