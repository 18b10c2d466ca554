#include "findbench/fact_table.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace findbench {

namespace {

std::string lower(const std::string& s) {
  std::string out = s;
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

std::optional<std::string> FactTable::find_key(const std::string& input) const {
  if (pairs.count(input)) return input;
  const std::string needle = lower(input);
  for (const auto& [key, value] : pairs)
    if (lower(key) == needle) return key;
  return std::nullopt;
}

std::optional<std::string> FactTable::validate() const {
  if (name.empty()) return "fact table has no name";
  if (pairs.empty()) return "fact table '" + name + "' has no pairs";
  for (const auto& [tag, keys] : tags) {
    if (keys.empty()) return "tag '" + tag + "' in table '" + name + "' is empty";
    for (const auto& key : keys)
      if (!pairs.count(key))
        return "tag '" + tag + "' in table '" + name + "' references missing key '" + key + "'";
  }
  return std::nullopt;
}

std::string eval_relation(const RelationSpec& spec, const FactTable& table,
                          const std::string& input) {
  const auto key = table.find_key(input);
  if (!key) return kUndefined;
  if (spec.corrupt_tag) {
    const auto it = table.tags.find(*spec.corrupt_tag);
    if (it != table.tags.end() && it->second.count(*key)) return kUndefined;
  }
  return table.pairs.at(*key);
}

FactTable load_fact_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open fact table: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw std::runtime_error("bad JSON in " + path + ": " + e.what());
  }
  FactTable t;
  try {
    t.name = j.at("name").get<std::string>();
    t.description = j.value("description", "");
    t.input_kind = j.value("input_kind", "");
    for (const auto& [key, value] : j.at("pairs").items())
      t.pairs[key] = value.get<std::string>();
    if (j.contains("tags"))
      for (const auto& [tag, keys] : j.at("tags").items())
        for (const auto& k : keys) t.tags[tag].insert(k.get<std::string>());
    if (j.contains("tag_notes"))
      for (const auto& [tag, note] : j.at("tag_notes").items())
        t.tag_notes[tag] = note.get<std::string>();
  } catch (const std::exception& e) {
    throw std::runtime_error("bad fact-table schema in " + path + ": " + e.what());
  }
  if (auto err = t.validate())
    throw std::runtime_error("invalid fact table " + path + ": " + *err);
  return t;
}

void save_fact_table(const FactTable& table, const std::string& path) {
  nlohmann::ordered_json j;
  j["name"] = table.name;
  j["description"] = table.description;
  j["input_kind"] = table.input_kind;
  nlohmann::ordered_json pairs = nlohmann::ordered_json::object();
  for (const auto& [key, value] : table.pairs) pairs[key] = value;
  j["pairs"] = pairs;
  nlohmann::ordered_json tags = nlohmann::ordered_json::object();
  for (const auto& [tag, keys] : table.tags)
    tags[tag] = std::vector<std::string>(keys.begin(), keys.end());
  j["tags"] = tags;
  nlohmann::ordered_json notes = nlohmann::ordered_json::object();
  for (const auto& [tag, note] : table.tag_notes) notes[tag] = note;
  j["tag_notes"] = notes;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write fact table: " + path);
  out << j.dump(2) << "\n";
}

std::vector<FactTable> load_fact_tables(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw std::runtime_error("not a fact-table directory: " + dir);
  std::vector<std::string> paths;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.path().extension() == ".json") paths.push_back(entry.path().string());
  std::sort(paths.begin(), paths.end());
  std::vector<FactTable> tables;
  tables.reserve(paths.size());
  for (const auto& p : paths) tables.push_back(load_fact_table(p));
  return tables;
}

const FactTable& find_table(const std::vector<FactTable>& tables, const std::string& name) {
  for (const auto& t : tables)
    if (t.name == name) return t;
  throw std::runtime_error("unknown fact table: " + name);
}

}  // namespace findbench
