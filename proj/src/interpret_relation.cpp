#include "findbench/interpret_relation.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include <json.hpp>

namespace findbench {

ProbeLexicon load_lexicons(const std::string& dir) {
  namespace fs = std::filesystem;
  ProbeLexicon lex;
  if (!fs::is_directory(dir)) throw std::runtime_error("not a lexicon directory: " + dir);
  std::vector<std::string> paths;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.path().extension() == ".json") paths.push_back(entry.path().string());
  std::sort(paths.begin(), paths.end());
  for (const auto& p : paths) {
    std::ifstream in(p);
    nlohmann::json j;
    in >> j;
    lex[j.at("input_kind").get<std::string>()] = j.at("words").get<std::vector<std::string>>();
  }
  return lex;
}

ProbeLexicon lexicon_from_tables(const std::vector<FactTable>& tables) {
  ProbeLexicon lex;
  for (const auto& t : tables) {
    auto& words = lex[t.input_kind.empty() ? t.name : t.input_kind];
    std::set<std::string> have(words.begin(), words.end());
    // Every tagged key first (corruption probes need subdomain coverage),
    // then the rest of the keys.
    for (const auto& [tag, keys] : t.tags)
      for (const auto& k : keys)
        if (have.insert(k).second) words.push_back(k);
    for (const auto& [k, v] : t.pairs)
      if (have.insert(k).second) words.push_back(k);
  }
  return lex;
}

Interpretation interpret_relation(BlackBoxSession& session, int budget,
                                  const ProbeLexicon& lexicon,
                                  const std::vector<FactTable>& tables) {
  Interpretation interp;
  interp.function_id = session.function_id();
  const int cap = std::min(budget, session.remaining_budget());
  int spent = 0;

  std::map<std::string, std::string> observed;  // input -> output
  auto ask_batch = [&](const std::vector<std::string>& inputs) {
    std::vector<std::string> todo;
    for (const auto& in : inputs) {
      if (observed.count(in)) continue;
      if (spent + static_cast<int>(todo.size()) + 1 > cap) break;
      todo.push_back(in);
    }
    const int batch = session.budget().max_inputs_per_call;
    std::size_t i = 0;
    while (i < todo.size()) {
      std::vector<std::string> args;
      while (i < todo.size() && static_cast<int>(args.size()) < batch) args.push_back(todo[i++]);
      const std::size_t before = session.transcript().size();
      session.query(args);
      spent += static_cast<int>(args.size());
      for (std::size_t k = 0; k < args.size(); ++k)
        observed[args[k]] = session.transcript()[before + k].output;
    }
  };

  // Phase 1: identify the input kind with a slice of each lexicon.
  std::map<std::string, int> defined_per_kind;
  for (const auto& [kind, words] : lexicon) {
    std::vector<std::string> slice(words.begin(),
                                   words.begin() + std::min<std::size_t>(8, words.size()));
    ask_batch(slice);
    int defined = 0;
    for (const auto& w : slice) {
      const auto it = observed.find(w);
      if (it != observed.end() && it->second != kUndefined) ++defined;
    }
    defined_per_kind[kind] = defined;
  }
  std::string best_kind;
  int best_defined = 0;
  for (const auto& [kind, n] : defined_per_kind) {
    if (n > best_defined) {
      best_defined = n;
      best_kind = kind;
    }
  }
  if (best_kind.empty()) {
    interp.description = "unknown relation: no probe input produced a defined output";
    interp.domain_note = "unknown";
    interp.out_of_grammar = true;
    interp.query_count = session.query_count();
    return interp;
  }

  // Phase 2: probe the matching lexicon broadly.
  {
    const auto& words = lexicon.at(best_kind);
    std::vector<std::string> slice(words.begin(),
                                   words.begin() + std::min<std::size_t>(64, words.size()));
    ask_batch(slice);
  }

  // Phase 3: name the relation by agreement over defined outputs.
  const FactTable* best_table = nullptr;
  double best_agreement = 0.0;
  for (const auto& table : tables) {
    int matches = 0, defined = 0;
    for (const auto& [in, out] : observed) {
      if (out == kUndefined) continue;
      const auto key = table.find_key(in);
      if (!key) {
        ++defined;  // defined output for a key this table does not know
        continue;
      }
      ++defined;
      if (table.pairs.at(*key) == out) ++matches;
    }
    if (defined < 3) continue;
    const double agreement = static_cast<double>(matches) / defined;
    if (agreement > best_agreement) {
      best_agreement = agreement;
      best_table = &table;
    }
  }
  interp.query_count = session.query_count();
  if (!best_table || best_agreement <= 0.6) {
    interp.description = "unknown relation: no shipped fact table explains the observed pairs";
    interp.domain_note = "unknown";
    interp.out_of_grammar = true;
    interp.fit_score = best_agreement;
    return interp;
  }

  // Phase 4: probe each tagged subdomain for corruption.
  for (const auto& [tag, keys] : best_table->tags) {
    std::vector<std::string> members;
    for (const auto& w : lexicon.at(best_kind)) {
      if (members.size() >= 6) break;
      const auto key = best_table->find_key(w);
      if (key && keys.count(*key)) members.push_back(w);
    }
    ask_batch(members);
  }

  std::optional<std::string> corrupt_tag;
  {
    std::set<std::string> undefined_keys;
    for (const auto& [in, out] : observed) {
      if (out != kUndefined) continue;
      if (const auto key = best_table->find_key(in)) undefined_keys.insert(*key);
    }
    std::string candidate;
    int candidate_inside = 0;
    bool outside_hit = !undefined_keys.empty();
    for (const auto& [tag, keys] : best_table->tags) {
      int inside = 0;
      for (const auto& k : undefined_keys)
        if (keys.count(k)) ++inside;
      if (inside >= 2 && inside == static_cast<int>(undefined_keys.size())) {
        // All undefined keys fall in this one tag.
        if (inside > candidate_inside) {
          candidate_inside = inside;
          candidate = tag;
          outside_hit = false;
        }
      }
    }
    if (!candidate.empty() && !outside_hit) corrupt_tag = candidate;
  }

  interp.relation_program = RelationSpec{best_table->name, corrupt_tag};
  interp.fit_score = best_agreement;
  interp.description = best_table->description.empty()
                           ? "maps " + best_table->name + " inputs to outputs"
                           : best_table->description;
  if (corrupt_tag) {
    std::string phrase = *corrupt_tag;
    const auto it = best_table->tag_notes.find(*corrupt_tag);
    if (it != best_table->tag_notes.end()) phrase = it->second;
    interp.description += ", except it returns undefined when " + phrase;
    interp.domain_note = "returns undefined when " + phrase;
  } else {
    interp.domain_note = "none";
  }
  interp.query_count = session.query_count();
  return interp;
}

}  // namespace findbench
