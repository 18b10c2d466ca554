#include "findbench/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "findbench/util.hpp"

namespace findbench {

double nmse(const Evaluable& truth, const Evaluable& candidate) {
  double num = 0.0, den = 0.0;
  std::size_t defined = 0;
  for (double x : canonical_grid()) {
    const auto f = truth(x);
    if (!f) continue;
    ++defined;
    den += *f * *f;
    const auto g = candidate(x);
    const double err = g ? (*f - *g) : *f;  // undefined candidate: maximal local error
    num += err * err;
  }
  if (defined == 0) throw std::runtime_error("nmse: truth undefined on the entire grid");
  if (den == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return num / den;
}

Evaluable truth_evaluable(const FunctionSpec& spec, const MlpWeights* net) {
  if (spec.category != Category::Numeric)
    throw std::runtime_error("truth_evaluable: numeric specs only");
  FunctionSpec base = spec;
  base.noise.reset();
  const std::optional<CorruptionSpec> corruption = base.corruption;
  const bool approximated = base.approximation.has_value();
  if (approximated && !net)
    throw std::runtime_error("truth_evaluable: approximated spec needs its weights");
  const NumericExpr expr = *base.numeric;
  const MlpWeights net_copy = net ? *net : MlpWeights{};
  return [expr, corruption, approximated, net_copy](double x) -> std::optional<double> {
    if (corruption && corruption->corrupted_at(x)) return corruption->mean;
    if (approximated) return mlp_forward(net_copy, x);
    return eval_numeric(expr, x);
  };
}

Evaluable interpretation_evaluable(const Interpretation& interp) {
  if (!interp.numeric_program)
    return [](double) -> std::optional<double> { return std::nullopt; };
  const NumericExpr expr = *interp.numeric_program;
  const std::optional<CorruptionEstimate> corruption = interp.corruption;
  return [expr, corruption](double x) -> std::optional<double> {
    if (corruption && corruption->corrupted_at(x)) return corruption->mean;
    return eval_numeric(expr, x);
  };
}

std::string spec_output(const FunctionSpec& spec, const std::string& input,
                        const std::vector<FactTable>* tables) {
  switch (spec.category) {
    case Category::Strings:
      return eval_string(*spec.program, input);
    case Category::Relations: {
      if (!tables) throw std::runtime_error("spec_output: relation specs need fact tables");
      return eval_relation(*spec.relation, find_table(*tables, spec.relation->table), input);
    }
    default:
      throw std::runtime_error("spec_output: text categories only");
  }
}

TextProgram interpretation_text_program(const Interpretation& interp,
                                        const std::vector<FactTable>* tables) {
  if (interp.string_program) {
    const StringProgram prog = *interp.string_program;
    return [prog](const std::string& in) -> std::optional<std::string> {
      try {
        return eval_string(prog, in);
      } catch (const domain_error&) {
        return std::nullopt;
      }
    };
  }
  if (interp.relation_program && tables) {
    const RelationSpec rel = *interp.relation_program;
    const FactTable table = find_table(*tables, rel.table);
    return [rel, table](const std::string& in) -> std::optional<std::string> {
      return eval_relation(rel, table, in);
    };
  }
  return nullptr;
}

double exact_match(const FunctionSpec& spec, const TextProgram& candidate,
                   const std::vector<FactTable>* tables) {
  const auto& inputs = spec.test_set.inputs;
  if (inputs.empty()) throw std::runtime_error("exact_match: spec has no test inputs");
  int hits = 0;
  for (const auto& in : inputs) {
    const std::string want = spec_output(spec, in, tables);
    if (!candidate) continue;
    const auto got = candidate(in);
    if (got && *got == want) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(inputs.size());
}

Judge make_simulation_judge(const Interpretation& interp, const std::vector<FactTable>* tables) {
  const TextProgram prog = interpretation_text_program(interp, tables);
  return [prog](const UnitTestItem& item) -> std::optional<int> {
    if (!prog) return std::nullopt;
    int match = -1;
    for (std::size_t i = 0; i < item.candidates.size(); ++i) {
      const auto got = prog(item.candidates[i].input);
      if (got && *got == item.candidates[i].output) {
        if (match >= 0) return std::nullopt;  // tie: abstain
        match = static_cast<int>(i);
      }
    }
    if (match < 0) return std::nullopt;
    return match;
  };
}

Judge make_random_judge(std::uint64_t seed) {
  auto rng = std::make_shared<Rng>(seed);
  return [rng](const UnitTestItem&) -> std::optional<int> {
    return static_cast<int>(rng->uniform_int(0, 2));
  };
}

UnitTestOutcome unit_test(const std::string& description, const std::string& function_id,
                          const DatasetManifest& manifest, const Judge& judge, int trials,
                          std::uint64_t seed, const std::vector<FactTable>* tables) {
  const FunctionSpec& spec = manifest.find(function_id);
  if (spec.test_set.inputs.empty())
    throw std::runtime_error("unit_test: function has no test set: " + function_id);

  // Same-category pool for distractors.
  std::vector<const FunctionSpec*> pool;
  for (const auto& f : manifest.functions)
    if (f.category == spec.category && f.id != spec.id && !f.test_set.inputs.empty())
      pool.push_back(&f);
  if (pool.empty())
    throw std::runtime_error("unit_test: no same-category distractor functions available");

  Rng rng(mix_keys(seed, spec.seed));
  UnitTestOutcome outcome;
  int correct = 0;
  for (int t = 0; t < trials; ++t) {
    const std::string& gt_input = spec.test_set.inputs[t % spec.test_set.inputs.size()];
    CandidatePair truth{gt_input, spec_output(spec, gt_input, tables)};

    std::vector<CandidatePair> distractors;
    int guard = 0;
    while (distractors.size() < 2 && guard++ < 1000) {
      const auto& other = *pool[rng.uniform_int(0, static_cast<std::int64_t>(pool.size()) - 1)];
      const std::string& din =
          other.test_set.inputs[rng.uniform_int(0, static_cast<std::int64_t>(other.test_set.inputs.size()) - 1)];
      CandidatePair cand{din, spec_output(other, din, tables)};
      // Reject distractors the function under test also satisfies (a
      // pair two candidates fit has no single right answer), and exact
      // duplicates of candidates already in the item.
      if (spec_output(spec, cand.input, tables) == cand.output) continue;
      if (cand.input == truth.input && cand.output == truth.output) continue;
      bool dup = false;
      for (const auto& d : distractors)
        dup |= (d.input == cand.input && d.output == cand.output);
      if (dup) continue;
      distractors.push_back(std::move(cand));
    }
    if (distractors.size() < 2)
      throw std::runtime_error("unit_test: could not sample valid distractors for " + function_id);

    UnitTestItem item;
    item.description = description;
    item.candidates = {truth, distractors[0], distractors[1]};
    std::vector<int> order = {0, 1, 2};
    rng.shuffle(order);
    std::vector<CandidatePair> shuffled(3);
    for (int i = 0; i < 3; ++i) shuffled[i] = item.candidates[order[i]];
    item.candidates = shuffled;
    item.truth_index = static_cast<int>(std::find(order.begin(), order.end(), 0) - order.begin());

    item.verdict = judge(item);
    if (item.verdict && *item.verdict == item.truth_index) ++correct;
    outcome.items.push_back(std::move(item));
  }
  outcome.score = trials > 0 ? static_cast<double>(correct) / trials : 0.0;
  return outcome;
}

double mean_success(const std::vector<EvalRecord>& records) {
  if (records.empty()) throw std::runtime_error("mean_success: empty record set");
  const std::string& indicator = records.front().indicator;
  int successes = 0;
  for (const auto& r : records) {
    if (r.indicator != indicator)
      throw std::runtime_error("mean_success: mixed indicator kinds in one aggregate cell");
    successes += r.success ? 1 : 0;
  }
  return static_cast<double>(successes) / static_cast<double>(records.size());
}

EvalReport aggregate(std::vector<EvalRecord> records) {
  if (records.empty()) throw std::runtime_error("aggregate: no records");
  std::sort(records.begin(), records.end(), [](const EvalRecord& a, const EvalRecord& b) {
    if (a.id != b.id) return a.id < b.id;
    return a.indicator < b.indicator;
  });
  EvalReport report;
  report.records = std::move(records);
  auto bump = [&report](const std::string& key, const EvalRecord& r) {
    auto& cell = report.aggregates[key];
    ++cell.count;
    cell.successes += r.success ? 1 : 0;
    cell.rate = static_cast<double>(cell.successes) / cell.count;
  };
  for (const auto& r : report.records) {
    bump(r.category + "/*/" + r.indicator, r);
    bump(r.category + "/" + r.subcategory + "/" + r.indicator, r);
  }
  return report;
}

namespace {

nlohmann::ordered_json record_to_json(const EvalRecord& r) {
  nlohmann::ordered_json j;
  j["id"] = r.id;
  j["category"] = r.category;
  j["subcategory"] = r.subcategory;
  j["indicator"] = r.indicator;
  j["raw"] = r.raw;
  j["success"] = r.success;
  j["flagged"] = r.flagged;
  return j;
}

EvalRecord record_from_json(const nlohmann::json& j) {
  EvalRecord r;
  r.id = j.at("id").get<std::string>();
  r.category = j.at("category").get<std::string>();
  r.subcategory = j.at("subcategory").get<std::string>();
  r.indicator = j.at("indicator").get<std::string>();
  r.raw = j.at("raw").get<double>();
  r.success = j.at("success").get<bool>();
  r.flagged = j.value("flagged", false);
  return r;
}

}  // namespace

void write_report_json(const EvalReport& report, const std::string& path) {
  nlohmann::ordered_json j;
  j["format_version"] = kFormatVersion;
  j["engine_version"] = kEngineVersion;
  j["seed"] = report.seed;
  j["judge"] = report.judge_identity;
  nlohmann::ordered_json records = nlohmann::ordered_json::array();
  for (const auto& r : report.records) records.push_back(record_to_json(r));
  j["records"] = records;
  nlohmann::ordered_json aggs = nlohmann::ordered_json::object();
  for (const auto& [key, cell] : report.aggregates) {
    nlohmann::ordered_json c;
    c["count"] = cell.count;
    c["successes"] = cell.successes;
    c["rate"] = cell.rate;
    aggs[key] = c;
  }
  j["aggregates"] = aggs;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write report: " + path);
  out << j.dump(2) << "\n";
}

EvalReport read_report_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read report: " + path);
  nlohmann::json j;
  in >> j;
  EvalReport report;
  report.seed = j.value("seed", std::uint64_t{0});
  report.judge_identity = j.value("judge", "");
  for (const auto& r : j.at("records")) report.records.push_back(record_from_json(r));
  for (const auto& [key, c] : j.at("aggregates").items()) {
    AggregateCell cell;
    cell.count = c.at("count").get<int>();
    cell.successes = c.at("successes").get<int>();
    cell.rate = c.at("rate").get<double>();
    report.aggregates[key] = cell;
  }
  return report;
}

void write_report_csv(const EvalReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write report: " + path);
  out << "# " << kEngineVersion << " format=" << kFormatVersion << " seed=" << report.seed
      << " judge=" << report.judge_identity << "\n";
  out << "category,subcategory,indicator,count,successes,rate\n";
  for (const auto& [key, cell] : report.aggregates) {
    std::string cat = key, sub, ind;
    const auto p1 = cat.find('/');
    const auto p2 = cat.rfind('/');
    sub = cat.substr(p1 + 1, p2 - p1 - 1);
    ind = cat.substr(p2 + 1);
    cat = cat.substr(0, p1);
    out << cat << "," << sub << "," << ind << "," << cell.count << "," << cell.successes << ","
        << format_double(cell.rate) << "\n";
  }
}

std::vector<EvalRecord> score_interpretation(const FunctionSpec& spec,
                                             const Interpretation& interp,
                                             const DatasetManifest& manifest,
                                             const std::vector<FactTable>* tables,
                                             const Judge* unit_judge, std::uint64_t seed,
                                             const MlpWeights* net) {
  std::vector<EvalRecord> records;
  EvalRecord base;
  base.id = spec.id;
  base.category = category_name(spec.category);
  base.subcategory = spec.subcategory();
  switch (spec.category) {
    case Category::Numeric: {
      EvalRecord r = base;
      r.indicator = "nmse";
      if (interp.numeric_program) {
        r.raw = nmse(truth_evaluable(spec, net), interpretation_evaluable(interp));
        r.success = r.raw < kNmseSuccessThreshold;
      } else {
        r.raw = std::numeric_limits<double>::infinity();
        r.success = false;
        r.flagged = true;  // no structured program to score
      }
      records.push_back(r);
      break;
    }
    case Category::Strings:
    case Category::Relations: {
      EvalRecord em = base;
      em.indicator = "exact_match";
      const TextProgram prog = interpretation_text_program(interp, tables);
      em.raw = exact_match(spec, prog, tables);
      em.success = em.raw == 1.0;
      em.flagged = !prog;
      records.push_back(em);

      EvalRecord ut = base;
      ut.indicator = "unit_test";
      Judge judge = unit_judge ? *unit_judge : make_simulation_judge(interp, tables);
      const auto outcome = unit_test(interp.description, spec.id, manifest, judge, 10, seed, tables);
      ut.raw = outcome.score;
      ut.success = outcome.score > kUnitTestChance;
      records.push_back(ut);
      break;
    }
  }
  return records;
}

}  // namespace findbench
