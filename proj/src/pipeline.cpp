#include "findbench/pipeline.hpp"

#include <atomic>
#include <filesystem>
#include <stdexcept>
#include <thread>

#include "findbench/interpret_numeric.hpp"
#include "findbench/interpret_string.hpp"

namespace findbench {

namespace {

namespace fs = std::filesystem;

// Runs fn(i) for i in [0, n) over `jobs` workers; output slots are
// preallocated so completion order cannot reorder results.
void parallel_for(int n, int jobs, const std::function<void(int)>& fn) {
  jobs = std::max(1, std::min(jobs, n));
  if (jobs == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> workers;
  std::exception_ptr failure;
  std::mutex failure_mu;
  for (int w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      while (true) {
        const int i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mu);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& w : workers) w.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

DatasetManifest generate_dataset(const GenerateConfig& config) {
  if (config.counts.empty()) throw std::runtime_error("generate: no categories requested");
  if (fs::exists(config.out_dir) && !fs::is_empty(config.out_dir) && !config.force)
    throw std::runtime_error("output directory exists and is not empty (use --force): " +
                             config.out_dir);

  std::vector<FactTable> tables;
  bool needs_tables = false;
  for (const auto& [cat, count] : config.counts) needs_tables |= (cat == Category::Relations);
  if (needs_tables) {
    if (config.facts_dir.empty())
      throw std::runtime_error("generate: relation specs need --facts <dir>");
    tables = load_fact_tables(config.facts_dir);
  }

  DatasetManifest manifest;
  manifest.seed = config.seed;
  std::size_t offset = 0;
  std::string id_parts;
  for (const auto& [cat, count] : config.counts) {
    DatasetManifest part;
    switch (cat) {
      case Category::Numeric: {
        NumericGenOptions opts = config.numeric;
        opts.id_offset = offset;
        part = sample_numeric_dataset(count, config.seed, opts);
        break;
      }
      case Category::Strings: {
        StringGenOptions opts = config.strings;
        opts.id_offset = offset;
        part = sample_string_dataset(count, config.seed, opts);
        break;
      }
      case Category::Relations:
        part = sample_relation_dataset(count, config.seed, tables, offset);
        break;
    }
    offset += count;
    if (!id_parts.empty()) id_parts += "+";
    id_parts += part.dataset_id;
    for (auto& f : part.functions) manifest.functions.push_back(std::move(f));
  }
  manifest.dataset_id = id_parts;
  make_test_sets(manifest, needs_tables ? &tables : nullptr);

  fs::create_directories(config.out_dir);

  // Train and write the MLP sidecars.
  std::vector<int> approx_indices;
  for (int i = 0; i < static_cast<int>(manifest.functions.size()); ++i)
    if (manifest.functions[i].approximation) approx_indices.push_back(i);
  if (!approx_indices.empty() && config.train_mlps) {
    fs::create_directories(fs::path(config.out_dir) / "weights");
    parallel_for(static_cast<int>(approx_indices.size()), config.jobs, [&](int k) {
      const auto& spec = manifest.functions[approx_indices[k]];
      const MlpWeights net = train_approximation(*spec.numeric, spec.seed, config.mlp);
      save_mlp(net, (fs::path(config.out_dir) / spec.approximation->weights_path).string());
    });
  }

  // Copy the referenced fact tables into the dataset.
  if (needs_tables) {
    fs::create_directories(fs::path(config.out_dir) / "facts");
    std::set<std::string> used;
    for (const auto& f : manifest.functions)
      if (f.relation) used.insert(f.relation->table);
    for (const auto& name : used) {
      const FactTable& t = find_table(tables, name);
      save_fact_table(t, (fs::path(config.out_dir) / "facts" / (name + ".json")).string());
    }
  }

  write_manifest(manifest, config.out_dir);
  return manifest;
}

std::vector<Interpretation> run_reference_interpreter(const DatasetManifest& manifest,
                                                      const InterpretConfig& config) {
  Category want;
  if (config.interpreter == "numeric-ref") {
    want = Category::Numeric;
  } else if (config.interpreter == "string-ref") {
    want = Category::Strings;
  } else if (config.interpreter == "relation-ref") {
    want = Category::Relations;
  } else {
    throw std::runtime_error("unknown interpreter: " + config.interpreter);
  }

  std::vector<const FunctionSpec*> specs;
  for (const auto& f : manifest.functions) {
    if (f.category != want) continue;
    if (!config.ids.empty() &&
        std::find(config.ids.begin(), config.ids.end(), f.id) == config.ids.end())
      continue;
    specs.push_back(&f);
  }

  std::vector<FactTable> tables;
  ProbeLexicon lexicon;
  if (want == Category::Relations) {
    tables = load_fact_tables((fs::path(config.dataset_dir) / "facts").string());
    const fs::path lex_dir = fs::path(config.dataset_dir) / "lexicons";
    lexicon = fs::is_directory(lex_dir) ? load_lexicons(lex_dir.string())
                                        : lexicon_from_tables(tables);
  }

  std::vector<Interpretation> out(specs.size());
  parallel_for(static_cast<int>(specs.size()), config.jobs, [&](int i) {
    SessionBudget budget;
    budget.max_queries = config.budget;
    BlackBoxSession session =
        open_session(manifest, specs[i]->id, budget, config.dataset_dir, 0);
    switch (want) {
      case Category::Numeric:
        out[i] = interpret_numeric(session, config.budget);
        break;
      case Category::Strings:
        out[i] = interpret_string(session, config.budget);
        break;
      case Category::Relations:
        out[i] = interpret_relation(session, config.budget, lexicon, tables);
        break;
    }
  });
  return out;
}

EvalReport evaluate_interpretations(const DatasetManifest& manifest,
                                    const std::vector<Interpretation>& interps,
                                    const EvaluateConfig& config) {
  if (interps.empty()) throw std::runtime_error("evaluate: no interpretations to score");
  std::vector<FactTable> tables;
  const fs::path facts = fs::path(config.dataset_dir) / "facts";
  if (fs::is_directory(facts)) tables = load_fact_tables(facts.string());

  std::optional<Judge> judge_override;
  if (config.judge == "random") {
    judge_override = make_random_judge(config.seed);
  } else if (config.judge != "simulation") {
    throw std::runtime_error("unknown judge: " + config.judge);
  }

  std::vector<std::vector<EvalRecord>> per(interps.size());
  parallel_for(static_cast<int>(interps.size()), config.jobs, [&](int i) {
    const auto& interp = interps[i];
    const FunctionSpec& spec = manifest.find(interp.function_id);
    std::unique_ptr<MlpWeights> net;
    if (spec.approximation) {
      net = std::make_unique<MlpWeights>(
          load_mlp((fs::path(config.dataset_dir) / spec.approximation->weights_path).string()));
    }
    per[i] = score_interpretation(spec, interp, manifest, tables.empty() ? nullptr : &tables,
                                  judge_override ? &*judge_override : nullptr, config.seed,
                                  net.get());
  });

  std::vector<EvalRecord> records;
  for (auto& list : per)
    for (auto& r : list) records.push_back(std::move(r));
  EvalReport report = aggregate(std::move(records));
  report.seed = config.seed;
  report.judge_identity = config.judge;
  return report;
}

}  // namespace findbench
