// findbench: generate, exec, interpret, agent, evaluate, report.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage error.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>

#include "findbench/agent.hpp"
#include "findbench/http_chat.hpp"
#include "findbench/interpret_numeric.hpp"
#include "findbench/interpret_string.hpp"
#include "findbench/pipeline.hpp"
#include "findbench/util.hpp"

namespace fs = std::filesystem;
using namespace findbench;

namespace {

std::string default_facts_dir() {
  if (const char* env = std::getenv("FINDBENCH_DATA_DIR"))
    return (fs::path(env) / "facts").string();
#ifdef FINDBENCH_SOURCE_DATA_DIR
  const fs::path source = fs::path(FINDBENCH_SOURCE_DATA_DIR) / "facts";
  if (fs::is_directory(source)) return source.string();
#endif
  return "data/facts";
}

int cmd_generate(const std::string& out_dir, const std::string& category, int count,
                 std::uint64_t seed, const std::string& facts, bool no_train, int mlp_epochs,
                 bool force, int jobs) {
  GenerateConfig config;
  config.out_dir = out_dir;
  config.seed = seed;
  config.facts_dir = facts;
  config.train_mlps = !no_train;
  config.mlp.epochs = mlp_epochs;
  config.force = force;
  config.jobs = jobs;
  if (category == "all") {
    config.counts = {{Category::Numeric, count},
                     {Category::Strings, count},
                     {Category::Relations, count}};
  } else {
    const auto cat = category_from_name(category);
    if (!cat) throw CLI::ValidationError("--category", "unknown category: " + category);
    config.counts = {{*cat, count}};
  }
  const DatasetManifest manifest = generate_dataset(config);
  std::cout << "dataset " << manifest.dataset_id << " -> " << out_dir << "\n";
  for (const auto& [cat, subs] : manifest.counts()) {
    std::cout << "  " << cat << ":";
    for (const auto& [sub, n] : subs) std::cout << " " << sub << "=" << n;
    std::cout << "\n";
  }
  return 0;
}

int cmd_exec(const std::string& target, const std::vector<std::string>& args,
             std::uint64_t nonce) {
  const fs::path path(target);
  const std::string id = path.filename().string();
  const std::string dir = path.parent_path().string();
  if (id.empty() || dir.empty())
    throw CLI::ValidationError("target", "expected <dataset-dir>/<function-id>");
  if (args.empty()) throw CLI::ValidationError("args", "no function inputs given (use --)");
  const DatasetManifest manifest = read_manifest(dir);
  SessionBudget budget;
  budget.max_inputs_per_call = std::max<int>(budget.max_inputs_per_call, args.size());
  BlackBoxSession session = open_session(manifest, id, budget, dir, nonce);
  std::cout << session.query(args) << "\n";
  return 0;
}

int cmd_interpret(const std::string& dataset_dir, const std::string& interpreter, int budget,
                  int jobs, const std::vector<std::string>& ids, const std::string& out_path,
                  std::uint64_t seed) {
  const DatasetManifest manifest = read_manifest(dataset_dir);
  InterpretConfig config;
  config.dataset_dir = dataset_dir;
  config.interpreter = interpreter;
  config.budget = budget;
  config.jobs = jobs;
  config.ids = ids;
  const auto interps = run_reference_interpreter(manifest, config);
  write_interpretations(interps, out_path, seed);
  std::cout << interps.size() << " interpretations -> " << out_path << "\n";
  return 0;
}

int cmd_agent(const std::string& dataset_dir, const std::string& endpoint,
              const std::string& model, const std::string& credential_env,
              const std::string& mode_name, const std::string& exemplar_path, int max_turns,
              double temperature, double rps, const std::vector<std::string>& ids,
              const std::string& out_path, const std::string& interp_path) {
  AgentConfig config;
  config.endpoint_url = endpoint;
  config.model = model;
  config.credential_env = credential_env;
  config.temperature = temperature;
  config.max_turns = max_turns;
  config.rate_limit_rps = rps;
  const auto mode = agent_mode_from_name(mode_name);
  if (!mode) throw CLI::ValidationError("--mode", "unknown mode: " + mode_name);
  config.mode = *mode;

  std::map<std::string, std::vector<std::string>> exemplars;
  if (config.mode != AgentMode::Aia) {
    if (exemplar_path.empty())
      throw CLI::ValidationError("--exemplars", "mode " + mode_name + " needs an exemplar file");
    exemplars = load_exemplars(exemplar_path);
    if (exemplars.empty())
      throw CLI::ValidationError("--exemplars", "exemplar file is empty");
  }

  const DatasetManifest manifest = read_manifest(dataset_dir);
  RateLimiter limiter(config.rate_limit_rps);
  HttpChatClient client(config.endpoint_url, config.model, config.credential_env,
                        config.temperature, &limiter);

  std::vector<DialogueTranscript> transcripts;
  std::vector<Interpretation> interps;
  for (const auto& spec : manifest.functions) {
    if (!ids.empty() && std::find(ids.begin(), ids.end(), spec.id) == ids.end()) continue;
    SessionBudget budget;
    BlackBoxSession session = open_session(manifest, spec.id, budget, dataset_dir, 0);
    const std::vector<std::string>* ex = nullptr;
    if (config.mode != AgentMode::Aia) {
      const auto it = exemplars.find(spec.id);
      if (it == exemplars.end()) continue;
      ex = &it->second;
    }
    transcripts.push_back(run_agent(config, client, session, ex));
    interps.push_back(transcripts.back().interpretation);
  }
  write_transcripts(transcripts, out_path);
  if (!interp_path.empty()) write_interpretations(interps, interp_path, 0);
  std::cout << transcripts.size() << " dialogues -> " << out_path << "\n";
  return 0;
}

int cmd_evaluate(const std::string& dataset_dir, const std::string& interp_path,
                 const std::string& judge, std::uint64_t seed, int jobs,
                 const std::string& out_json, const std::string& out_csv) {
  const DatasetManifest manifest = read_manifest(dataset_dir);
  const auto interps = read_interpretations(interp_path);
  EvaluateConfig config;
  config.dataset_dir = dataset_dir;
  config.judge = judge;
  config.seed = seed;
  config.jobs = jobs;
  const EvalReport report = evaluate_interpretations(manifest, interps, config);
  write_report_json(report, out_json);
  if (!out_csv.empty()) write_report_csv(report, out_csv);
  std::cout << report.records.size() << " records -> " << out_json << "\n";
  for (const auto& [key, cell] : report.aggregates)
    std::cout << "  " << key << ": " << cell.rate << " (" << cell.successes << "/" << cell.count
              << ")\n";
  return 0;
}

int cmd_report(const std::string& report_path, const std::string& out_csv) {
  const EvalReport report = read_report_json(report_path);
  // Recompute aggregates from raw records and check the stored ones.
  EvalReport recomputed = aggregate(report.records);
  for (const auto& [key, cell] : report.aggregates) {
    const auto it = recomputed.aggregates.find(key);
    if (it == recomputed.aggregates.end() || it->second.rate != cell.rate)
      throw std::runtime_error("stored aggregate does not match records: " + key);
  }
  if (!out_csv.empty()) {
    recomputed.seed = report.seed;
    recomputed.judge_identity = report.judge_identity;
    write_report_csv(recomputed, out_csv);
  }
  for (const auto& [key, cell] : report.aggregates)
    std::cout << key << ": " << cell.rate << " (" << cell.successes << "/" << cell.count << ")\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"findbench: procedural black-box function interpretation benchmark"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML config mirroring the flags (flags win)");

  // generate
  auto* gen = app.add_subcommand("generate", "sample a dataset directory");
  std::string gen_out, gen_category = "numeric", gen_facts = default_facts_dir();
  int gen_count = 0, gen_jobs = 1, gen_mlp_epochs = 10000;
  std::uint64_t gen_seed = 0;
  bool gen_no_train = false, gen_force = false;
  gen->add_option("--out", gen_out, "output dataset directory")->required();
  gen->add_option("--category", gen_category, "numeric | strings | relations | all");
  gen->add_option("--count", gen_count, "functions per category")->required()
      ->check(CLI::PositiveNumber);
  gen->add_option("--seed", gen_seed, "dataset seed");
  gen->add_option("--facts", gen_facts, "fact-table directory (relations)");
  gen->add_flag("--no-train", gen_no_train, "skip MLP training (weight sidecars not written)");
  gen->add_option("--mlp-epochs", gen_mlp_epochs, "MLP training epochs");
  gen->add_flag("--force", gen_force, "overwrite a non-empty output directory");
  gen->add_option("--jobs", gen_jobs, "worker threads");

  // exec
  auto* exec = app.add_subcommand("exec", "query one function: exec <dir>/<id> -- <input>...");
  std::string exec_target;
  std::vector<std::string> exec_args;
  std::uint64_t exec_nonce = 0;
  exec->add_option("target", exec_target, "<dataset-dir>/<function-id>")->required();
  exec->add_option("--nonce", exec_nonce, "session nonce (default 0 = reproducible)");
  exec->add_option("args", exec_args, "function inputs (after --)");

  // interpret
  auto* interp = app.add_subcommand("interpret", "run a reference interpreter");
  std::string int_dataset, int_name, int_out = "interpretations.jsonl";
  int int_budget = 500, int_jobs = 1;
  std::uint64_t int_seed = 0;
  std::vector<std::string> int_ids;
  interp->add_option("--dataset", int_dataset, "dataset directory")->required();
  interp->add_option("--interpreter", int_name, "numeric-ref | string-ref | relation-ref")
      ->required();
  interp->add_option("--out", int_out, "interpretations JSONL path");
  interp->add_option("--budget", int_budget, "query budget per function")
      ->check(CLI::PositiveNumber);
  interp->add_option("--jobs", int_jobs, "worker threads");
  interp->add_option("--ids", int_ids, "restrict to these function ids");
  interp->add_option("--seed", int_seed, "seed recorded in the output header");

  // agent
  auto* agent = app.add_subcommand("agent", "drive an LM agent over the dataset");
  std::string ag_dataset, ag_endpoint, ag_model, ag_cred = "FINDBENCH_API_KEY";
  std::string ag_mode = "aia", ag_exemplars, ag_out = "transcripts.jsonl", ag_interp;
  int ag_turns = 16;
  double ag_temp = 0.0, ag_rps = 0.0;
  std::vector<std::string> ag_ids;
  agent->add_option("--dataset", ag_dataset, "dataset directory")->required();
  agent->add_option("--endpoint", ag_endpoint, "chat-completions URL")->required();
  agent->add_option("--model", ag_model, "model name")->required();
  agent->add_option("--credential-env", ag_cred, "env var holding the API key");
  agent->add_option("--mode", ag_mode, "aia | milan | aia+milan");
  agent->add_option("--exemplars", ag_exemplars, "exemplar JSON (milan modes)");
  agent->add_option("--max-turns", ag_turns, "dialogue turn limit");
  agent->add_option("--temperature", ag_temp, "sampling temperature");
  agent->add_option("--rate-limit", ag_rps, "max requests per second (0 = unlimited)");
  agent->add_option("--ids", ag_ids, "restrict to these function ids");
  agent->add_option("--out", ag_out, "transcripts JSONL path");
  agent->add_option("--interpretations", ag_interp, "also write parsed interpretations here");

  // evaluate
  auto* eval = app.add_subcommand("evaluate", "score interpretations against the manifest");
  std::string ev_dataset, ev_interp, ev_judge = "simulation", ev_json = "report.json", ev_csv;
  std::uint64_t ev_seed = 0;
  int ev_jobs = 1;
  eval->add_option("--dataset", ev_dataset, "dataset directory")->required();
  eval->add_option("--interpretations", ev_interp, "interpretations JSONL")->required();
  eval->add_option("--judge", ev_judge, "simulation | random");
  eval->add_option("--seed", ev_seed, "unit-test shuffle seed");
  eval->add_option("--jobs", ev_jobs, "worker threads");
  eval->add_option("--out", ev_json, "report JSON path");
  eval->add_option("--csv", ev_csv, "also write a CSV table");

  // report
  auto* rep = app.add_subcommand("report", "validate and re-render a report");
  std::string rep_path, rep_csv;
  rep->add_option("--report", rep_path, "report JSON path")->required();
  rep->add_option("--csv", rep_csv, "write a CSV table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed())
      return cmd_generate(gen_out, gen_category, gen_count, gen_seed, gen_facts, gen_no_train,
                          gen_mlp_epochs, gen_force, gen_jobs);
    if (exec->parsed()) return cmd_exec(exec_target, exec_args, exec_nonce);
    if (interp->parsed())
      return cmd_interpret(int_dataset, int_name, int_budget, int_jobs, int_ids, int_out,
                           int_seed);
    if (agent->parsed())
      return cmd_agent(ag_dataset, ag_endpoint, ag_model, ag_cred, ag_mode, ag_exemplars,
                       ag_turns, ag_temp, ag_rps, ag_ids, ag_out, ag_interp);
    if (eval->parsed())
      return cmd_evaluate(ev_dataset, ev_interp, ev_judge, ev_seed, ev_jobs, ev_json, ev_csv);
    if (rep->parsed()) return cmd_report(rep_path, rep_csv);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const usage_error& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
