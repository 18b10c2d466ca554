#include "findbench/blackbox.hpp"

#include <chrono>
#include <filesystem>

#include "findbench/util.hpp"

namespace findbench {

namespace {

double approx_forward_adapter(const void* net, double x) {
  return mlp_forward(*static_cast<const MlpWeights*>(net), x);
}

std::int64_t now_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

}  // namespace

BlackBoxSession::BlackBoxSession(FunctionSpec spec, SessionBudget budget, std::uint64_t nonce,
                                 std::shared_ptr<const FactTable> table,
                                 std::shared_ptr<const MlpWeights> net)
    : spec_(std::move(spec)), budget_(budget), nonce_(nonce), table_(std::move(table)),
      net_(std::move(net)) {
  if (spec_.category == Category::Relations && !table_)
    throw usage_error("relation session needs its fact table");
  if (spec_.approximation && !net_)
    throw usage_error("approximated session needs its weight sidecar");
}

std::string BlackBoxSession::evaluate_one(const std::string& raw) {
  const std::uint64_t counter = static_cast<std::uint64_t>(transcript_.size());
  switch (spec_.category) {
    case Category::Numeric: {
      const auto x = parse_double(raw);
      if (!x) return "None";
      Rng draws = query_rng(spec_, nonce_, counter);
      const auto v = eval_with_modifiers(spec_, *x, draws, net_ ? net_.get() : nullptr,
                                         net_ ? &approx_forward_adapter : nullptr);
      return v ? format_double(*v) : "None";
    }
    case Category::Strings: {
      try {
        return eval_string(*spec_.program, raw);
      } catch (const domain_error&) {
        return "None";
      }
    }
    case Category::Relations:
      return eval_relation(*spec_.relation, *table_, raw);
  }
  return "None";
}

std::string BlackBoxSession::query(const std::vector<std::string>& inputs) {
  if (inputs.empty()) throw usage_error("query needs at least one input");
  if (static_cast<int>(inputs.size()) > budget_.max_inputs_per_call)
    throw usage_error("too many inputs in one call (limit " +
                      std::to_string(budget_.max_inputs_per_call) + ")");
  if (query_count() + static_cast<int>(inputs.size()) > budget_.max_queries)
    throw budget_error("session budget of " + std::to_string(budget_.max_queries) +
                       " queries exhausted");
  std::string line = "Function input - output pairs: ";
  for (const auto& raw : inputs) {
    const std::string out = evaluate_one(raw);
    transcript_.push_back({raw, out, now_ms()});
    line += "(" + raw + ", " + out + ")";
  }
  return line;
}

std::string BlackBoxSession::query_one(const std::string& input) {
  const std::string line = query({input});
  return transcript_.back().output;
}

BlackBoxSession open_session_from_spec(const FunctionSpec& spec, SessionBudget budget,
                                       std::uint64_t nonce,
                                       std::shared_ptr<const FactTable> table,
                                       std::shared_ptr<const MlpWeights> net) {
  return BlackBoxSession(spec, budget, nonce, std::move(table), std::move(net));
}

BlackBoxSession open_session(const DatasetManifest& manifest, const std::string& id,
                             SessionBudget budget, const std::string& dataset_dir,
                             std::uint64_t nonce) {
  namespace fs = std::filesystem;
  const FunctionSpec& spec = manifest.find(id);
  std::shared_ptr<const FactTable> table;
  std::shared_ptr<const MlpWeights> net;
  if (spec.category == Category::Relations) {
    const fs::path path = fs::path(dataset_dir) / "facts" / (spec.relation->table + ".json");
    table = std::make_shared<const FactTable>(load_fact_table(path.string()));
  }
  if (spec.approximation) {
    const fs::path path = fs::path(dataset_dir) / spec.approximation->weights_path;
    net = std::make_shared<const MlpWeights>(load_mlp(path.string()));
  }
  return BlackBoxSession(spec, budget, nonce, std::move(table), std::move(net));
}

}  // namespace findbench
