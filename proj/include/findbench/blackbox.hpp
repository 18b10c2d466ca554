#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "findbench/function_spec.hpp"
#include "findbench/mlp.hpp"
#include "findbench/serialization.hpp"

namespace findbench {

struct usage_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct budget_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SessionBudget {
  int max_queries = 100000;       // total inputs evaluated over the session
  int max_inputs_per_call = 128;
};

struct TranscriptEntry {
  std::string input;
  std::string output;
  std::int64_t timestamp_ms = 0;
};

// A live query channel to one function. The only information that leaves
// the session is the Appendix-style output line; evaluation draws are
// keyed by (spec seed, nonce, query counter) so a session with nonce 0
// replays byte-for-byte.
class BlackBoxSession {
 public:
  BlackBoxSession(FunctionSpec spec, SessionBudget budget, std::uint64_t nonce,
                  std::shared_ptr<const FactTable> table = nullptr,
                  std::shared_ptr<const MlpWeights> net = nullptr);

  // Evaluates each input and returns the formatted line
  //   Function input - output pairs: (in1, out1)(in2, out2)...
  // Unparseable and undefined numeric results print as None; unknown and
  // corrupted relation inputs print as undefined. Throws usage_error on
  // an empty or oversized input list, budget_error when the budget would
  // be exceeded.
  std::string query(const std::vector<std::string>& inputs);

  // Single-input convenience used by the interpreters.
  std::string query_one(const std::string& input);

  const std::vector<TranscriptEntry>& transcript() const { return transcript_; }
  int query_count() const { return static_cast<int>(transcript_.size()); }
  int remaining_budget() const { return budget_.max_queries - query_count(); }
  const SessionBudget& budget() const { return budget_; }
  const std::string& function_id() const { return spec_.id; }
  Category category() const { return spec_.category; }
  std::uint64_t nonce() const { return nonce_; }

 private:
  std::string evaluate_one(const std::string& raw);

  FunctionSpec spec_;
  SessionBudget budget_;
  std::uint64_t nonce_;
  std::shared_ptr<const FactTable> table_;
  std::shared_ptr<const MlpWeights> net_;
  std::vector<TranscriptEntry> transcript_;
};

// Opens a session on a manifest function. `dataset_dir` locates weight
// sidecars and fact tables; it may be empty for specs that need neither.
// Nonce 0 is the reproducible benchmark default.
BlackBoxSession open_session(const DatasetManifest& manifest, const std::string& id,
                             SessionBudget budget, const std::string& dataset_dir = "",
                             std::uint64_t nonce = 0);

// Session over an in-memory spec (tests and library callers).
BlackBoxSession open_session_from_spec(const FunctionSpec& spec, SessionBudget budget,
                                       std::uint64_t nonce = 0,
                                       std::shared_ptr<const FactTable> table = nullptr,
                                       std::shared_ptr<const MlpWeights> net = nullptr);

}  // namespace findbench
