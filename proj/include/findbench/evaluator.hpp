#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "findbench/interpretation.hpp"
#include "findbench/mlp.hpp"
#include "findbench/serialization.hpp"

namespace findbench {

using Evaluable = std::function<std::optional<double>(double)>;

// Normalized mean-squared error E[(f-g)^2] / E[f^2] over the canonical
// 513-point grid on [-128, 128]. Grid points where the truth is
// undefined are skipped; a candidate undefined at a truth-defined point
// contributes the squared truth value (maximal local error). Throws when
// the truth is undefined on the whole grid.
double nmse(const Evaluable& truth, const Evaluable& candidate);

inline constexpr double kNmseSuccessThreshold = 0.1;

// Scoring truth for a numeric spec: the noise modifier is stripped and
// the corrupted side evaluates to the replacement mean (the
// deterministic center of the N(mean, 0.01) draws).
Evaluable truth_evaluable(const FunctionSpec& spec,
                          const MlpWeights* net = nullptr);

// Candidate side of an interpretation: the structured program, overlaid
// with the reported corruption estimate when one is present.
Evaluable interpretation_evaluable(const Interpretation& interp);

// Deterministic output of a string/relation spec on one input (the
// ground-truth side of exact matching and unit tests).
std::string spec_output(const FunctionSpec& spec, const std::string& input,
                        const std::vector<FactTable>* tables);

// Executor for an interpretation's structured program on text inputs;
// nullopt when the interpretation has no program for the category.
using TextProgram = std::function<std::optional<std::string>(const std::string&)>;
TextProgram interpretation_text_program(const Interpretation& interp,
                                        const std::vector<FactTable>* tables);

// Fraction of the 10 test inputs with byte-equal outputs; candidates
// that raise count as mismatches. Success requires fraction == 1.0.
double exact_match(const FunctionSpec& spec, const TextProgram& candidate,
                   const std::vector<FactTable>* tables);

// --- Unit-test protocol ----------------------------------------------

struct CandidatePair {
  std::string input;
  std::string output;
};

struct UnitTestItem {
  std::string description;
  std::vector<CandidatePair> candidates;  // exactly 3
  int truth_index = 0;
  std::optional<int> verdict;
};

// A judge maps an item to a candidate index (0-2); nullopt abstains and
// the item scores incorrect.
using Judge = std::function<std::optional<int>(const UnitTestItem&)>;

// Deterministic judge that executes the interpretation's structured
// program on each candidate input and picks the unique match; ties and
// zero matches abstain.
Judge make_simulation_judge(const Interpretation& interp, const std::vector<FactTable>* tables);

// Uniform-random judge (chance baseline).
Judge make_random_judge(std::uint64_t seed);

struct UnitTestOutcome {
  double score = 0.0;
  std::vector<UnitTestItem> items;
};

// Builds `trials` items for the function: the ground-truth pair comes
// from the function's frozen test set (which includes the two
// corrupted-subdomain samples when present); two distractor pairs are
// drawn from other functions of the same category, rejecting any
// distractor the ground-truth function itself satisfies so the protocol
// stays well-posed. Candidate order is shuffled by `seed`.
UnitTestOutcome unit_test(const std::string& description, const std::string& function_id,
                          const DatasetManifest& manifest, const Judge& judge, int trials,
                          std::uint64_t seed, const std::vector<FactTable>* tables);

inline constexpr double kUnitTestChance = 1.0 / 3.0;

// --- Reports -----------------------------------------------------------

struct EvalRecord {
  std::string id;
  std::string category;
  std::string subcategory;
  std::string indicator;  // "nmse" | "exact_match" | "unit_test"
  double raw = 0.0;
  bool success = false;
  bool flagged = false;  // judge failure or missing program
};

struct AggregateCell {
  int count = 0;
  int successes = 0;
  double rate = 0.0;
};

struct EvalReport {
  std::vector<EvalRecord> records;
  // key: category / subcategory / indicator ("*" aggregates a category)
  std::map<std::string, AggregateCell> aggregates;
  std::uint64_t seed = 0;
  std::string judge_identity;
};

// Means per category and subcategory; throws on an empty record set.
EvalReport aggregate(std::vector<EvalRecord> records);

// Mean success over records that must share one indicator; throws on a
// mixed-indicator cell.
double mean_success(const std::vector<EvalRecord>& records);

void write_report_json(const EvalReport& report, const std::string& path);
void write_report_csv(const EvalReport& report, const std::string& path);
EvalReport read_report_json(const std::string& path);

// Scores one interpretation with the category-appropriate indicators.
std::vector<EvalRecord> score_interpretation(const FunctionSpec& spec,
                                             const Interpretation& interp,
                                             const DatasetManifest& manifest,
                                             const std::vector<FactTable>* tables,
                                             const Judge* unit_judge, std::uint64_t seed,
                                             const MlpWeights* net = nullptr);

}  // namespace findbench
