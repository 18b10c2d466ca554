#pragma once

#include "findbench/evaluator.hpp"
#include "findbench/generator.hpp"
#include "findbench/interpret_relation.hpp"

namespace findbench {

struct GenerateConfig {
  std::string out_dir;
  std::uint64_t seed = 0;
  std::vector<std::pair<Category, int>> counts;  // categories to generate, in order
  NumericGenOptions numeric;
  StringGenOptions strings;
  std::string facts_dir;   // source fact tables (relations)
  bool train_mlps = true;
  MlpTrainOptions mlp;
  bool force = false;
  int jobs = 1;
};

// Samples every requested category into one manifest (ids are
// contiguous), fills test sets, trains and writes MLP sidecars, copies
// the fact tables relation specs reference, and writes the dataset
// directory. Returns the manifest.
DatasetManifest generate_dataset(const GenerateConfig& config);

struct InterpretConfig {
  std::string dataset_dir;
  std::string interpreter;  // numeric-ref | string-ref | relation-ref
  int budget = 500;
  int jobs = 1;
  std::vector<std::string> ids;  // empty = all matching category
};

// Runs the chosen reference interpreter over the dataset (sessions use
// nonce 0); results come back in manifest id order regardless of the
// worker count.
std::vector<Interpretation> run_reference_interpreter(const DatasetManifest& manifest,
                                                      const InterpretConfig& config);

struct EvaluateConfig {
  std::string dataset_dir;
  std::string judge = "simulation";  // simulation | random
  std::uint64_t seed = 0;
  int jobs = 1;
};

// Matches interpretations to manifest functions by id (throws on ids
// missing from the manifest) and scores each with the
// category-appropriate indicators.
EvalReport evaluate_interpretations(const DatasetManifest& manifest,
                                    const std::vector<Interpretation>& interps,
                                    const EvaluateConfig& config);

}  // namespace findbench
