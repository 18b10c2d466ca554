#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "findbench/function_spec.hpp"

namespace findbench {

// An interpreter's estimate of where and how a function is corrupted.
struct CorruptionEstimate {
  IntervalKind kind = IntervalKind::Bounded;
  double lo = 0.0;
  double hi = 0.0;
  Polarity polarity = Polarity::Inside;
  double mean = 0.0;

  bool corrupted_at(double x) const {
    CorruptionSpec c;
    c.kind = kind;
    c.lo = lo;
    c.hi = hi;
    c.polarity = polarity;
    return c.corrupted_at(x);
  }

  bool operator==(const CorruptionEstimate&) const = default;
};

// An interpreter's answer for one function: language description, domain
// note, and (when the interpreter is grammar-aware) a structured program.
struct Interpretation {
  std::string function_id;
  std::string description;
  std::string domain_note = "none";

  std::optional<NumericExpr> numeric_program;
  std::optional<StringProgram> string_program;
  std::optional<RelationSpec> relation_program;
  std::optional<CorruptionEstimate> corruption;

  std::string noise_verdict = "none";  // none | normal | uniform | poisson | unknown
  double fit_score = 0.0;              // internal NMSE or match fraction
  int query_count = 0;
  bool partial = false;         // budget ran out mid-pipeline
  bool out_of_grammar = false;  // no consistent program found
  std::string code_text;        // raw [CODE] section from LM agents

  bool has_program() const {
    return numeric_program || string_program || relation_program;
  }
};

nlohmann::ordered_json to_json(const Interpretation& interp);
Interpretation interpretation_from_json(const nlohmann::json& j);

// JSONL with a leading meta line carrying seed/format/engine versions.
void write_interpretations(const std::vector<Interpretation>& interps, const std::string& path,
                           std::uint64_t seed);
std::vector<Interpretation> read_interpretations(const std::string& path);

}  // namespace findbench
