#include "findbench/interpretation.hpp"

#include <fstream>
#include <stdexcept>

#include "findbench/serialization.hpp"

namespace findbench {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

ordered_json corruption_estimate_to_json(const CorruptionEstimate& c) {
  ordered_json j;
  switch (c.kind) {
    case IntervalKind::Bounded: j["interval"] = "bounded"; break;
    case IntervalKind::RightInfinite: j["interval"] = "right_infinite"; break;
    case IntervalKind::LeftInfinite: j["interval"] = "left_infinite"; break;
  }
  j["lo"] = c.lo;
  j["hi"] = c.hi;
  j["polarity"] = c.polarity == Polarity::Inside ? "inside" : "outside";
  j["mean"] = c.mean;
  return j;
}

CorruptionEstimate corruption_estimate_from_json(const json& j) {
  CorruptionEstimate c;
  const std::string kind = j.at("interval").get<std::string>();
  if (kind == "bounded") c.kind = IntervalKind::Bounded;
  else if (kind == "right_infinite") c.kind = IntervalKind::RightInfinite;
  else if (kind == "left_infinite") c.kind = IntervalKind::LeftInfinite;
  else throw std::runtime_error("unknown interval kind: " + kind);
  c.lo = j.at("lo").get<double>();
  c.hi = j.at("hi").get<double>();
  c.polarity = j.at("polarity").get<std::string>() == "inside" ? Polarity::Inside : Polarity::Outside;
  c.mean = j.at("mean").get<double>();
  return c;
}

}  // namespace

ordered_json to_json(const Interpretation& interp) {
  ordered_json j;
  j["id"] = interp.function_id;
  j["description"] = interp.description;
  j["domain"] = interp.domain_note;
  if (interp.numeric_program) {
    j["code"] = to_json(*interp.numeric_program);
  } else if (interp.string_program) {
    j["code"] = to_json(*interp.string_program);
  } else if (interp.relation_program) {
    j["code"] = to_json(*interp.relation_program);
  } else {
    j["code"] = nullptr;
  }
  if (!interp.code_text.empty()) j["code_text"] = interp.code_text;
  if (interp.corruption) j["corruption"] = corruption_estimate_to_json(*interp.corruption);
  j["noise_verdict"] = interp.noise_verdict;
  j["fit_score"] = interp.fit_score;
  j["query_count"] = interp.query_count;
  j["partial"] = interp.partial;
  j["out_of_grammar"] = interp.out_of_grammar;
  return j;
}

Interpretation interpretation_from_json(const json& j) {
  Interpretation interp;
  interp.function_id = j.at("id").get<std::string>();
  interp.description = j.value("description", "");
  interp.domain_note = j.value("domain", "none");
  if (j.contains("code") && !j.at("code").is_null()) {
    const auto& code = j.at("code");
    if (code.contains("ops")) {
      interp.string_program = string_program_from_json(code);
    } else if (code.contains("table")) {
      interp.relation_program = relation_spec_from_json(code);
    } else {
      interp.numeric_program = numeric_expr_from_json(code);
    }
  }
  if (j.contains("code_text")) interp.code_text = j.at("code_text").get<std::string>();
  if (j.contains("corruption")) interp.corruption = corruption_estimate_from_json(j.at("corruption"));
  interp.noise_verdict = j.value("noise_verdict", "none");
  interp.fit_score = j.value("fit_score", 0.0);
  interp.query_count = j.value("query_count", 0);
  interp.partial = j.value("partial", false);
  interp.out_of_grammar = j.value("out_of_grammar", false);
  return interp;
}

void write_interpretations(const std::vector<Interpretation>& interps, const std::string& path,
                           std::uint64_t seed) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write interpretations: " + path);
  ordered_json meta;
  meta["meta"] = true;
  meta["format_version"] = kFormatVersion;
  meta["engine_version"] = kEngineVersion;
  meta["seed"] = seed;
  out << meta.dump() << "\n";
  for (const auto& interp : interps) out << to_json(interp).dump() << "\n";
}

std::vector<Interpretation> read_interpretations(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read interpretations: " + path);
  std::vector<Interpretation> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    if (j.contains("meta")) continue;
    out.push_back(interpretation_from_json(j));
  }
  return out;
}

}  // namespace findbench
