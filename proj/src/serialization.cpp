#include "findbench/serialization.hpp"

#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace findbench {

using nlohmann::json;
using nlohmann::ordered_json;

ordered_json to_json(const NumericExpr& expr) {
  ordered_json j;
  if (expr.is_composed()) {
    j["op"] = *expr.op == Combine::Sum ? "sum" : "product";
    j["children"] = ordered_json::array({to_json(expr.children[0]), to_json(expr.children[1])});
    return j;
  }
  j["family"] = family_name(expr.family);
  j["scale"] = expr.scale;
  j["bias"] = expr.bias;
  if (!expr.params.empty()) j["params"] = expr.params;
  if (!expr.params2.empty()) j["params2"] = expr.params2;
  return j;
}

NumericExpr numeric_expr_from_json(const json& j) {
  NumericExpr e;
  if (j.contains("op")) {
    const std::string op = j.at("op").get<std::string>();
    if (op == "sum") {
      e.op = Combine::Sum;
    } else if (op == "product") {
      e.op = Combine::Product;
    } else {
      throw std::runtime_error("unknown composition operator: " + op);
    }
    for (const auto& child : j.at("children")) e.children.push_back(numeric_expr_from_json(child));
    if (e.children.size() != 2) throw std::runtime_error("composed node needs two children");
    return e;
  }
  const std::string fam = j.at("family").get<std::string>();
  const auto f = family_from_name(fam);
  if (!f) throw std::runtime_error("unknown numeric family: " + fam);
  e.family = *f;
  e.scale = j.at("scale").get<double>();
  e.bias = j.at("bias").get<double>();
  if (j.contains("params")) e.params = j.at("params").get<std::vector<double>>();
  if (j.contains("params2")) e.params2 = j.at("params2").get<std::vector<double>>();
  return e;
}

ordered_json to_json(const StringProgram& prog) {
  ordered_json ops = ordered_json::array();
  for (const auto& op : prog.ops) {
    ordered_json o;
    o["kind"] = str_op_name(op.kind);
    switch (op.kind) {
      case StrOpKind::Concatenate:
      case StrOpKind::Prepend:
        o["text"] = op.text;
        break;
      case StrOpKind::Replace:
        o["from"] = std::string(1, op.from);
        o["to"] = std::string(1, op.to);
        break;
      case StrOpKind::RotateLeft:
        o["amount"] = op.amount;
        break;
      default:
        break;
    }
    ops.push_back(o);
  }
  ordered_json j;
  j["ops"] = ops;
  return j;
}

StringProgram string_program_from_json(const json& j) {
  StringProgram prog;
  for (const auto& o : j.at("ops")) {
    StringOp op;
    const std::string kind = o.at("kind").get<std::string>();
    bool found = false;
    for (int k = 0; k <= static_cast<int>(StrOpKind::DropLast); ++k) {
      if (kind == str_op_name(static_cast<StrOpKind>(k))) {
        op.kind = static_cast<StrOpKind>(k);
        found = true;
        break;
      }
    }
    if (!found) throw std::runtime_error("unknown string op: " + kind);
    if (o.contains("text")) op.text = o.at("text").get<std::string>();
    if (o.contains("from")) op.from = o.at("from").get<std::string>().at(0);
    if (o.contains("to")) op.to = o.at("to").get<std::string>().at(0);
    if (o.contains("amount")) op.amount = o.at("amount").get<int>();
    prog.ops.push_back(op);
  }
  return prog;
}

ordered_json to_json(const RelationSpec& rel) {
  ordered_json j;
  j["table"] = rel.table;
  j["corrupt_tag"] = rel.corrupt_tag ? json(*rel.corrupt_tag) : json(nullptr);
  return j;
}

RelationSpec relation_spec_from_json(const json& j) {
  RelationSpec rel;
  rel.table = j.at("table").get<std::string>();
  if (j.contains("corrupt_tag") && !j.at("corrupt_tag").is_null())
    rel.corrupt_tag = j.at("corrupt_tag").get<std::string>();
  return rel;
}

ordered_json to_json(const NoiseSpec& n) {
  ordered_json j;
  j["kind"] = noise_kind_name(n.kind);
  j["param"] = n.param;
  j["seed"] = n.seed;
  return j;
}

NoiseSpec noise_spec_from_json(const json& j) {
  NoiseSpec n;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "normal") {
    n.kind = NoiseKind::Normal;
  } else if (kind == "uniform") {
    n.kind = NoiseKind::Uniform;
  } else if (kind == "poisson") {
    n.kind = NoiseKind::Poisson;
  } else {
    throw std::runtime_error("unknown noise kind: " + kind);
  }
  n.param = j.at("param").get<double>();
  n.seed = j.at("seed").get<std::uint64_t>();
  return n;
}

ordered_json to_json(const CorruptionSpec& c) {
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
  j["variance"] = c.variance;
  j["seed"] = c.seed;
  return j;
}

CorruptionSpec corruption_spec_from_json(const json& j) {
  CorruptionSpec c;
  const std::string kind = j.at("interval").get<std::string>();
  if (kind == "bounded") {
    c.kind = IntervalKind::Bounded;
  } else if (kind == "right_infinite") {
    c.kind = IntervalKind::RightInfinite;
  } else if (kind == "left_infinite") {
    c.kind = IntervalKind::LeftInfinite;
  } else {
    throw std::runtime_error("unknown interval kind: " + kind);
  }
  c.lo = j.at("lo").get<double>();
  c.hi = j.at("hi").get<double>();
  c.polarity = j.at("polarity").get<std::string>() == "inside" ? Polarity::Inside : Polarity::Outside;
  c.mean = j.at("mean").get<double>();
  c.variance = j.at("variance").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

ordered_json to_json(const TestSet& t) {
  ordered_json j;
  if (!t.numeric_extras.empty()) j["numeric_extras"] = t.numeric_extras;
  if (!t.inputs.empty()) j["inputs"] = t.inputs;
  if (j.is_null()) j = ordered_json::object();
  return j;
}

TestSet test_set_from_json(const json& j) {
  TestSet t;
  if (j.contains("numeric_extras")) t.numeric_extras = j.at("numeric_extras").get<std::vector<double>>();
  if (j.contains("inputs")) t.inputs = j.at("inputs").get<std::vector<std::string>>();
  return t;
}

ordered_json to_json(const FunctionSpec& spec) {
  ordered_json j;
  j["id"] = spec.id;
  j["category"] = category_name(spec.category);
  j["subcategory"] = spec.subcategory();
  switch (spec.category) {
    case Category::Numeric: j["ast"] = to_json(*spec.numeric); break;
    case Category::Strings: j["ast"] = to_json(*spec.program); break;
    case Category::Relations: j["ast"] = to_json(*spec.relation); break;
  }
  ordered_json mods = ordered_json::object();
  mods["noise"] = spec.noise ? to_json(*spec.noise) : ordered_json(nullptr);
  mods["corruption"] = spec.corruption ? to_json(*spec.corruption) : ordered_json(nullptr);
  mods["approximation"] =
      spec.approximation ? ordered_json{{"weights_path", spec.approximation->weights_path}}
                         : ordered_json(nullptr);
  j["modifiers"] = mods;
  j["seed"] = spec.seed;
  j["description"] = spec.description;
  j["domain_note"] = spec.domain_note;
  j["test_set"] = to_json(spec.test_set);
  return j;
}

FunctionSpec function_spec_from_json(const json& j) {
  FunctionSpec spec;
  spec.id = j.at("id").get<std::string>();
  const auto cat = category_from_name(j.at("category").get<std::string>());
  if (!cat) throw std::runtime_error("unknown category in record " + spec.id);
  spec.category = *cat;
  switch (spec.category) {
    case Category::Numeric: spec.numeric = numeric_expr_from_json(j.at("ast")); break;
    case Category::Strings: spec.program = string_program_from_json(j.at("ast")); break;
    case Category::Relations: spec.relation = relation_spec_from_json(j.at("ast")); break;
  }
  if (j.contains("modifiers")) {
    const auto& mods = j.at("modifiers");
    if (mods.contains("noise") && !mods.at("noise").is_null())
      spec.noise = noise_spec_from_json(mods.at("noise"));
    if (mods.contains("corruption") && !mods.at("corruption").is_null())
      spec.corruption = corruption_spec_from_json(mods.at("corruption"));
    if (mods.contains("approximation") && !mods.at("approximation").is_null())
      spec.approximation = ApproximationRef{mods.at("approximation").at("weights_path").get<std::string>()};
  }
  spec.seed = j.at("seed").get<std::uint64_t>();
  spec.description = j.value("description", "");
  spec.domain_note = j.value("domain_note", "");
  if (j.contains("test_set")) spec.test_set = test_set_from_json(j.at("test_set"));
  return spec;
}

const FunctionSpec& DatasetManifest::find(const std::string& id) const {
  for (const auto& f : functions)
    if (f.id == id) return f;
  throw std::runtime_error("unknown function id: " + id);
}

std::map<std::string, std::map<std::string, int>> DatasetManifest::counts() const {
  std::map<std::string, std::map<std::string, int>> out;
  for (const auto& f : functions) ++out[category_name(f.category)][f.subcategory()];
  return out;
}

std::string manifest_record_line(const FunctionSpec& spec) { return to_json(spec).dump(); }

void write_manifest(const DatasetManifest& manifest, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  {
    std::ofstream out(fs::path(dir) / "manifest.jsonl");
    if (!out) throw std::runtime_error("cannot write manifest in " + dir);
    for (const auto& f : manifest.functions) out << manifest_record_line(f) << "\n";
  }
  ordered_json meta;
  meta["dataset_id"] = manifest.dataset_id;
  meta["seed"] = manifest.seed;
  meta["format_version"] = manifest.format_version;
  meta["engine_version"] = manifest.engine_version;
  meta["function_count"] = manifest.functions.size();
  ordered_json counts = ordered_json::object();
  for (const auto& [cat, subs] : manifest.counts()) {
    ordered_json c = ordered_json::object();
    int total = 0;
    for (const auto& [sub, n] : subs) {
      c[sub] = n;
      total += n;
    }
    c["total"] = total;
    counts[cat] = c;
  }
  meta["counts"] = counts;
  std::ofstream out(fs::path(dir) / "dataset.json");
  out << meta.dump(2) << "\n";
}

DatasetManifest read_manifest(const std::string& dir) {
  namespace fs = std::filesystem;
  DatasetManifest manifest;
  {
    std::ifstream in(fs::path(dir) / "dataset.json");
    if (!in) throw std::runtime_error("no dataset.json in " + dir);
    json meta;
    in >> meta;
    manifest.dataset_id = meta.value("dataset_id", "");
    manifest.seed = meta.value("seed", std::uint64_t{0});
    manifest.format_version = meta.value("format_version", kFormatVersion);
    manifest.engine_version = meta.value("engine_version", kEngineVersion);
  }
  std::ifstream in(fs::path(dir) / "manifest.jsonl");
  if (!in) throw std::runtime_error("no manifest.jsonl in " + dir);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    manifest.functions.push_back(function_spec_from_json(json::parse(line)));
  }
  return manifest;
}

}  // namespace findbench
