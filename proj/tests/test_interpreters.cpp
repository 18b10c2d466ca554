#include <doctest.h>

#include <cmath>

#include "findbench/evaluator.hpp"
#include "findbench/generator.hpp"
#include "findbench/interpret_numeric.hpp"
#include "findbench/interpret_relation.hpp"
#include "findbench/interpret_string.hpp"

using namespace findbench;

namespace {

Evaluable expr_eval(const NumericExpr& e) {
  return [e](double x) { return eval_numeric(e, x); };
}

const std::vector<FactTable>& shipped() {
  static const std::vector<FactTable> tables =
      load_fact_tables(std::string(FINDBENCH_SOURCE_DATA_DIR) + "/facts");
  return tables;
}

FunctionSpec numeric_spec(NumericExpr expr, std::uint64_t seed) {
  FunctionSpec spec;
  spec.id = "t";
  spec.category = Category::Numeric;
  spec.numeric = std::move(expr);
  spec.seed = seed;
  return spec;
}

}  // namespace

TEST_CASE("noiseless linear functions are recovered essentially exactly") {
  auto spec = numeric_spec(NumericExpr::atomic(Family::Linear, 2, 3), 100);
  auto session = open_session_from_spec(spec, {});
  const auto interp = interpret_numeric(session, 500);
  REQUIRE(interp.numeric_program);
  CHECK(interp.noise_verdict == "none");
  CHECK(nmse(truth_evaluable(spec), interpretation_evaluable(interp)) < 1e-9);
}

TEST_CASE("a noisy constant is classified and located within CLT bounds") {
  auto spec = numeric_spec(NumericExpr::atomic(Family::Constant, 1, 0, {5.0}), 213);
  spec.noise = NoiseSpec{NoiseKind::Normal, 1.0, 213};
  auto session = open_session_from_spec(spec, {});
  const auto interp = interpret_numeric(session, 500);
  CHECK(interp.noise_verdict == "normal");
  REQUIRE(interp.numeric_program);
  const auto fitted = eval_numeric(*interp.numeric_program, 0.0);
  REQUIRE(fitted);
  const double n = static_cast<double>(interp.query_count);
  CHECK(std::fabs(*fitted - 5.0) < 3.0 * 1.0 / std::sqrt(n));
}

TEST_CASE("a corrupted absolute function yields an interval with IoU >= 0.5") {
  auto spec = numeric_spec(NumericExpr::atomic(Family::Absolute, 1, 0), 321);
  CorruptionSpec c;
  c.kind = IntervalKind::Bounded;
  c.lo = 10;
  c.hi = 20;
  c.polarity = Polarity::Inside;
  c.mean = *grid_mean(*spec.numeric);
  c.seed = 321;
  spec.corruption = c;
  auto session = open_session_from_spec(spec, {});
  const auto interp = interpret_numeric(session, 500);
  REQUIRE(interp.corruption);
  CHECK(corruption_iou(c, *interp.corruption) >= 0.5);
  CHECK(interp.domain_note.find("corrupted") != std::string::npos);
}

TEST_CASE("noise classification is at least 90% accurate per distribution") {
  const int sets = 100, n = 50;
  std::map<std::string, int> correct;
  for (int trial = 0; trial < sets; ++trial) {
    Rng rng(mix_keys(555, trial));
    std::vector<double> normal, uniform, poisson;
    for (int i = 0; i < n; ++i) {
      normal.push_back(rng.normal(0.0, 2.75));
      uniform.push_back(rng.uniform(-2.75, 2.75));
    }
    // Poisson residuals are centered draws (as produced at an anchor).
    std::vector<double> raw;
    double mean = 0.0;
    for (int i = 0; i < n; ++i) {
      raw.push_back(static_cast<double>(rng.poisson(5.5)));
      mean += raw.back();
    }
    mean /= n;
    for (double v : raw) poisson.push_back(v - mean);

    if (classify_noise(normal, 5.0) == "normal") ++correct["normal"];
    if (classify_noise(uniform, 5.0) == "uniform") ++correct["uniform"];
    if (classify_noise(poisson, 5.0) == "poisson") ++correct["poisson"];
  }
  CHECK(correct["normal"] >= 90);
  CHECK(correct["uniform"] >= 90);
  CHECK(correct["poisson"] >= 90);
}

TEST_CASE("zero-spread residuals classify as none") {
  std::vector<double> flat(50, 0.0);
  CHECK(classify_noise(flat, 100.0) == "none");
}

TEST_CASE("query budgets bound the transcript for every interpreter") {
  for (int budget : {80, 150, 400}) {
    auto spec = sample_numeric_spec(mix_keys(7777, budget), "b", kRolePlain);
    SessionBudget sb;
    sb.max_queries = budget;
    auto session = open_session_from_spec(spec, sb);
    const auto interp = interpret_numeric(session, budget);
    CHECK(session.query_count() <= budget);
    CHECK(interp.query_count <= budget);
  }
  {
    auto spec = sample_string_spec(4141, "s", true);
    SessionBudget sb;
    sb.max_queries = 25;
    auto session = open_session_from_spec(spec, sb);
    const auto interp = interpret_string(session, 25);
    CHECK(session.query_count() <= 25);
  }
}

TEST_CASE("larger budgets never worsen noiseless fits") {
  for (int trial = 0; trial < 10; ++trial) {
    const auto spec = sample_numeric_spec(mix_keys(2024, trial), "m", kRolePlain);
    double prev = std::numeric_limits<double>::infinity();
    for (int budget : {120, 250, 500}) {
      auto session = open_session_from_spec(spec, {});
      const auto interp = interpret_numeric(session, budget);
      const double err =
          interp.numeric_program
              ? nmse(truth_evaluable(spec), interpretation_evaluable(interp))
              : std::numeric_limits<double>::infinity();
      CHECK(err <= prev + 1e-12);
      prev = err;
    }
  }
}

TEST_CASE("string synthesis recovers reverse exactly") {
  FunctionSpec spec;
  spec.id = "s";
  spec.category = Category::Strings;
  StringOp rev;
  rev.kind = StrOpKind::Reverse;
  spec.program = StringProgram{{rev}};
  spec.seed = 6;
  auto manifest = sample_string_dataset(1, 6);
  manifest.functions[0] = spec;
  make_test_sets(manifest);

  auto session = open_session_from_spec(manifest.functions[0], {});
  const auto interp = interpret_string(session, 100);
  REQUIRE(interp.string_program);
  CHECK(canonical_key(*interp.string_program) == "reverse");
  CHECK(exact_match(manifest.functions[0], interpretation_text_program(interp, nullptr),
                    nullptr) == 1.0);
}

TEST_CASE("string synthesis recovers a replace-then-reverse composition extensionally") {
  FunctionSpec spec;
  spec.id = "s2";
  spec.category = Category::Strings;
  StringOp repl;
  repl.kind = StrOpKind::Replace;
  repl.from = 'a';
  repl.to = 'b';
  StringOp rev;
  rev.kind = StrOpKind::Reverse;
  spec.program = StringProgram{{repl, rev}};
  spec.seed = 8;
  auto manifest = sample_string_dataset(1, 8);
  manifest.functions[0] = spec;
  make_test_sets(manifest);

  auto session = open_session_from_spec(spec, {});
  const auto interp = interpret_string(session, 100);
  REQUIRE(interp.string_program);
  CHECK(exact_match(manifest.functions[0], interpretation_text_program(interp, nullptr),
                    nullptr) == 1.0);
}

TEST_CASE("string synthesis answers deterministically") {
  const auto spec = sample_string_spec(991188, "d", true);
  auto s1 = open_session_from_spec(spec, {});
  auto s2 = open_session_from_spec(spec, {});
  const auto a = interpret_string(s1, 80);
  const auto b = interpret_string(s2, 80);
  REQUIRE(a.string_program);
  REQUIRE(b.string_program);
  CHECK(canonical_key(*a.string_program) == canonical_key(*b.string_program));
}

TEST_CASE("string answers agree with the black box on the whole transcript") {
  for (int trial = 0; trial < 20; ++trial) {
    const auto spec = sample_string_spec(mix_keys(808, trial), "p", trial % 2 == 0);
    auto session = open_session_from_spec(spec, {});
    const auto interp = interpret_string(session, 60);
    if (!interp.string_program || interp.partial) continue;
    for (const auto& entry : session.transcript()) {
      const std::string got = eval_string(*interp.string_program, entry.input);
      CHECK(got == entry.output);
    }
  }
}

TEST_CASE("relation interpreter names tables and detects corrupted tags") {
  const auto& tables = shipped();
  const auto lexicon = lexicon_from_tables(tables);

  FunctionSpec plain;
  plain.id = "r1";
  plain.category = Category::Relations;
  plain.relation = RelationSpec{"country_capital", std::nullopt};
  plain.seed = 1;
  {
    auto table = std::make_shared<const FactTable>(find_table(tables, "country_capital"));
    auto session = open_session_from_spec(plain, {}, 0, table);
    const auto interp = interpret_relation(session, 400, lexicon, tables);
    REQUIRE(interp.relation_program);
    CHECK(interp.relation_program->table == "country_capital");
    CHECK(!interp.relation_program->corrupt_tag);
    CHECK(interp.domain_note == "none");
  }

  FunctionSpec corrupted = plain;
  corrupted.relation = RelationSpec{"country_capital", "Asia"};
  {
    auto table = std::make_shared<const FactTable>(find_table(tables, "country_capital"));
    auto session = open_session_from_spec(corrupted, {}, 0, table);
    const auto interp = interpret_relation(session, 400, lexicon, tables);
    REQUIRE(interp.relation_program);
    CHECK(interp.relation_program->table == "country_capital");
    REQUIRE(interp.relation_program->corrupt_tag);
    CHECK(*interp.relation_program->corrupt_tag == "Asia");
    CHECK(interp.domain_note.find("Asia") != std::string::npos);
  }
}

TEST_CASE("a lexicon disjoint from the tables yields an unknown-relation verdict") {
  const auto& tables = shipped();
  ProbeLexicon disjoint;
  disjoint["nonsense"] = {"blorp", "wug", "zork", "quux", "flib", "dax", "mib", "tove"};
  FunctionSpec spec;
  spec.id = "r2";
  spec.category = Category::Relations;
  spec.relation = RelationSpec{"gemstone_color", std::nullopt};
  spec.seed = 3;
  auto table = std::make_shared<const FactTable>(find_table(tables, "gemstone_color"));
  auto session = open_session_from_spec(spec, {}, 0, table);
  const auto interp = interpret_relation(session, 100, disjoint, tables);
  CHECK(!interp.relation_program);
  CHECK(interp.description.find("unknown relation") != std::string::npos);
}
