#include <doctest.h>

#include "findbench/blackbox.hpp"
#include "findbench/generator.hpp"
#include "findbench/util.hpp"

using namespace findbench;

namespace {

FunctionSpec quartic_relu_product() {
  FunctionSpec spec;
  spec.id = "f00470";
  spec.category = Category::Numeric;
  spec.numeric = NumericExpr::compose(
      Combine::Product,
      NumericExpr::atomic(Family::Polynomial, 1, 0, {3.9, 0.4, -2.6, -0.7, -4.5}),
      NumericExpr::atomic(Family::Relu, -25.3, 5.2));
  spec.seed = 470;
  return spec;
}

FunctionSpec reverse_spec() {
  FunctionSpec spec;
  spec.id = "s1";
  spec.category = Category::Strings;
  StringOp rev;
  rev.kind = StrOpKind::Reverse;
  spec.program = StringProgram{{rev}};
  spec.seed = 1;
  return spec;
}

}  // namespace

TEST_CASE("the output line matches the wire template byte for byte") {
  auto numeric = quartic_relu_product();
  auto s1 = open_session_from_spec(numeric, {});
  CHECK(s1.query({"0"}) == "Function input - output pairs: (0, 20.28)");

  auto strings = open_session_from_spec(reverse_spec(), {});
  CHECK(strings.query({"apple", "cat"}) ==
        "Function input - output pairs: (apple, elppa)(cat, tac)");

  FunctionSpec recip;
  recip.id = "r";
  recip.category = Category::Numeric;
  recip.numeric = NumericExpr::atomic(Family::Reciprocal, 1, 0);
  auto s3 = open_session_from_spec(recip, {});
  CHECK(s3.query({"0"}) == "Function input - output pairs: (0, None)");
  CHECK(s3.query({"abc"}) == "Function input - output pairs: (abc, None)");
}

TEST_CASE("string sessions echo raw inputs and reject bad alphabets as None") {
  auto session = open_session_from_spec(reverse_spec(), {});
  CHECK(session.query({"Apple"}) == "Function input - output pairs: (Apple, None)");
  CHECK(session.query({"a1"}) == "Function input - output pairs: (a1, None)");
}

TEST_CASE("budgets close the session and empty calls are usage errors") {
  SessionBudget budget;
  budget.max_queries = 5;
  auto session = open_session_from_spec(quartic_relu_product(), budget);
  for (int i = 0; i < 5; ++i) session.query({"1"});
  CHECK_THROWS_AS(session.query({"1"}), budget_error);
  CHECK(session.query_count() == 5);

  auto s2 = open_session_from_spec(quartic_relu_product(), {});
  CHECK_THROWS_AS(s2.query({}), usage_error);

  SessionBudget tight;
  tight.max_inputs_per_call = 2;
  auto s3 = open_session_from_spec(quartic_relu_product(), tight);
  CHECK_THROWS_AS(s3.query({"1", "2", "3"}), usage_error);
}

TEST_CASE("empty session has an empty transcript") {
  auto session = open_session_from_spec(quartic_relu_product(), {});
  CHECK(session.transcript().empty());
  CHECK(session.query_count() == 0);
}

TEST_CASE("sessions with the same nonce replay identically; noise is fresh per query") {
  auto spec = sample_numeric_spec(777, "n1", kRoleNoise);
  REQUIRE(spec.noise);
  auto a = open_session_from_spec(spec, {}, 0);
  auto b = open_session_from_spec(spec, {}, 0);
  const std::vector<std::string> inputs = {"1", "2", "1"};
  CHECK(a.query(inputs) == b.query(inputs));
  // Same x twice inside one session draws fresh noise.
  const auto& t = a.transcript();
  CHECK(t[0].input == t[2].input);
  CHECK(t[0].output != t[2].output);

  auto c = open_session_from_spec(spec, {}, 1);
  CHECK(c.query(inputs) != b.query(inputs));
}

TEST_CASE("session output reveals nothing beyond input-output pairs") {
  auto spec = sample_numeric_spec(4242, "h1", kRoleCorruption);
  auto session = open_session_from_spec(spec, {});
  std::string all;
  for (double x = -20; x <= 20; x += 1) all += session.query({format_double(x)});
  for (const char* leak :
       {"gaussian", "linear", "polynomial", "sigmoid", "corrupt", "noise", "seed", "scale",
        "bias", "family", "interval"})
    CHECK(all.find(leak) == std::string::npos);
}
