#include <doctest.h>

#include "findbench/generator.hpp"
#include "findbench/string_program.hpp"
#include "findbench/word_list.hpp"

using namespace findbench;

namespace {

StringOp op(StrOpKind k) { return StringOp{k, "", 0, 0, 0}; }

StringOp replace(char from, char to) {
  StringOp o;
  o.kind = StrOpKind::Replace;
  o.from = from;
  o.to = to;
  return o;
}

}  // namespace

TEST_CASE("atomic ops match the worked examples") {
  CHECK(eval_string({{op(StrOpKind::Reverse)}}, "apple") == "elppa");
  CHECK(eval_string({{op(StrOpKind::Capitalize)}}, "apple") == "APPLE");
  CHECK(eval_string({{op(StrOpKind::ShiftLast)}}, "apple") == "applf");
  CHECK(eval_string({{op(StrOpKind::ShiftLast)}}, "xyz") == "xya");
  CHECK(eval_string({{op(StrOpKind::ShiftFirst)}}, "zoo") == "aoo");
  CHECK(eval_string({{op(StrOpKind::RemoveDuplicates)}}, "apple") == "aple");
  CHECK(eval_string({{op(StrOpKind::RemoveDuplicates)}}, "abab") == "ab");
  CHECK(eval_string({{op(StrOpKind::RemoveVowels)}}, "apple") == "ppl");
  CHECK(eval_string({{op(StrOpKind::DuplicateLast)}}, "love") == "lovee");
  CHECK(eval_string({{op(StrOpKind::SwapHalves)}}, "abcd") == "cdab");
  CHECK(eval_string({{op(StrOpKind::SwapHalves)}}, "apple") == "pleap");
  CHECK(eval_string({{replace('a', 'b')}}, "apple") == "bpple");
  StringOp rot;
  rot.kind = StrOpKind::RotateLeft;
  rot.amount = 2;
  CHECK(eval_string({{rot}}, "abcde") == "cdeab");
  StringOp cat;
  cat.kind = StrOpKind::Concatenate;
  cat.text = "xy";
  CHECK(eval_string({{cat}}, "ab") == "abxy");
  StringOp pre;
  pre.kind = StrOpKind::Prepend;
  pre.text = "xy";
  CHECK(eval_string({{pre}}, "ab") == "xyab");
  CHECK(eval_string({{op(StrOpKind::DropFirst)}}, "a") == "");
  CHECK(eval_string({{op(StrOpKind::DropFirst), op(StrOpKind::DropLast)}}, "a") == "");
}

TEST_CASE("compositions apply ops left to right") {
  // replace then reverse: apple -> bpple -> elppb
  CHECK(eval_string({{replace('a', 'b'), op(StrOpKind::Reverse)}}, "apple") == "elppb");
  // shift_last then reverse: apple -> applf -> flppa
  CHECK(eval_string({{op(StrOpKind::ShiftLast), op(StrOpKind::Reverse)}}, "apple") == "flppa");
}

TEST_CASE("input alphabet is enforced") {
  CHECK_THROWS_AS(eval_string({{op(StrOpKind::Reverse)}}, ""), domain_error);
  CHECK_THROWS_AS(eval_string({{op(StrOpKind::Reverse)}}, "Apple"), domain_error);
  CHECK_THROWS_AS(eval_string({{op(StrOpKind::Reverse)}}, "ab1"), domain_error);
  CHECK_THROWS_AS(eval_string({{op(StrOpKind::Reverse)}}, "a b"), domain_error);
}

TEST_CASE("applying [f,g] equals applying f then g on every probe") {
  for (int trial = 0; trial < 300; ++trial) {
    const auto spec = sample_string_spec(mix_keys(31, trial), "f", true);
    const auto& ops = spec.program->ops;
    REQUIRE(ops.size() == 2);
    for (const auto& probe : identity_probe_set()) {
      const std::string whole = eval_string(*spec.program, probe);
      const std::string staged = apply_op(ops[1], apply_op(ops[0], probe));
      CHECK(whole == staged);
    }
  }
}

TEST_CASE("uppercase intermediates stay total") {
  // capitalize then shift_last: wraps inside the uppercase alphabet.
  CHECK(eval_string({{op(StrOpKind::Capitalize), op(StrOpKind::ShiftLast)}}, "xyz") == "XYA");
  CHECK(eval_string({{op(StrOpKind::Capitalize), op(StrOpKind::RemoveVowels)}}, "apple") == "PPL");
}

TEST_CASE("canonical keys order programs deterministically") {
  StringProgram a{{op(StrOpKind::Reverse)}};
  StringProgram b{{replace('a', 'b')}};
  CHECK(canonical_key(a) != canonical_key(b));
  CHECK(canonical_key(a) == canonical_key(StringProgram{{op(StrOpKind::Reverse)}}));
}
