#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace findbench {

// Raised when a black-box input violates the engine's input alphabet
// (non-empty ASCII lowercase letters).
struct domain_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class StrOpKind {
  Concatenate,       // append a fixed suffix
  Replace,           // replace every occurrence of one letter with another
  Reverse,
  Capitalize,        // whole string to upper case
  Lowercase,
  ShiftLast,         // last letter forward in the alphabet, z wraps to a
  ShiftFirst,
  DuplicateLast,     // "love" -> "lovee"
  RemoveDuplicates,  // keep the first occurrence of each letter: "apple" -> "aple"
  RemoveVowels,
  SwapHalves,        // "abcd" -> "cdab"; odd length keeps the middle with the back half
  RotateLeft,        // rotate k positions left
  Prepend,           // prefix with a fixed string
  DropFirst,
  DropLast,
};

const char* str_op_name(StrOpKind k);

struct StringOp {
  StrOpKind kind = StrOpKind::Reverse;
  std::string text;   // Concatenate / Prepend payload
  char from = '\0';   // Replace source
  char to = '\0';     // Replace target
  int amount = 0;     // RotateLeft count

  bool operator==(const StringOp&) const = default;
};

// A function on strings: ops applied left to right. Benchmark programs
// have one or two ops; the evaluator is written for any length.
struct StringProgram {
  std::vector<StringOp> ops;

  bool operator==(const StringProgram&) const = default;
};

bool valid_input(const std::string& s);

// Applies one op. Total on every string (including empty intermediates
// produced by drops); only the program input is alphabet-checked.
std::string apply_op(const StringOp& op, const std::string& s);

// Throws domain_error if the input is outside the alphabet.
std::string eval_string(const StringProgram& prog, const std::string& input);

// Canonical key used for deterministic ordering and tie-breaking:
// op-kind name, then parameters.
std::string canonical_key(const StringOp& op);
std::string canonical_key(const StringProgram& prog);

}  // namespace findbench
