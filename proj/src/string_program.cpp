#include "findbench/string_program.hpp"

#include <algorithm>
#include <cctype>

namespace findbench {

namespace {

bool is_vowel(char c) {
  switch (std::tolower(static_cast<unsigned char>(c))) {
    case 'a': case 'e': case 'i': case 'o': case 'u': return true;
    default: return false;
  }
}

char shift_forward(char c) {
  if (c >= 'a' && c <= 'z') return c == 'z' ? 'a' : static_cast<char>(c + 1);
  if (c >= 'A' && c <= 'Z') return c == 'Z' ? 'A' : static_cast<char>(c + 1);
  return c;
}

}  // namespace

const char* str_op_name(StrOpKind k) {
  switch (k) {
    case StrOpKind::Concatenate: return "concatenate";
    case StrOpKind::Replace: return "replace";
    case StrOpKind::Reverse: return "reverse";
    case StrOpKind::Capitalize: return "capitalize";
    case StrOpKind::Lowercase: return "lowercase";
    case StrOpKind::ShiftLast: return "shift_last";
    case StrOpKind::ShiftFirst: return "shift_first";
    case StrOpKind::DuplicateLast: return "duplicate_last";
    case StrOpKind::RemoveDuplicates: return "remove_duplicates";
    case StrOpKind::RemoveVowels: return "remove_vowels";
    case StrOpKind::SwapHalves: return "swap_halves";
    case StrOpKind::RotateLeft: return "rotate_left";
    case StrOpKind::Prepend: return "prepend";
    case StrOpKind::DropFirst: return "drop_first";
    case StrOpKind::DropLast: return "drop_last";
  }
  return "unknown";
}

bool valid_input(const std::string& s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return c >= 'a' && c <= 'z'; });
}

std::string apply_op(const StringOp& op, const std::string& s) {
  switch (op.kind) {
    case StrOpKind::Concatenate:
      return s + op.text;
    case StrOpKind::Prepend:
      return op.text + s;
    case StrOpKind::Replace: {
      std::string out = s;
      for (char& c : out)
        if (c == op.from) c = op.to;
      return out;
    }
    case StrOpKind::Reverse:
      return std::string(s.rbegin(), s.rend());
    case StrOpKind::Capitalize: {
      std::string out = s;
      for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      return out;
    }
    case StrOpKind::Lowercase: {
      std::string out = s;
      for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      return out;
    }
    case StrOpKind::ShiftLast: {
      if (s.empty()) return s;
      std::string out = s;
      out.back() = shift_forward(out.back());
      return out;
    }
    case StrOpKind::ShiftFirst: {
      if (s.empty()) return s;
      std::string out = s;
      out.front() = shift_forward(out.front());
      return out;
    }
    case StrOpKind::DuplicateLast:
      return s.empty() ? s : s + s.back();
    case StrOpKind::RemoveDuplicates: {
      std::string out;
      for (char c : s)
        if (out.find(c) == std::string::npos) out.push_back(c);
      return out;
    }
    case StrOpKind::RemoveVowels: {
      std::string out;
      for (char c : s)
        if (!is_vowel(c)) out.push_back(c);
      return out;
    }
    case StrOpKind::SwapHalves: {
      const std::size_t mid = s.size() / 2;
      return s.substr(mid) + s.substr(0, mid);
    }
    case StrOpKind::RotateLeft: {
      if (s.empty()) return s;
      const std::size_t k = static_cast<std::size_t>(op.amount) % s.size();
      return s.substr(k) + s.substr(0, k);
    }
    case StrOpKind::DropFirst:
      return s.empty() ? s : s.substr(1);
    case StrOpKind::DropLast:
      return s.empty() ? s : s.substr(0, s.size() - 1);
  }
  return s;
}

std::string eval_string(const StringProgram& prog, const std::string& input) {
  if (!valid_input(input))
    throw domain_error("input must be a non-empty lowercase a-z string: '" + input + "'");
  std::string cur = input;
  for (const auto& op : prog.ops) cur = apply_op(op, cur);
  return cur;
}

std::string canonical_key(const StringOp& op) {
  std::string key = str_op_name(op.kind);
  switch (op.kind) {
    case StrOpKind::Concatenate:
    case StrOpKind::Prepend:
      key += "(" + op.text + ")";
      break;
    case StrOpKind::Replace:
      key += std::string("(") + op.from + "," + op.to + ")";
      break;
    case StrOpKind::RotateLeft:
      key += "(" + std::to_string(op.amount) + ")";
      break;
    default:
      break;
  }
  return key;
}

std::string canonical_key(const StringProgram& prog) {
  std::string key;
  for (const auto& op : prog.ops) {
    if (!key.empty()) key += ";";
    key += canonical_key(op);
  }
  return key;
}

}  // namespace findbench
