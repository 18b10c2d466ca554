#pragma once

#include <optional>
#include <string>

namespace findbench {

// Shortest decimal string that parses back to exactly the same double
// (std::to_chars without a precision). Integral values print without a
// decimal point ("11", not "11.0"); this is the engine's pinned wire
// formatting for numeric outputs.
std::string format_double(double v);

// Compact formatting for human-readable descriptions: round-trip short
// form, with "-0" normalized to "0".
std::string format_param(double v);

// Full-string strtod-style parse; rejects trailing junk, accepts inf/nan
// spellings as failures (the black box treats them as unparseable).
std::optional<double> parse_double(const std::string& s);

std::string to_lower(const std::string& s);

}  // namespace findbench
