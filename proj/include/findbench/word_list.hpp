#pragma once

#include <string>
#include <vector>

namespace findbench {

// Fixed lowercase dictionary used for string test inputs and probe sets.
const std::vector<std::string>& common_words();

// The 50-string probe set used to exclude identity compositions.
const std::vector<std::string>& identity_probe_set();

}  // namespace findbench
