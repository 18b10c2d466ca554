#pragma once

#include "findbench/blackbox.hpp"
#include "findbench/interpretation.hpp"

namespace findbench {

// Depth-1 op pool whose parameters come from the observations: replace
// letters from the observed alphabets, affix text from observed output
// substrings and their reversals (length <= 3), rotation counts 1-3.
std::vector<StringOp> candidate_op_pool(
    const std::vector<std::pair<std::string, std::string>>& observations);

// Streams every depth-<=2 program over the pool in canonical order,
// keeping the ones consistent with all observations (the retained set is
// capped at 100000).
std::vector<StringProgram> consistent_programs(
    const std::vector<std::pair<std::string, std::string>>& observations);

// Filters an existing candidate set against the observations.
std::vector<StringProgram> filter_consistent(
    const std::vector<StringProgram>& pool,
    const std::vector<std::pair<std::string, std::string>>& observations);

// Enumeration + distinguishing-query synthesis. Probes a fixed seed set,
// keeps candidates consistent with all observations, and while more than
// one survivor remains queries the input that maximally splits survivor
// predictions. Emits the minimum-size survivor (canonical order breaks
// ties). Re-enumerates when new observations enlarge the parameter pools.
Interpretation interpret_string(BlackBoxSession& session, int budget);

}  // namespace findbench
