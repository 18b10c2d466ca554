#pragma once

#include <map>

#include "findbench/blackbox.hpp"
#include "findbench/interpretation.hpp"

namespace findbench {

// Probe word lists keyed by input kind ("country", "city", ...).
using ProbeLexicon = std::map<std::string, std::vector<std::string>>;

ProbeLexicon load_lexicons(const std::string& dir);

// Builds a lexicon from the shipped tables (a deterministic subset of
// each table's keys, always covering every tagged subdomain).
ProbeLexicon lexicon_from_tables(const std::vector<FactTable>& tables);

// Names the relation by highest agreement between observed (key, value)
// pairs and the shipped fact tables (> 60% of defined outputs must
// match), then probes tagged subdomains: at least two undefined results
// inside exactly one tag with none outside reports that tag as the
// corrupted subdomain.
Interpretation interpret_relation(BlackBoxSession& session, int budget,
                                  const ProbeLexicon& lexicon,
                                  const std::vector<FactTable>& tables);

}  // namespace findbench
