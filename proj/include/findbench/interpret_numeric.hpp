#pragma once

#include "findbench/blackbox.hpp"
#include "findbench/interpretation.hpp"

namespace findbench {

// Classifies a set of centered residual draws as one noise distribution.
// Poisson is recognized by the integer lattice of its draws, uniform by
// its negative excess kurtosis, normal otherwise; spreads below the
// scale-relative floor report "none".
std::string classify_noise(const std::vector<double>& residuals, double value_scale = 1.0);

// Active identification of a numeric black box: coarse/fine probing,
// repeat-based noise classification, per-family least-squares fits with
// grid search over native parameters, sum/product composition fits over
// the restricted family subset, penalized model selection, and residual
// run analysis with bisection refinement for corrupted intervals.
Interpretation interpret_numeric(BlackBoxSession& session, int budget);

// Length-ratio intersection-over-union of two corrupted sides, measured
// on [-128, 128]. Used to score interval recovery.
double corruption_iou(const CorruptionSpec& truth, const CorruptionEstimate& estimate);

}  // namespace findbench
