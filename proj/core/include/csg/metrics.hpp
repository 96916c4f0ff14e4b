#pragma once

#include <span>

namespace csg {

// Area under the ROC curve via the Mann-Whitney rank statistic; tied scores
// receive average ranks. Labels are 0/1. Throws std::invalid_argument when
// the inputs are empty, mismatched, or only one class is present (the
// statistic is undefined there, and silently returning a number would hide a
// degenerate evaluation set).
double auc(std::span<const double> scores, std::span<const int> labels);

// F1 of the positive class with predictions `score >= threshold`.
// Returns 0 when there are neither true positives, false positives, nor
// false negatives. Throws std::invalid_argument under the same conditions
// as `auc`.
double f1_binary(std::span<const double> scores, std::span<const int> labels,
                 double threshold = 0.5);

}  // namespace csg
