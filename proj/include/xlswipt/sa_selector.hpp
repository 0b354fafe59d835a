// SPDX-License-Identifier: Apache-2.0
//
// Subarray activation: per-subarray contribution scores, the mean-threshold
// on/off decision and the scaled weights passed to the next PA solve.

#ifndef XLSWIPT_SA_SELECTOR_HPP
#define XLSWIPT_SA_SELECTOR_HPP

#include <vector>

#include "xlswipt/metrics.hpp"

namespace xlswipt {

struct SurrogateVector {
    std::vector<double> h;  // [S], sums to one
    double balance = 0.0;   // varrho = total EH power / total ID power
};

/// h_s proportional to varrho * sum_l Omega^ID_{s,l} + sum_m Omega^EH_{s,m}.
///
/// With no ID power varrho is 0 and only EH power counts; with no EH power
/// varrho is 0 as well, so h falls back to the ID row sums.
/// Throws UndefinedSurrogate for an all-zero allocation.
SurrogateVector surrogate(const PowerAllocation& pa);

/// a_s = 1 iff h_s >= 1/S.
std::vector<bool> binary_decision(const SurrogateVector& h);

/// h_s * a_s.
std::vector<double> scale_activation(const SurrogateVector& h, const std::vector<bool>& active);

}  // namespace xlswipt

#endif  // XLSWIPT_SA_SELECTOR_HPP
