// SPDX-License-Identifier: Apache-2.0

#include "xlswipt/sa_selector.hpp"

#include "xlswipt/errors.hpp"

namespace xlswipt {

SurrogateVector surrogate(const PowerAllocation& pa) {
    const std::size_t S = pa.subarrays;
    double id_sum = 0.0;
    double eh_sum = 0.0;
    for (std::size_t s = 0; s < S; ++s) {
        id_sum += pa.id_total(s);
        eh_sum += pa.eh_total(s);
    }
    if (!(id_sum + eh_sum > 0.0)) {
        throw UndefinedSurrogate("surrogate of an all-zero allocation");
    }

    SurrogateVector out;
    double id_weight = 0.0;
    if (id_sum > 0.0 && eh_sum > 0.0) {
        out.balance = eh_sum / id_sum;
        id_weight = out.balance;
    } else if (eh_sum == 0.0) {
        id_weight = 1.0;
    }

    out.h.resize(S);
    double norm = 0.0;
    for (std::size_t s = 0; s < S; ++s) {
        out.h[s] = id_weight * pa.id_total(s) + pa.eh_total(s);
        norm += out.h[s];
    }
    for (double& v : out.h) {
        v /= norm;
    }
    return out;
}

std::vector<bool> binary_decision(const SurrogateVector& h) {
    // Ties within rounding of the normalisation count as equal to the mean.
    const double mean = (1.0 - 1e-12) / static_cast<double>(h.h.size());
    std::vector<bool> a(h.h.size());
    double best = -1.0;
    std::size_t arg = 0;
    for (std::size_t s = 0; s < h.h.size(); ++s) {
        a[s] = h.h[s] >= mean;
        if (h.h[s] > best) {
            best = h.h[s];
            arg = s;
        }
    }
    if (!h.h.empty()) {
        a[arg] = true;
    }
    return a;
}

std::vector<double> scale_activation(const SurrogateVector& h, const std::vector<bool>& active) {
    std::vector<double> out(h.h.size());
    for (std::size_t s = 0; s < out.size(); ++s) {
        out[s] = active[s] ? h.h[s] : 0.0;
    }
    return out;
}

}  // namespace xlswipt
