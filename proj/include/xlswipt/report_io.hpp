// SPDX-License-Identifier: Apache-2.0
//
// CSV output. Every file starts with `#` comment lines carrying the resolved
// scenario as one-line JSON and the base seed, followed by an RFC 4180 table.
//
// results: trial, seed, method, status, pc_w, ptx_w, active_count,
//          activation, outer_iterations, inner_iterations, pa_solves,
//          pa_converged, pa_screened, rates_bps_hz, harvested_w
//          (activation is a 0/1 string; the per-user lists are ';'-joined)
// summary: axis, value, trials, feasible_trials, pc_ea_fa_w, pc_pa_fa_w,
//          pc_pa_sa_w, ptx_ea_fa_w, eta_ea_fa, eta_pa_fa, eta_pa_sa,
//          active_ratio, active_ratio_stderr, pa_converged_fraction,
//          max_outer_iterations
// trace:   trial, method, iteration, pc_w

#ifndef XLSWIPT_REPORT_IO_HPP
#define XLSWIPT_REPORT_IO_HPP

#include <ostream>
#include <string>
#include <vector>

#include "xlswipt/orchestrator.hpp"

namespace xlswipt {

/// Quotes a field when it contains a comma, quote or line break.
std::string csv_field(const std::string& value);

/// Shortest round-trip decimal representation.
std::string format_number(double value);

void write_header(std::ostream& os, const Scenario& scenario, const std::string& kind);

void write_results(std::ostream& os, const std::vector<TrialResult>& results);

struct SummaryRow {
    std::string axis;
    std::string value;
    Summary summary;
};

void write_summary(std::ostream& os, const std::vector<SummaryRow>& rows);

void write_traces(std::ostream& os, const std::vector<TrialResult>& results);

}  // namespace xlswipt

#endif  // XLSWIPT_REPORT_IO_HPP
