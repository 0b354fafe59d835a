// SPDX-License-Identifier: Apache-2.0

#include "xlswipt/report_io.hpp"

#include <charconv>
#include <cmath>

#include "xlswipt/scenario_config.hpp"

namespace xlswipt {

std::string csv_field(const std::string& value) {
    if (value.find_first_of(",\"\r\n") == std::string::npos) {
        return value;
    }
    std::string out = "\"";
    for (char c : value) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    out += '"';
    return out;
}

std::string format_number(double value) {
    if (std::isnan(value)) {
        return "nan";
    }
    if (std::isinf(value)) {
        return value > 0 ? "inf" : "-inf";
    }
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

void write_header(std::ostream& os, const Scenario& scenario, const std::string& kind) {
    os << "# xlswipt " << kind << "\n";
    os << "# seed: " << scenario.seed << "\n";
    os << "# config: " << scenario_to_json(scenario).dump() << "\n";
}

namespace {

std::string join(const std::vector<double>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) {
            out += ';';
        }
        out += format_number(values[i]);
    }
    return out;
}

void write_report(std::ostream& os, const TrialResult& t, const SolverReport& r) {
    std::string mask;
    for (bool a : r.activation) {
        mask += a ? '1' : '0';
    }
    os << t.index << ',' << t.seed << ',' << to_string(r.method) << ',' << to_string(r.status) << ','
       << format_number(r.power_consumption) << ',' << format_number(r.transmit_power) << ',' << r.active_count
       << ',' << csv_field(mask) << ',' << r.outer_iterations << ',' << r.inner_iterations << ',' << r.pa_solves
       << ',' << r.pa_converged << ',' << r.pa_screened << ',' << csv_field(join(r.rates)) << ','
       << csv_field(join(r.harvested)) << '\n';
}

}  // namespace

void write_results(std::ostream& os, const std::vector<TrialResult>& results) {
    os << "trial,seed,method,status,pc_w,ptx_w,active_count,activation,outer_iterations,inner_iterations,"
          "pa_solves,pa_converged,pa_screened,rates_bps_hz,harvested_w\n";
    for (const auto& t : results) {
        write_report(os, t, t.ea_fa);
        write_report(os, t, t.pa_fa);
        write_report(os, t, t.pa_sa);
    }
}

void write_summary(std::ostream& os, const std::vector<SummaryRow>& rows) {
    os << "axis,value,trials,feasible_trials,pc_ea_fa_w,pc_pa_fa_w,pc_pa_sa_w,ptx_ea_fa_w,eta_ea_fa,eta_pa_fa,"
          "eta_pa_sa,active_ratio,active_ratio_stderr,pa_converged_fraction,max_outer_iterations\n";
    for (const auto& row : rows) {
        const Summary& s = row.summary;
        os << csv_field(row.axis) << ',' << csv_field(row.value) << ',' << s.trials << ',' << s.feasible_trials << ','
           << format_number(s.mean_pc_ea_fa) << ',' << format_number(s.mean_pc_pa_fa) << ','
           << format_number(s.mean_pc_pa_sa) << ',' << format_number(s.mean_ptx_ea_fa) << ',' << format_number(1.0)
           << ',' << format_number(s.eta_pa_fa) << ',' << format_number(s.eta_pa_sa) << ','
           << format_number(s.active_ratio) << ',' << format_number(s.active_ratio_stderr) << ','
           << format_number(s.pa_converged_fraction) << ',' << s.max_outer_iterations << '\n';
    }
}

void write_traces(std::ostream& os, const std::vector<TrialResult>& results) {
    os << "trial,method,iteration,pc_w\n";
    for (const auto& t : results) {
        for (const SolverReport* r : {&t.pa_fa, &t.pa_sa}) {
            for (std::size_t i = 0; i < r->trace.size(); ++i) {
                os << t.index << ',' << to_string(r->method) << ',' << i + 1 << ',' << format_number(r->trace[i])
                   << '\n';
            }
        }
    }
}

}  // namespace xlswipt
