// SPDX-License-Identifier: Apache-2.0
//
// xlswipt run <config> [options]
// xlswipt sweep <config> --axis {s|eh|rate} --grid v1,v2,... [options]
//
// Exit codes: 0 success, 2 invalid configuration, 3 infeasible or invalid
// scenario.

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "xlswipt/errors.hpp"
#include "xlswipt/orchestrator.hpp"
#include "xlswipt/report_io.hpp"
#include "xlswipt/scenario_config.hpp"

namespace fs = std::filesystem;
using namespace xlswipt;

namespace {

struct Options {
    std::string config;
    std::string out = ".";
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> trials;
    std::size_t workers = 1;
    bool emit_trace = false;
    bool dump_gains = false;
    std::string axis;
    std::vector<std::string> grid;
};

void write_file(const fs::path& path, const std::string& body) {
    std::ofstream os(path, std::ios::binary);
    if (!os) {
        throw std::runtime_error("cannot write " + path.string());
    }
    os << body;
}

bool all_infeasible(const std::vector<TrialResult>& results) {
    for (const auto& r : results) {
        if (r.pa_fa.status != RunStatus::Infeasible) {
            return false;
        }
    }
    return !results.empty();
}

// Runs one scenario, writes its results (and traces) under `stem`, and
// returns its summary. Sets `infeasible` if no trial had a feasible PA-FA.
Summary run_point(const Scenario& sc, const Options& opt, const std::string& stem, bool& infeasible) {
    const auto results = run_trials(sc, opt.workers, opt.emit_trace);
    std::ostringstream res;
    write_header(res, sc, "results");
    write_results(res, results);
    write_file(fs::path(opt.out) / (stem + ".csv"), res.str());
    if (opt.emit_trace) {
        std::ostringstream tr;
        write_header(tr, sc, "trace");
        write_traces(tr, results);
        write_file(fs::path(opt.out) / ("trace" + stem.substr(std::string("results").size()) + ".csv"), tr.str());
    }
    if (opt.dump_gains) {
        std::ostringstream gains;
        write_gain_tables(gains, build_trial(sc, 0).tables);
        write_file(fs::path(opt.out) / ("gains" + stem.substr(std::string("results").size()) + ".txt"), gains.str());
    }
    infeasible = infeasible || all_infeasible(results);
    return summarize(results, sc.subarrays);
}

Scenario with_overrides(Scenario sc, const Options& opt) {
    if (opt.seed) {
        sc.seed = *opt.seed;
    }
    if (opt.trials) {
        if (*opt.trials == 0) {
            throw SchemaError("trials", "must be positive");
        }
        sc.trials = *opt.trials;
    }
    return sc;
}

double parse_value(const std::string& text, const std::string& axis) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) {
            throw std::invalid_argument(text);
        }
        return v;
    } catch (const std::exception&) {
        throw SchemaError("grid", "'" + text + "' is not a number for axis " + axis);
    }
}

int run(const Options& opt) {
    const Scenario sc = with_overrides(load_scenario(opt.config), opt);
    fs::create_directories(opt.out);
    bool infeasible = false;
    const Summary s = run_point(sc, opt, "results", infeasible);
    std::ostringstream sum;
    write_header(sum, sc, "summary");
    write_summary(sum, {{"none", "", s}});
    write_file(fs::path(opt.out) / "summary.csv", sum.str());
    std::cout << "trials " << s.trials << ", eta PA-FA " << format_number(s.eta_pa_fa) << ", eta PA-SA "
              << format_number(s.eta_pa_sa) << ", S_a/S " << format_number(s.active_ratio) << "\n";
    if (infeasible) {
        std::cerr << "error: no trial admits a feasible power allocation under the QoS floors\n";
        return 3;
    }
    return 0;
}

int sweep(const Options& opt) {
    const Scenario base = with_overrides(load_scenario(opt.config), opt);
    if (opt.grid.empty()) {
        throw SchemaError("grid", "sweep needs at least one grid value");
    }
    fs::create_directories(opt.out);
    std::vector<SummaryRow> rows;
    bool infeasible = false;
    for (const auto& text : opt.grid) {
        Scenario sc = base;
        const double v = parse_value(text, opt.axis);
        if (opt.axis == "s") {
            if (v < 1.0 || v != std::floor(v)) {
                throw SchemaError("grid", "subarray counts must be positive integers");
            }
            sc.subarrays = static_cast<std::size_t>(v);
        } else if (opt.axis == "eh") {
            if (v < 0.0) {
                throw SchemaError("grid", "energy thresholds must be non-negative");
            }
            sc.energy_threshold = v * 1e-3;
        } else {
            if (v < 0.0) {
                throw SchemaError("grid", "rate thresholds must be non-negative");
            }
            sc.rate_threshold = v;
        }
        const Summary s = run_point(sc, opt, "results_" + opt.axis + "_" + text, infeasible);
        rows.push_back({opt.axis, text, s});
        std::cout << opt.axis << "=" << text << ": eta PA-FA " << format_number(s.eta_pa_fa) << ", eta PA-SA "
                  << format_number(s.eta_pa_sa) << ", S_a/S " << format_number(s.active_ratio) << "\n";
    }
    std::ostringstream sum;
    write_header(sum, base, "summary");
    write_summary(sum, rows);
    write_file(fs::path(opt.out) / "summary.csv", sum.str());
    if (infeasible) {
        std::cerr << "error: some grid points admit no feasible power allocation\n";
        return 3;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Power minimisation for XL-MIMO SWIPT with subarray activation"};
    app.require_subcommand(1);
    Options opt;

    auto add_common = [&opt](CLI::App* sub) {
        sub->add_option("config", opt.config, "scenario JSON file")->required();
        sub->add_option("--out", opt.out, "output directory");
        sub->add_option("--seed", opt.seed, "base seed, overrides users.seed");
        sub->add_option("--trials", opt.trials, "Monte Carlo trials, overrides trials");
        sub->add_option("--workers", opt.workers, "worker threads")->check(CLI::PositiveNumber);
        sub->add_flag("--emit-trace", opt.emit_trace, "write per-iteration P_C traces");
        sub->add_flag("--dump-gains", opt.dump_gains, "write the gain tables of trial 0");
    };
    CLI::App* run_cmd = app.add_subcommand("run", "run EA-FA, PA-FA and PA-SA on every trial");
    add_common(run_cmd);
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "repeat a run over a parameter grid");
    add_common(sweep_cmd);
    sweep_cmd->add_option("--axis", opt.axis, "s, eh (mW) or rate (bit/s/Hz)")
        ->required()
        ->check(CLI::IsMember({"s", "eh", "rate"}));
    sweep_cmd->add_option("--grid", opt.grid, "grid values")->required()->delimiter(',');

    CLI11_PARSE(app, argc, argv);

    try {
        return run_cmd->parsed() ? run(opt) : sweep(opt);
    } catch (const SchemaError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const InvalidScenario& e) {
        std::cerr << "invalid scenario: " << e.what() << "\n";
        return 3;
    } catch (const InvalidGeometry& e) {
        std::cerr << "invalid geometry: " << e.what() << "\n";
        return 3;
    } catch (const DegenerateDistance& e) {
        std::cerr << "invalid scenario: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
