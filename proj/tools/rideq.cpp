// rideq: solve ride-sourcing market scenarios, run the experiment sweeps,
// and verify solutions against the independent oracle.

#include "rideq/config_io.hpp"
#include "rideq/errors.hpp"
#include "rideq/fragmented.hpp"
#include "rideq/integrated.hpp"
#include "rideq/mixed.hpp"
#include "rideq/oracle.hpp"
#include "rideq/sweeps.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace {

using nlohmann::json;
using namespace rideq;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitSolver = 3;
constexpr int kExitInvariant = 4;

json metrics_json(const MarketMetrics& m) {
    return json{{"profit", m.profit},
                {"total_profit", m.total_profit},
                {"consumer_surplus", m.consumer_surplus},
                {"integrator_revenue", m.integrator_revenue},
                {"welfare", m.welfare},
                {"utilization", m.utilization}};
}

json report_json(const ResidualReport& rep) {
    json entries = json::array();
    for (const auto& e : rep.entries)
        entries.push_back(
            {{"name", e.name}, {"value", e.value}, {"tolerance", e.tolerance}, {"pass", e.pass}});
    return json{{"pass", rep.pass}, {"entries", entries}};
}

void write_out(const json& doc, const std::string& path) {
    if (path.empty())
        return;
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot open output file: " + path);
    out << doc.dump(2) << "\n";
}

int run_solve(const std::string& config_path, const std::string& regime, double tau,
              bool tau_set, const std::string& out_path) {
    MarketConfig config = load_config(config_path);
    std::vector<double> fleets = config.fleets();
    double commission = tau_set ? tau : config.tau;
    json doc;
    bool residuals_pass = true;

    if (regime == "fragmented-ne" || regime == "fragmented-so") {
        FragmentedSolution sol = regime == "fragmented-ne"
                                     ? solve_fragmented_nash(fleets, config)
                                     : solve_fragmented_optimum(fleets, config);
        auto rep = check_residuals(sol.eq, fleets, config);
        residuals_pass = rep.pass;
        doc = {{"regime", regime},
               {"Q", sol.eq.Q},
               {"C", sol.eq.C},
               {"q", sol.eq.q},
               {"idle", sol.eq.idle},
               {"fare", sol.eq.fare},
               {"metrics", metrics_json(sol.metrics)},
               {"residuals", report_json(rep)}};
        std::cout << regime << ": Q=" << format_cell(sol.eq.Q) << " C=" << format_cell(sol.eq.C)
                  << " welfare=" << format_cell(sol.metrics.welfare) << "\n";
    } else if (regime == "integrated-ne" || regime == "integrated-so") {
        IntegratedSolution sol = regime == "integrated-ne"
                                     ? solve_integrated_nash(commission, fleets, config)
                                     : solve_integrated_optimum(fleets, config);
        auto rep = check_residuals(sol.eq, fleets, config);
        residuals_pass = rep.pass;
        doc = {{"regime", regime},
               {"Q", sol.eq.Q},
               {"fare", sol.eq.fare},
               {"tau", sol.eq.tau},
               {"pooled_idle", sol.eq.pooled_idle},
               {"q", sol.eq.q},
               {"metrics", metrics_json(sol.metrics)},
               {"residuals", report_json(rep)}};
        std::cout << regime << ": Q=" << format_cell(sol.eq.Q)
                  << " fare=" << format_cell(sol.eq.fare)
                  << " welfare=" << format_cell(sol.metrics.welfare) << "\n";
    } else if (regime == "mixed") {
        if (!config.all_fares_set())
            throw ValidationError("mixed regime requires a fare for every platform");
        MixedEquilibrium eq = solve_mixed(config.fares(), commission, fleets, config);
        MarketMetrics m = metrics(eq, fleets, config);
        auto rep = check_residuals(eq, fleets, config);
        residuals_pass = rep.pass;
        const char* label = eq.regime == MixedRegime::AllIntegrator ? "all-integrator"
                            : eq.regime == MixedRegime::NoIntegrator ? "no-integrator"
                                                                     : "mixed";
        doc = {{"regime", "mixed"},
               {"channel_regime", label},
               {"Q", eq.Q},
               {"Q1", eq.Q1},
               {"Q2", eq.Q2},
               {"C", eq.C},
               {"C1", eq.C1},
               {"C2", eq.C2},
               {"tau", eq.tau},
               {"integrator_demand", eq.integrator_demand},
               {"direct_demand", eq.direct_demand},
               {"idle", eq.idle},
               {"pooled_idle", eq.pooled_idle},
               {"metrics", metrics_json(m)},
               {"residuals", report_json(rep)}};
        std::cout << "mixed (" << label << "): Q=" << format_cell(eq.Q)
                  << " Q1=" << format_cell(eq.Q1) << " Q2=" << format_cell(eq.Q2) << "\n";
    } else {
        throw ValidationError("unknown regime: " + regime);
    }

    write_out(doc, out_path);
    if (!residuals_pass) {
        std::cerr << "invariant failure: oracle residual check failed\n";
        return kExitInvariant;
    }
    return kExitOk;
}

int run_sweep(const std::string& which, const std::string& config_path,
              const std::string& out_dir, int steps, const std::string& format) {
    MarketConfig config = load_config(config_path);
    SweepTable table;
    if (which == "platforms")
        table = sweep_platform_count(config, 1, steps > 0 ? steps : 15);
    else if (which == "fleet")
        table = sweep_fleet_scaling(config, steps > 0 ? steps : 30);
    else if (which == "commission")
        table = sweep_commission_cli(config, steps > 0 ? steps : 200);
    else
        throw ValidationError("unknown sweep: " + which);

    EmitFormat fmt;
    std::string ext;
    if (format == "csv") {
        fmt = EmitFormat::Csv;
        ext = ".csv";
    } else if (format == "plotdata") {
        fmt = EmitFormat::Plotdata;
        ext = ".plotdata";
    } else {
        throw ValidationError("unknown format: " + format);
    }
    std::string path = out_dir + "/" + table.title + ext;
    emit(table, fmt, path);
    std::cout << "wrote " << path << " (" << table.rows.size() << " rows)\n";

    for (const auto& row : table.rows)
        if (!row.empty() && !row.back().text.empty() && row.back().text != "ok") {
            std::cerr << "invariant failure in sweep row: " << row.back().text << "\n";
            return kExitInvariant;
        }
    return kExitOk;
}

int run_verify(const std::string& config_path) {
    MarketConfig config = load_config(config_path);
    std::vector<double> fleets = config.fleets();
    bool all_pass = true;
    auto report = [&](const std::string& name, const ResidualReport& rep) {
        all_pass = all_pass && rep.pass;
        std::cout << (rep.pass ? "PASS " : "FAIL ") << name << " (worst residual "
                  << format_cell(rep.max_abs_scaled) << "x tolerance)\n";
    };

    auto frag_ne = solve_fragmented_nash(fleets, config);
    report("fragmented-ne", check_residuals(frag_ne.eq, fleets, config));
    auto frag_so = solve_fragmented_optimum(fleets, config);
    report("fragmented-so", check_residuals(frag_so.eq, fleets, config));
    auto int_ne = solve_integrated_nash(config.tau, fleets, config);
    report("integrated-ne", check_residuals(int_ne.eq, fleets, config));
    auto int_so = solve_integrated_optimum(fleets, config);
    report("integrated-so", check_residuals(int_so.eq, fleets, config));

    // Grid-oracle cross checks on the solved quantities.
    {
        double br = grid_best_response(0, frag_ne.eq.q, fleets, config, 20001,
                                       MarketForm::Fragmented);
        double cell = 0.999 *
                      oracle_detail::scan_max_demand(config.matching, fleets[0], config.T) /
                      20000.0;
        bool ok = std::abs(br - frag_ne.eq.q[0]) < 2.0 * cell;
        all_pass = all_pass && ok;
        std::cout << (ok ? "PASS " : "FAIL ") << "fragmented-ne grid best response"
                  << " (solver " << format_cell(frag_ne.eq.q[0]) << ", grid "
                  << format_cell(br) << ")\n";
    }
    if (config.all_fares_set()) {
        MixedEquilibrium eq = solve_mixed(config.fares(), config.tau, fleets, config);
        report("mixed", check_residuals(eq, fleets, config));
    }
    if (!all_pass) {
        std::cerr << "invariant failure\n";
        return kExitInvariant;
    }
    std::cout << "all checks passed\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"ride-sourcing market equilibrium toolkit"};
    app.require_subcommand(1);

    std::string config_path, out_path, regime, sweep_kind, format = "csv";
    double tau = 0.0;
    int steps = 0;

    auto* solve = app.add_subcommand("solve", "solve one scenario");
    solve->add_option("--config", config_path)->required();
    solve->add_option("--regime", regime)->required();
    auto* tau_opt = solve->add_option("--tau", tau, "commission (HKD/trip)");
    solve->add_option("--out", out_path, "write solution JSON here");

    auto* sweep = app.add_subcommand("sweep", "run an experiment sweep");
    sweep->add_option("kind", sweep_kind, "platforms|fleet|commission")->required();
    sweep->add_option("--config", config_path)->required();
    std::string out_dir;
    sweep->add_option("--out", out_dir)->required();
    sweep->add_option("--steps", steps);
    sweep->add_option("--format", format)->check(CLI::IsMember({"csv", "plotdata"}));

    auto* verify = app.add_subcommand("verify", "run the invariant/oracle suite");
    verify->add_option("--config", config_path)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (solve->parsed())
            return run_solve(config_path, regime, tau, tau_opt->count() > 0, out_path);
        if (sweep->parsed())
            return run_sweep(sweep_kind, config_path, out_dir, steps, format);
        if (verify->parsed())
            return run_verify(config_path);
        return kExitValidation;
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const DomainError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const Error& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return kExitSolver;
    } catch (const std::exception& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return kExitSolver;
    }
}
