#include "rideq/sweeps.hpp"

#include "rideq/config_io.hpp"
#include "rideq/errors.hpp"
#include "rideq/fragmented.hpp"
#include "rideq/integrated.hpp"
#include "rideq/mixed.hpp"
#include "rideq/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <numeric>
#include <string>
#include <vector>

namespace rideq {

namespace {

SweepCell num(double v) { return SweepCell{v, {}}; }
SweepCell txt(std::string s) { return SweepCell{0.0, std::move(s)}; }

std::string sanitize(std::string s) {
    for (char& ch : s)
        if (ch == ',' || ch == '\n' || ch == '\r' || ch == '"')
            ch = ';';
    return s;
}

std::string regime_label(MixedRegime r) {
    switch (r) {
    case MixedRegime::AllIntegrator:
        return "all-integrator";
    case MixedRegime::NoIntegrator:
        return "no-integrator";
    default:
        return "mixed";
    }
}

double mean(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Run one sweep row, converting any solver error into a status marker.
template <class Fn>
void run_rows(std::vector<std::vector<SweepCell>>& rows, long n, Fn&& fill_row) {
    rows.assign(n, {});
#pragma omp parallel for schedule(dynamic)
    for (long r = 0; r < n; ++r) {
        try {
            rows[r] = fill_row(r);
        } catch (const std::exception& e) {
            rows[r] = {txt(std::string("error: ") + e.what())};
        }
    }
}

// Pad marked rows to the table width so the emitted CSV stays rectangular.
void pad_rows(std::vector<std::vector<SweepCell>>& rows, std::size_t width) {
    for (auto& row : rows) {
        if (row.size() == width)
            continue;
        std::string marker = row.empty() ? "error" : row.front().text;
        row.assign(width, txt("ERR"));
        row.back() = txt(marker.empty() ? "error" : marker);
    }
}

} // namespace

std::string format_cell(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", value);
    return buf;
}

SweepTable sweep_platform_count(const MarketConfig& config, int count_min, int count_max) {
    config.validate();
    if (count_min < 1 || count_max < count_min)
        throw ValidationError("platform-count range must satisfy 1 <= min <= max");
    double total_fleet = 0.0;
    for (const auto& p : config.platforms)
        total_fleet += p.fleet;

    SweepTable t;
    t.title = "platform_count";
    t.config_digest = config_hash(config);
    t.columns = {"I"};
    const char* regimes[] = {"frag_ne", "frag_so", "int_ne", "int_so", "unchanged"};
    for (const char* r : regimes)
        for (const char* m : {"Q", "F", "profit", "cs", "welfare"})
            t.columns.push_back(std::string(r) + "_" + m);
    t.columns.push_back("status");

    long n = count_max - count_min + 1;
    run_rows(t.rows, n, [&](long r) {
        int count = count_min + static_cast<int>(r);
        std::vector<double> fleets(count, total_fleet / count);
        std::vector<SweepCell> row;
        row.push_back(num(count));
        bool residuals_ok = true;

        auto frag_ne = solve_fragmented_nash(fleets, config);
        residuals_ok &= check_residuals(frag_ne.eq, fleets, config).pass;
        row.insert(row.end(),
                   {num(frag_ne.eq.Q), num(mean(frag_ne.eq.fare)),
                    num(frag_ne.metrics.total_profit), num(frag_ne.metrics.consumer_surplus),
                    num(frag_ne.metrics.welfare)});

        auto frag_so = solve_fragmented_optimum(fleets, config);
        residuals_ok &= check_residuals(frag_so.eq, fleets, config).pass;
        row.insert(row.end(),
                   {num(frag_so.eq.Q), num(mean(frag_so.eq.fare)),
                    num(frag_so.metrics.total_profit), num(frag_so.metrics.consumer_surplus),
                    num(frag_so.metrics.welfare)});

        auto int_ne = solve_integrated_nash(config.tau, fleets, config);
        residuals_ok &= check_residuals(int_ne.eq, fleets, config).pass;
        row.insert(row.end(),
                   {num(int_ne.eq.Q), num(int_ne.eq.fare), num(int_ne.metrics.total_profit),
                    num(int_ne.metrics.consumer_surplus), num(int_ne.metrics.welfare)});

        auto iso = solve_integrated_optimum(fleets, config);
        residuals_ok &= check_residuals(iso.eq, fleets, config).pass;
        row.insert(row.end(),
                   {num(iso.eq.Q), num(iso.eq.fare), num(iso.metrics.total_profit),
                    num(iso.metrics.consumer_surplus), num(iso.metrics.welfare)});

        auto unchanged = unchanged_fare_outcome(frag_ne.eq.fare, config.tau, fleets, config);
        residuals_ok &= check_residuals(unchanged.eq, fleets, config).pass;
        row.insert(row.end(),
                   {num(unchanged.eq.Q), num(unchanged.eq.fare),
                    num(unchanged.metrics.total_profit),
                    num(unchanged.metrics.consumer_surplus), num(unchanged.metrics.welfare)});

        row.push_back(txt(residuals_ok ? "ok" : "residual_check_failed"));
        return row;
    });
    pad_rows(t.rows, t.columns.size());

    auto series_for = [&](const char* metric) {
        std::vector<std::size_t> s;
        for (std::size_t c = 0; c < t.columns.size(); ++c)
            if (t.columns[c].size() > std::strlen(metric) &&
                t.columns[c].substr(t.columns[c].size() - std::strlen(metric)) == metric &&
                t.columns[c] != metric)
                s.push_back(c);
        return s;
    };
    t.panels = {{"demand", 0, series_for("_Q")},
                {"fare", 0, series_for("_F")},
                {"profit", 0, series_for("_profit")},
                {"welfare", 0, series_for("_welfare")}};
    return t;
}

SweepTable sweep_fleet_scaling(const MarketConfig& config, int steps) {
    config.validate();
    if (steps < 1)
        throw ValidationError("fleet sweep needs at least one step");
    std::vector<double> base = config.fleets();
    const std::size_t n_platforms = base.size();

    SweepTable t;
    t.title = "fleet_scaling";
    t.config_digest = config_hash(config);
    t.columns = {"step", "scale"};
    const char* regimes[] = {"frag_ne", "frag_so", "int_ne", "unchanged"};
    for (const char* r : regimes)
        for (const char* m : {"U", "q", "profit"})
            for (std::size_t i = 0; i < n_platforms; ++i)
                t.columns.push_back(std::string(r) + "_" + m + std::to_string(i + 1));
    t.columns.push_back("status");

    run_rows(t.rows, steps, [&](long r) {
        double scale = std::pow(1.1, static_cast<double>(r));
        std::vector<double> fleets(n_platforms);
        for (std::size_t i = 0; i < n_platforms; ++i)
            fleets[i] = base[i] * scale;
        std::vector<SweepCell> row;
        row.push_back(num(static_cast<double>(r)));
        row.push_back(num(scale));
        bool residuals_ok = true;

        auto append_platform_cols = [&](const std::vector<double>& util,
                                        const std::vector<double>& q,
                                        const std::vector<double>& profit) {
            for (double v : util)
                row.push_back(num(v));
            for (double v : q)
                row.push_back(num(v));
            for (double v : profit)
                row.push_back(num(v));
        };

        auto frag_ne = solve_fragmented_nash(fleets, config);
        residuals_ok &= check_residuals(frag_ne.eq, fleets, config).pass;
        append_platform_cols(frag_ne.metrics.utilization, frag_ne.eq.q,
                             frag_ne.metrics.profit);

        auto frag_so = solve_fragmented_optimum(fleets, config);
        residuals_ok &= check_residuals(frag_so.eq, fleets, config).pass;
        append_platform_cols(frag_so.metrics.utilization, frag_so.eq.q,
                             frag_so.metrics.profit);

        auto int_ne = solve_integrated_nash(config.tau, fleets, config);
        residuals_ok &= check_residuals(int_ne.eq, fleets, config).pass;
        append_platform_cols(int_ne.metrics.utilization, int_ne.eq.q, int_ne.metrics.profit);

        auto unchanged = unchanged_fare_outcome(frag_ne.eq.fare, config.tau, fleets, config);
        residuals_ok &= check_residuals(unchanged.eq, fleets, config).pass;
        append_platform_cols(unchanged.metrics.utilization, unchanged.eq.q,
                             unchanged.metrics.profit);

        row.push_back(txt(residuals_ok ? "ok" : "residual_check_failed"));
        return row;
    });
    pad_rows(t.rows, t.columns.size());

    auto series_prefix = [&](const char* metric) {
        std::vector<std::size_t> s;
        std::string needle = std::string("_") + metric;
        for (std::size_t c = 2; c + 1 < t.columns.size(); ++c)
            if (t.columns[c].find(needle) != std::string::npos)
                s.push_back(c);
        return s;
    };
    t.panels = {{"utilization", 1, series_prefix("U")},
                {"demand", 1, series_prefix("q")},
                {"profit", 1, series_prefix("profit")}};
    return t;
}

SweepTable sweep_commission_cli(const MarketConfig& config, int points_per_scenario) {
    config.validate();
    if (points_per_scenario < 2)
        throw ValidationError("commission sweep needs at least two grid points");
    const double fare = 70.0;
    const std::vector<std::vector<double>> scenarios = {
        {2000.0, 2000.0, 2000.0},
        {3000.0, 3000.0, 3000.0},
        {3000.0, 2000.0, 1000.0},
        {4000.0, 3000.0, 2000.0},
    };

    SweepTable t;
    t.title = "commission";
    t.config_digest = config_hash(config);
    t.columns = {"scenario", "N1",  "N2", "N3",    "tau",   "Q",
                 "Q1",       "Q2",  "regime", "tau_1", "tau_2", "status"};

    struct Job {
        std::size_t scenario;
        double tau, tau_1, tau_2;
        std::string error; // threshold-level failure
    };
    std::vector<Job> jobs;
    for (std::size_t s = 0; s < scenarios.size(); ++s) {
        std::vector<double> fares(scenarios[s].size(), fare);
        try {
            CommissionRange range = commission_range(fares, scenarios[s], config);
            double lo = range.tau_1 - 2.0, hi = range.tau_2 + 2.0;
            for (int j = 0; j < points_per_scenario; ++j) {
                double tau = lo + (hi - lo) * j / (points_per_scenario - 1);
                jobs.push_back({s, tau, range.tau_1, range.tau_2, {}});
            }
        } catch (const Error& e) {
            jobs.push_back({s, 0.0, 0.0, 0.0, e.what()});
        }
    }

    run_rows(t.rows, static_cast<long>(jobs.size()), [&](long r) {
        const Job& job = jobs[r];
        const auto& fleets = scenarios[job.scenario];
        std::vector<SweepCell> row;
        row.push_back(txt("S" + std::to_string(job.scenario + 1)));
        for (double v : fleets)
            row.push_back(num(v));
        if (!job.error.empty())
            throw DegenerateRange(job.error);
        row.push_back(num(job.tau));
        std::vector<double> fares(fleets.size(), fare);
        MixedEquilibrium eq = solve_mixed(fares, job.tau, fleets, config);
        bool residuals_ok = check_residuals(eq, fleets, config).pass;
        row.push_back(num(eq.Q));
        row.push_back(num(eq.Q1));
        row.push_back(num(eq.Q2));
        row.push_back(txt(regime_label(eq.regime)));
        row.push_back(num(job.tau_1));
        row.push_back(num(job.tau_2));
        row.push_back(txt(residuals_ok ? "ok" : "residual_check_failed"));
        return row;
    });
    pad_rows(t.rows, t.columns.size());
    t.panels = {{"demand", 4, {5, 6, 7}}};
    return t;
}

void emit(const SweepTable& table, EmitFormat format, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot open output file: " + path);

    auto render = [&](const SweepCell& cell) {
        return cell.text.empty() ? format_cell(cell.value) : sanitize(cell.text);
    };

    if (format == EmitFormat::Csv) {
        for (std::size_t c = 0; c < table.columns.size(); ++c)
            out << (c ? "," : "") << sanitize(table.columns[c]);
        out << "\n";
        for (const auto& row : table.rows) {
            for (std::size_t c = 0; c < row.size(); ++c)
                out << (c ? "," : "") << render(row[c]);
            out << "\n";
        }
    } else {
        out << "# table: " << table.title << " config: " << table.config_digest << "\n";
        for (const auto& panel : table.panels) {
            out << "# panel: " << panel.name << "\n# columns: "
                << table.columns[panel.x_column];
            for (std::size_t c : panel.series)
                out << " " << table.columns[c];
            out << "\n";
            for (const auto& row : table.rows) {
                if (row.size() <= panel.x_column)
                    continue;
                out << render(row[panel.x_column]);
                for (std::size_t c : panel.series)
                    out << " " << (c < row.size() ? render(row[c]) : std::string("ERR"));
                out << "\n";
            }
            out << "\n";
        }
    }
    if (!out)
        throw IoError("write failed: " + path);
}

} // namespace rideq
