#pragma once

// The four reproducible experiments as tabular sweeps, plus CSV / plot-data
// emission. Rows are computed concurrently but stored and emitted in sweep
// order, so output is deterministic.

#include "rideq/market.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace rideq {

struct SweepCell {
    double value = 0.0;
    std::string text; // non-empty: emitted verbatim (labels, error markers)
};

// A named figure panel: one x column and its series columns.
struct SweepPanel {
    std::string name;
    std::size_t x_column;
    std::vector<std::size_t> series;
};

struct SweepTable {
    std::string title;
    std::string config_digest;
    std::vector<std::string> columns;
    std::vector<std::vector<SweepCell>> rows;
    std::vector<SweepPanel> panels;
};

enum class EmitFormat { Csv, Plotdata };

// Equal-split platform-count sweep at fixed total fleet: fragmented NE/SO,
// integrated NE/SO and the unchanged-fare counterfactual per count.
SweepTable sweep_platform_count(const MarketConfig& config, int count_min, int count_max);

// Scale every configured fleet by 10% per step; per-platform utilization,
// demand and profit under fragmented NE/SO, integrated NE, unchanged-fare.
SweepTable sweep_fleet_scaling(const MarketConfig& config, int steps);

// Commission sweep at fixed fare 70 over the four supply scenarios, each on
// a uniform grid spanning [tau_1 - 2, tau_2 + 2].
SweepTable sweep_commission_cli(const MarketConfig& config, int points_per_scenario);

// CSV: header row, '.' decimal separator, 12 significant digits, LF line
// endings. Plotdata: one whitespace-separated block per panel.
void emit(const SweepTable& table, EmitFormat format, const std::string& path);

// 12-significant-digit rendering used for every numeric cell.
std::string format_cell(double value);

} // namespace rideq
