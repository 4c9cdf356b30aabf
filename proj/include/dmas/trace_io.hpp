#pragma once

#include "dmas/trace.hpp"

#include <json.hpp>

#include <filesystem>
#include <ostream>
#include <string>

namespace dmas {

/// Column order: k, x, xhat, u, d, eps, gamma, then x_c, f, eps_bar,
/// consensus_err. Vector columns are named like x[agent][dim].
void write_csv(std::ostream& os, const SimulationTrace& trace);
std::string csv_header(const SimulationTrace& trace);

nlohmann::json summary_json(const SimulationTrace& trace);

/// Every stride-th step: k, per-agent states and global metrics.
void write_plot_data(std::ostream& os, const SimulationTrace& trace, std::size_t stride);

enum class OutputFormat { Csv, Json };

struct EmitResult {
  std::filesystem::path trace_file;
  std::filesystem::path summary_file;
  std::filesystem::path plot_file;
};

/// Writes <name>.csv (or <name>.trace.json), <name>.summary.json and,
/// when plot_stride > 0, <name>.plot.csv into dir. Each file is written to a
/// temporary name and renamed into place.
EmitResult emit(const SimulationTrace& trace, const std::filesystem::path& dir, OutputFormat format,
                std::size_t plot_stride = 0);

}  // namespace dmas
