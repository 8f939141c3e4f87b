#pragma once

#include <string>
#include <vector>

#include "gridss/smallsignal.hpp"
#include "gridss/sweep.hpp"

namespace gridss {

/// Shortest round-trippable decimal form of a double (%.17g trimmed).
std::string format_double(double v);

std::string results_csv(const SweepResults& results);
SweepResults parse_results_csv(const std::string& text);

std::string summary_json(const SweepResults& results, const NumericPolicy& policy);

/// Eigenvalue scatter rows for one analyzed cell.
std::string eigs_csv(int sample_id, const std::string& line_model,
                     const StabilityVerdict& verdict);

/// Frequency response table: f_hz, model, |Z_in|, arg Z_in (one row per model
/// per frequency, plus the exact distributed-line reference).
std::string freqresp_csv(const BranchSpec& branch, const std::vector<LineModel>& models,
                         int segments, double f_min_hz, double f_max_hz, int points,
                         double f_base_hz);

/// Boxplot of max_real per condition group, one box per line model.
std::string boxplot_svg(const SweepResults& results);

/// Eigenvalue scatter (re vs im) with one marker class per line model.
struct EigScatterSeries {
    std::string line_model;
    std::vector<std::complex<double>> eigenvalues;
};
std::string eig_scatter_svg(const std::vector<EigScatterSeries>& series);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace gridss
