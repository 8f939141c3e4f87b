#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gridss/network.hpp"
#include "gridss/numeric_policy.hpp"
#include "gridss/smallsignal.hpp"

namespace gridss {

/// Names of the seven swept GFM gains, in canonical order.
extern const std::array<const char*, 7> kGfmGainNames;

double gfm_gain_value(const GfmGains& g, const std::string& name);

/// "numerator >= ratio * denominator" (or strict >) between two gains.
struct RatioRule {
    std::string numerator;
    std::string denominator;
    double ratio = 10.0;
    bool strict = false;

    [[nodiscard]] bool admits(const GfmGains& g) const;
    [[nodiscard]] std::string describe() const;
};

/// Default engineering rules: integral gains 10x their proportional gain, and
/// the (configurable) current-vs-voltage proportional ratio. The literal 10x
/// variant of the latter empties the grid for the shipped ranges, so the
/// default ratio is 1 (strict).
std::vector<RatioRule> default_rules(double current_vs_voltage_ratio = 1.0,
                                     bool current_vs_voltage_strict = true);

struct GainGrid {
    std::map<std::string, std::vector<double>> levels;
    std::vector<RatioRule> rules;
    std::vector<GfmGains> admissible;

    [[nodiscard]] std::size_t size() const { return admissible.size(); }
};

/// Cartesian product of the levels filtered by the rules. Throws ConfigError
/// naming the binding rule when nothing survives.
GainGrid build_grid(const std::map<std::string, std::vector<double>>& levels,
                    const std::vector<RatioRule>& rules);

/// Shipped discretization of the published gain ranges; 7000 admissible
/// combinations under the default rules.
std::map<std::string, std::vector<double>> default_levels();
GainGrid default_grid(double current_vs_voltage_ratio = 1.0);

/// Fixed GFL gains checked against the same time-scale rules, pass/fail per rule.
struct GflRuleDiagnostic {
    std::string rule;
    bool pass = false;
};
std::vector<GflRuleDiagnostic> check_gfl_rules(const GflGains& g);

struct SweepSample {
    int id = 0;
    GfmGains gains;
};

struct SweepPlan {
    std::vector<SweepSample> samples;
    std::uint64_t seed = 0;
    std::vector<OperatingCondition> conditions;  // case shares + load_scale
    std::vector<LineModel> line_models;
    int segments = 5;
};

/// Uniform sample without replacement, deterministic under the seed across
/// platforms (own bounded-draw implementation, no distribution objects).
SweepPlan sample_plan(const GainGrid& grid, std::size_t n, std::uint64_t seed);

struct SweepResultRow {
    int sample_id = 0;
    std::string case_name;
    double load_scale = 0.0;
    std::string line_model;
    double max_real = 0.0;
    bool stable = false;
    std::string equilibrium_status;  // "converged" | "no_equilibrium" | "error"
    std::string top_participant;
    double top_participation = 0.0;
    double wall_ms = 0.0;

    [[nodiscard]] bool usable() const { return equilibrium_status == "converged"; }
};

struct BoxplotStats {
    std::size_t count = 0;
    std::size_t failures = 0;
    double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0;
};

struct SweepResults {
    std::vector<SweepResultRow> rows;  // canonical order
    std::map<std::string, BoxplotStats> summaries;  // key "<case>|<scale>|<model>"
    SweepPlan plan;
};

std::string summary_key(const std::string& case_name, double load_scale,
                        const std::string& model);

/// Evaluate every (sample x condition x model) cell over a worker pool. Cell
/// failures are recorded, never fatal. The result order and values are
/// independent of the worker count.
SweepResults run_sweep(const SweepPlan& plan, const NetworkCase& base_template,
                       int workers = 1, const NumericPolicy& policy = default_policy());

/// One cell evaluated in isolation; reproduces the corresponding sweep row.
SweepResultRow run_cell(const SweepSample& sample, const OperatingCondition& condition,
                        LineModel model, int segments, const NetworkCase& base_template,
                        const NumericPolicy& policy = default_policy());

BoxplotStats boxplot_stats(std::vector<double> values, std::size_t failures);

/// Spearman rank correlation of one gain against max_real per summary cell.
struct CorrelationCell {
    std::string key;
    std::size_t count = 0;
    double rho = 0.0;
    bool sufficient = false;  // count >= 30
};
std::vector<CorrelationCell> correlate_gain(const SweepResults& results,
                                            const std::string& gain_name);

/// Spearman rho on raw paired data (average ranks for ties).
double spearman_rho(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace gridss
