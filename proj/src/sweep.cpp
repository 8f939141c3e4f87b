#include "gridss/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>
#include <thread>

#include "gridss/errors.hpp"
#include "gridss/rng.hpp"

namespace gridss {

const std::array<const char*, 7> kGfmGainNames = {"t_a",  "k_d",  "k_q", "k_pv",
                                                  "k_iv", "k_pc", "k_ic"};

double gfm_gain_value(const GfmGains& g, const std::string& name) {
    if (name == "t_a") return g.t_a;
    if (name == "k_d") return g.k_d;
    if (name == "k_q") return g.k_q;
    if (name == "k_pv") return g.k_pv;
    if (name == "k_iv") return g.k_iv;
    if (name == "k_pc") return g.k_pc;
    if (name == "k_ic") return g.k_ic;
    throw ConfigError("unknown GFM gain '" + name + "'");
}

namespace {

void set_gain(GfmGains& g, const std::string& name, double value) {
    if (name == "t_a") g.t_a = value;
    else if (name == "k_d") g.k_d = value;
    else if (name == "k_q") g.k_q = value;
    else if (name == "k_pv") g.k_pv = value;
    else if (name == "k_iv") g.k_iv = value;
    else if (name == "k_pc") g.k_pc = value;
    else if (name == "k_ic") g.k_ic = value;
    else throw ConfigError("unknown GFM gain '" + name + "'");
}

std::vector<double> linspace(double lo, double hi, int levels) {
    std::vector<double> v;
    if (levels == 1) {
        v.push_back(0.5 * (lo + hi));
        return v;
    }
    for (int i = 0; i < levels; ++i) {
        v.push_back(lo + (hi - lo) * static_cast<double>(i) / (levels - 1));
    }
    return v;
}

}  // namespace

bool RatioRule::admits(const GfmGains& g) const {
    const double lhs = gfm_gain_value(g, numerator);
    const double rhs = ratio * gfm_gain_value(g, denominator);
    return strict ? lhs > rhs : lhs >= rhs;
}

std::string RatioRule::describe() const {
    std::ostringstream oss;
    oss << numerator << (strict ? " > " : " >= ") << ratio << "*" << denominator;
    return oss.str();
}

std::vector<RatioRule> default_rules(double current_vs_voltage_ratio,
                                     bool current_vs_voltage_strict) {
    return {
        {"k_ic", "k_pc", 10.0, false},
        {"k_iv", "k_pv", 10.0, false},
        {"k_pc", "k_pv", current_vs_voltage_ratio, current_vs_voltage_strict},
    };
}

std::map<std::string, std::vector<double>> default_levels() {
    std::map<std::string, std::vector<double>> levels;
    levels["t_a"] = linspace(0.5, 2.0, 5);
    levels["k_d"] = linspace(100.0, 400.0, 5);
    levels["k_q"] = linspace(0.05, 0.2, 5);
    levels["k_pv"] = linspace(0.5, 0.6, 2);
    levels["k_iv"] = linspace(400.0, 800.0, 4);
    // Near-uniform current-loop levels, placed so that the 10x integral rule
    // admits 7 of the 16 (k_pc, k_ic) pairs and the grid totals 7000.
    levels["k_pc"] = {0.74, 0.92, 1.11, 1.27};
    levels["k_ic"] = {1.19, 7.45, 11.0, 14.3};
    return levels;
}

GainGrid build_grid(const std::map<std::string, std::vector<double>>& levels,
                    const std::vector<RatioRule>& rules) {
    for (const char* name : kGfmGainNames) {
        const auto it = levels.find(name);
        if (it == levels.end() || it->second.empty()) {
            throw ConfigError(std::string("no levels for gain '") + name + "'");
        }
    }
    GainGrid grid;
    grid.levels = levels;
    grid.rules = rules;

    std::array<std::size_t, 7> idx{};
    const auto level_count = [&](int p) { return levels.at(kGfmGainNames[p]).size(); };
    std::vector<std::size_t> rejected_by(rules.size(), 0);
    bool done = false;
    while (!done) {
        GfmGains g;
        for (int p = 0; p < 7; ++p) {
            set_gain(g, kGfmGainNames[p], levels.at(kGfmGainNames[p])[idx[p]]);
        }
        bool ok = true;
        for (std::size_t r = 0; r < rules.size(); ++r) {
            if (!rules[r].admits(g)) {
                ++rejected_by[r];
                ok = false;
                break;
            }
        }
        if (ok) grid.admissible.push_back(g);

        done = true;
        for (int p = 6; p >= 0; --p) {
            if (++idx[p] < level_count(p)) {
                done = false;
                break;
            }
            idx[p] = 0;
        }
    }

    if (grid.admissible.empty()) {
        std::size_t worst = 0;
        for (std::size_t r = 1; r < rules.size(); ++r) {
            if (rejected_by[r] > rejected_by[worst]) worst = r;
        }
        throw ConfigError("gain grid empty after filtering; binding rule: " +
                          (rules.empty() ? std::string("none") : rules[worst].describe()));
    }
    return grid;
}

GainGrid default_grid(double current_vs_voltage_ratio) {
    return build_grid(default_levels(), default_rules(current_vs_voltage_ratio, true));
}

std::vector<GflRuleDiagnostic> check_gfl_rules(const GflGains& g) {
    std::vector<GflRuleDiagnostic> out;
    out.push_back({"k_ip >= 10*k_pp", g.k_ip >= 10.0 * g.k_pp});
    out.push_back({"k_iq >= 10*k_pq", g.k_iq >= 10.0 * g.k_pq});
    out.push_back({"k_pc >= 10*k_pp", g.k_pc >= 10.0 * g.k_pp});
    out.push_back({"k_pc >= 10*k_pq", g.k_pc >= 10.0 * g.k_pq});
    out.push_back({"k_ic >= 10*k_pc", g.k_ic >= 10.0 * g.k_pc});
    return out;
}

SweepPlan sample_plan(const GainGrid& grid, std::size_t n, std::uint64_t seed) {
    if (n > grid.size()) {
        throw ConfigError("requested " + std::to_string(n) + " samples from a grid of " +
                          std::to_string(grid.size()));
    }
    // Partial Fisher-Yates over the index array: uniform without replacement.
    std::vector<std::uint32_t> order(grid.size());
    std::iota(order.begin(), order.end(), 0u);
    SplitMix64 rng(seed);
    SweepPlan plan;
    plan.seed = seed;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = i + rng.bounded(grid.size() - i);
        std::swap(order[i], order[j]);
        plan.samples.push_back({static_cast<int>(order[i]), grid.admissible[order[i]]});
    }
    for (int c = 1; c <= 4; ++c) {
        for (const double scale : {0.4, 1.0}) {
            OperatingCondition cond = standard_condition(c);
            cond.load_scale = scale;
            plan.conditions.push_back(cond);
        }
    }
    plan.line_models = {LineModel::StatPi, LineModel::DynPi, LineModel::Mssb};
    return plan;
}

std::string summary_key(const std::string& case_name, double load_scale,
                        const std::string& model) {
    std::ostringstream oss;
    oss << case_name << "|" << load_scale << "|" << model;
    return oss.str();
}

SweepResultRow run_cell(const SweepSample& sample, const OperatingCondition& condition,
                        LineModel model, int segments, const NetworkCase& base_template,
                        const NumericPolicy& policy) {
    SweepResultRow row;
    row.sample_id = sample.id;
    row.case_name = condition.case_name;
    row.load_scale = condition.load_scale;
    row.line_model = line_model_name(model);
    const auto t0 = std::chrono::steady_clock::now();
    try {
        const NetworkCase cse = build_wscc9(condition.load_scale, condition, base_template);
        const DaeSystem sys = assemble(cse, model, sample.gains, segments, policy);
        const EquilibriumResult er = find_equilibrium(sys, policy);
        if (!er.converged()) {
            row.equilibrium_status = equilibrium_status_name(er.status);
        } else {
            const StabilityVerdict v = eigensolve(linearize(sys, er.eq, policy), policy);
            row.equilibrium_status = "converged";
            row.max_real = v.max_real;
            row.stable = v.stable;
            if (!v.dominant.empty()) {
                row.top_participant = v.dominant.front().state;
                row.top_participation = v.dominant.front().factor;
            }
        }
    } catch (const Error&) {
        row.equilibrium_status = "error";
    }
    row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                      .count();
    return row;
}

BoxplotStats boxplot_stats(std::vector<double> values, std::size_t failures) {
    BoxplotStats s;
    s.failures = failures;
    s.count = values.size();
    if (values.empty()) return s;
    std::sort(values.begin(), values.end());
    auto quantile = [&](double q) {
        const double pos = q * (values.size() - 1);
        const std::size_t lo = static_cast<std::size_t>(pos);
        const std::size_t hi = std::min(lo + 1, values.size() - 1);
        const double frac = pos - static_cast<double>(lo);
        return values[lo] * (1.0 - frac) + values[hi] * frac;
    };
    s.min = values.front();
    s.q1 = quantile(0.25);
    s.median = quantile(0.5);
    s.q3 = quantile(0.75);
    s.max = values.back();
    return s;
}

SweepResults run_sweep(const SweepPlan& plan, const NetworkCase& base_template, int workers,
                       const NumericPolicy& policy) {
    struct Cell {
        std::size_t sample;
        std::size_t condition;
        std::size_t model;
    };
    std::vector<Cell> cells;
    for (std::size_t s = 0; s < plan.samples.size(); ++s) {
        for (std::size_t c = 0; c < plan.conditions.size(); ++c) {
            for (std::size_t m = 0; m < plan.line_models.size(); ++m) cells.push_back({s, c, m});
        }
    }

    SweepResults results;
    results.plan = plan;
    results.rows.resize(cells.size());

    std::atomic<std::size_t> next{0};
    auto worker_fn = [&]() {
        for (;;) {
            const std::size_t k = next.fetch_add(1);
            if (k >= cells.size()) return;
            const Cell& cell = cells[k];
            results.rows[k] =
                run_cell(plan.samples[cell.sample], plan.conditions[cell.condition],
                         plan.line_models[cell.model], plan.segments, base_template, policy);
        }
    };

    workers = std::max(1, workers);
    if (workers == 1) {
        worker_fn();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker_fn);
        for (auto& t : pool) t.join();
    }

    // Canonical order regardless of scheduling.
    std::sort(results.rows.begin(), results.rows.end(),
              [](const SweepResultRow& a, const SweepResultRow& b) {
                  return std::tie(a.sample_id, a.case_name, a.load_scale, a.line_model) <
                         std::tie(b.sample_id, b.case_name, b.load_scale, b.line_model);
              });

    for (const auto& cond : plan.conditions) {
        for (const auto model : plan.line_models) {
            const std::string key =
                summary_key(cond.case_name, cond.load_scale, line_model_name(model));
            std::vector<double> vals;
            std::size_t failures = 0;
            for (const auto& row : results.rows) {
                if (row.case_name != cond.case_name || row.load_scale != cond.load_scale ||
                    row.line_model != line_model_name(model)) {
                    continue;
                }
                if (row.usable()) {
                    vals.push_back(row.max_real);
                } else {
                    ++failures;
                }
            }
            results.summaries[key] = boxplot_stats(std::move(vals), failures);
        }
    }
    return results;
}

double spearman_rho(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size() || a.size() < 2) {
        throw ConfigError("spearman_rho needs two equally sized series of length >= 2");
    }
    auto ranks = [](const std::vector<double>& v) {
        const std::size_t n = v.size();
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0u);
        std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
            return v[i] < v[j];
        });
        std::vector<double> r(n);
        std::size_t i = 0;
        while (i < n) {
            std::size_t j = i;
            while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
            const double avg = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
            for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
            i = j + 1;
        }
        return r;
    };
    const std::vector<double> ra = ranks(a), rb = ranks(b);
    const double n = static_cast<double>(a.size());
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += ra[i];
        mb += rb[i];
    }
    ma /= n;
    mb /= n;
    double num = 0.0, va = 0.0, vb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += (ra[i] - ma) * (rb[i] - mb);
        va += (ra[i] - ma) * (ra[i] - ma);
        vb += (rb[i] - mb) * (rb[i] - mb);
    }
    if (va == 0.0 || vb == 0.0) return 0.0;
    return num / std::sqrt(va * vb);
}

std::vector<CorrelationCell> correlate_gain(const SweepResults& results,
                                            const std::string& gain_name) {
    std::map<int, const GfmGains*> gains_by_id;
    for (const auto& s : results.plan.samples) gains_by_id[s.id] = &s.gains;

    std::vector<CorrelationCell> out;
    for (const auto& cond : results.plan.conditions) {
        for (const auto model : results.plan.line_models) {
            CorrelationCell cell;
            cell.key = summary_key(cond.case_name, cond.load_scale, line_model_name(model));
            std::vector<double> g, mr;
            for (const auto& row : results.rows) {
                if (row.case_name != cond.case_name || row.load_scale != cond.load_scale ||
                    row.line_model != line_model_name(model) || !row.usable()) {
                    continue;
                }
                g.push_back(gfm_gain_value(*gains_by_id.at(row.sample_id), gain_name));
                mr.push_back(row.max_real);
            }
            cell.count = g.size();
            cell.sufficient = cell.count >= 30;
            if (cell.count >= 2) cell.rho = spearman_rho(g, mr);
            out.push_back(cell);
        }
    }
    return out;
}

}  // namespace gridss
