#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "gridss/dae.hpp"
#include "gridss/errors.hpp"
#include "gridss/report.hpp"
#include "gridss/smallsignal.hpp"
#include "gridss/sweep.hpp"

namespace fs = std::filesystem;
using namespace gridss;

namespace {

struct CommonOpts {
    int case_number = 2;
    double load_scale = 0.4;
    std::string line_model = "statpi";
    int segments = 5;
    std::string config;
    std::string out_dir = ".";
};

NetworkCase load_template(const CommonOpts& opts) {
    return opts.config.empty() ? default_case_template() : load_case_file(opts.config);
}

void ensure_out_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());
}

GfmGains gains_from_overrides(GfmGains g, const std::vector<std::string>& overrides) {
    for (const auto& kv : overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw ConfigError("bad --gain '" + kv + "', use name=value");
        const std::string name = kv.substr(0, eq);
        const double value = std::stod(kv.substr(eq + 1));
        if (name == "t_a") g.t_a = value;
        else if (name == "k_d") g.k_d = value;
        else if (name == "k_q") g.k_q = value;
        else if (name == "k_pv") g.k_pv = value;
        else if (name == "k_iv") g.k_iv = value;
        else if (name == "k_pc") g.k_pc = value;
        else if (name == "k_ic") g.k_ic = value;
        else throw ConfigError("unknown gain '" + name + "'");
    }
    return g;
}

int cmd_analyze(const CommonOpts& opts, std::uint64_t seed, int samples, int sample_id,
                const std::vector<std::string>& gain_overrides, double ratio_rule) {
    const NetworkCase tmpl = load_template(opts);
    OperatingCondition cond = standard_condition(opts.case_number);
    cond.load_scale = opts.load_scale;

    GfmGains gains = tmpl.gfm.gains;
    int id = 0;
    if (sample_id >= 0) {
        const GainGrid grid = default_grid(ratio_rule);
        const SweepPlan plan = sample_plan(grid, samples, seed);
        if (sample_id >= static_cast<int>(plan.samples.size())) {
            throw ConfigError("--sample-id beyond the sampled plan");
        }
        gains = plan.samples[sample_id].gains;
        id = plan.samples[sample_id].id;
    }
    gains = gains_from_overrides(gains, gain_overrides);

    const NetworkCase cse = build_wscc9(opts.load_scale, cond, tmpl);
    const LineModel model = line_model_from_name(opts.line_model);
    const DaeSystem sys = assemble(cse, model, gains, opts.segments);
    std::cout << "states: " << sys.n << " dynamic, " << sys.m << " algebraic\n";
    std::cout << "power flow: " << sys.powerflow.iterations
              << " iterations, mismatch " << sys.powerflow.mismatch << " pu, slack p "
              << sys.powerflow.slack_p << " pu, losses " << sys.powerflow.losses_p << " pu\n";

    const EquilibriumResult er = find_equilibrium(sys);
    if (!er.converged()) {
        std::cout << "equilibrium: " << equilibrium_status_name(er.status) << " (residual "
                  << er.final_residual << " after " << er.iterations << " steps)\n";
        return 1;
    }
    std::cout << "equilibrium: converged, residual " << er.eq.residual_norm << " in "
              << er.eq.newton_steps << " Newton steps\n";

    const ReducedJacobian jac = linearize(sys, er.eq);
    const StabilityVerdict v = eigensolve(jac);
    std::cout << "g_y condition: " << jac.gy_condition << "\n";
    std::cout << "max Re(lambda) = " << format_double(v.max_real) << "  ("
              << (v.stable ? "stable" : "UNSTABLE") << ")\n";
    if (v.near_zero_eigenvalue) {
        std::cout << "note: eigenvalue with |lambda| < 1e-8 present\n";
    }
    std::cout << "least stable mode participants:\n";
    for (const auto& p : v.dominant) {
        std::cout << "  " << p.state << "  " << p.factor << "\n";
    }

    ensure_out_dir(opts.out_dir);
    const std::string path =
        (fs::path(opts.out_dir) / ("eigs_" + std::to_string(id) + ".csv")).string();
    write_text_file(path, eigs_csv(id, opts.line_model, v));
    std::cout << "wrote " << path << "\n";
    return 0;
}

int cmd_sweep(const CommonOpts& opts, std::uint64_t seed, int samples, int workers,
              bool all_conditions, bool all_models, double ratio_rule) {
    const NetworkCase tmpl = load_template(opts);
    const GainGrid grid = default_grid(ratio_rule);
    std::cout << "admissible gain combinations: " << grid.size() << "\n";
    for (const auto& diag : check_gfl_rules(tmpl.gfl.gains)) {
        std::cout << "gfl rule " << diag.rule << ": " << (diag.pass ? "pass" : "FAIL") << "\n";
    }

    SweepPlan plan = sample_plan(grid, samples, seed);
    plan.segments = opts.segments;
    if (!all_conditions) {
        OperatingCondition cond = standard_condition(opts.case_number);
        cond.load_scale = opts.load_scale;
        plan.conditions = {cond};
    }
    if (!all_models) {
        plan.line_models = {line_model_from_name(opts.line_model)};
    }

    const SweepResults results = run_sweep(plan, tmpl, workers);
    ensure_out_dir(opts.out_dir);
    const auto out = [&](const std::string& name) {
        return (fs::path(opts.out_dir) / name).string();
    };
    write_text_file(out("results.csv"), results_csv(results));
    write_text_file(out("summary.json"), summary_json(results, default_policy()));
    write_text_file(out("boxplot.svg"), boxplot_svg(results));
    std::cout << "wrote " << out("results.csv") << ", summary.json, boxplot.svg\n";

    for (const char* gain : {"k_q", "k_d", "t_a"}) {
        for (const auto& cell : correlate_gain(results, gain)) {
            if (cell.count == 0) continue;
            std::cout << "spearman(" << gain << ", max_real) @ " << cell.key << " = " << cell.rho
                      << " (n=" << cell.count << (cell.sufficient ? "" : ", low") << ")\n";
        }
    }
    return 0;
}

int cmd_freqresp(const CommonOpts& opts, const std::string& branch_name, double f_min,
                 double f_max, int points) {
    const NetworkCase tmpl = load_template(opts);
    const auto dash = branch_name.find('-');
    if (dash == std::string::npos) {
        throw ConfigError("--branch expects 'from-to', e.g. 4-5");
    }
    const int from = std::stoi(branch_name.substr(0, dash));
    const int to = std::stoi(branch_name.substr(dash + 1));
    const BranchSpec* found = nullptr;
    for (const auto& br : tmpl.branches) {
        if (br.from_bus == from && br.to_bus == to) found = &br;
    }
    if (!found) throw ConfigError("no branch " + branch_name + " in the case");

    ensure_out_dir(opts.out_dir);
    const std::string path =
        (fs::path(opts.out_dir) / ("freqresp_" + branch_name + ".csv")).string();
    write_text_file(path, freqresp_csv(*found,
                                       {LineModel::StatPi, LineModel::DynPi, LineModel::Mssb},
                                       opts.segments, f_min, f_max, points, tmpl.base.f_hz));
    std::cout << "wrote " << path << "\n";
    return 0;
}

int cmd_plot(const CommonOpts& opts) {
    const fs::path dir(opts.out_dir);
    const fs::path results_path = dir / "results.csv";
    if (!fs::exists(results_path)) throw IoError("no results.csv in '" + opts.out_dir + "'");
    SweepResults results = parse_results_csv(read_text_file(results_path.string()));

    // Rebuild grouping metadata from the rows themselves.
    std::map<std::string, std::vector<double>> groups;
    std::map<std::string, std::size_t> failures;
    for (const auto& r : results.rows) {
        const std::string key = summary_key(r.case_name, r.load_scale, r.line_model);
        if (r.usable()) {
            groups[key].push_back(r.max_real);
        } else {
            ++failures[key];
        }
        OperatingCondition cond{r.case_name, 0.0, 0.0, r.load_scale};
        bool seen = false;
        for (const auto& c : results.plan.conditions) {
            if (c.case_name == cond.case_name && c.load_scale == cond.load_scale) seen = true;
        }
        if (!seen) results.plan.conditions.push_back(cond);
        const LineModel model = line_model_from_name(r.line_model);
        if (std::find(results.plan.line_models.begin(), results.plan.line_models.end(), model) ==
            results.plan.line_models.end()) {
            results.plan.line_models.push_back(model);
        }
    }
    for (const auto& [key, vals] : groups) {
        results.summaries[key] = boxplot_stats(vals, failures[key]);
    }
    write_text_file((dir / "boxplot.svg").string(), boxplot_svg(results));
    std::cout << "wrote " << (dir / "boxplot.svg").string() << "\n";

    std::vector<EigScatterSeries> series;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        if (name.rfind("eigs_", 0) != 0 || entry.path().extension() != ".csv") continue;
        std::istringstream iss(read_text_file(entry.path().string()));
        std::string line;
        std::getline(iss, line);
        std::map<std::string, EigScatterSeries> by_model;
        while (std::getline(iss, line)) {
            std::stringstream ls(line);
            std::string col;
            std::vector<std::string> cols;
            while (std::getline(ls, col, ',')) cols.push_back(col);
            if (cols.size() < 4) continue;
            auto& s = by_model[cols[1]];
            s.line_model = cols[1];
            s.eigenvalues.emplace_back(std::stod(cols[2]), std::stod(cols[3]));
        }
        for (auto& [k, s] : by_model) series.push_back(std::move(s));
    }
    if (!series.empty()) {
        write_text_file((dir / "eigs.svg").string(), eig_scatter_svg(series));
        std::cout << "wrote " << (dir / "eigs.svg").string() << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Small-signal stability engine for inverter-dominated grids"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::uint64_t seed = 42;
    int samples = 1000;
    int sample_id = -1;
    int workers = 1;
    bool all_conditions = false;
    bool all_models = false;
    double ratio_rule = 1.0;
    std::vector<std::string> gain_overrides;
    std::string branch_name = "4-5";
    double f_min = 1.0, f_max = 1000.0;
    int points = 200;

    auto add_common = [&](CLI::App* cmd, bool with_model = true) {
        cmd->add_option("--case", opts.case_number, "Operating case 1..4")
            ->check(CLI::Range(1, 4));
        cmd->add_option("--load-scale", opts.load_scale, "Multiplier on base loads");
        if (with_model) {
            cmd->add_option("--line-model", opts.line_model, "statpi|dynpi|mssb");
        }
        cmd->add_option("--segments", opts.segments, "Segment count for mssb")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--config", opts.config, "Case JSON path (default: built-in 9-bus)");
        cmd->add_option("--out", opts.out_dir, "Output directory");
    };

    CLI::App* analyze = app.add_subcommand("analyze", "Single-cell stability analysis");
    add_common(analyze);
    analyze->add_option("--seed", seed, "Plan seed for --sample-id lookups");
    analyze->add_option("--samples", samples, "Plan size for --sample-id lookups");
    analyze->add_option("--sample-id", sample_id, "Re-run one sampled gain set (plan position)");
    analyze->add_option("--gain", gain_overrides, "Override a gain, name=value (repeatable)");
    analyze->add_option("--ratio-rule", ratio_rule, "k_pc vs k_pv ratio rule (10 = strict)");

    CLI::App* sweep = app.add_subcommand("sweep", "Randomized gain sweep");
    add_common(sweep);
    sweep->add_option("--seed", seed, "RNG seed");
    sweep->add_option("--samples", samples, "Sample count")->check(CLI::PositiveNumber);
    sweep->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
    sweep->add_flag("--all-conditions", all_conditions, "All 4 cases x {0.4, 1.0}");
    sweep->add_flag("--all-models", all_models, "statpi, dynpi and mssb");
    sweep->add_option("--ratio-rule", ratio_rule, "k_pc vs k_pv ratio rule (10 = strict)");

    CLI::App* freqresp = app.add_subcommand("freqresp", "Line input-impedance tables");
    add_common(freqresp, /*with_model=*/false);
    freqresp->add_option("--branch", branch_name, "Branch as from-to, e.g. 4-5");
    freqresp->add_option("--fmin", f_min, "Lowest frequency, Hz");
    freqresp->add_option("--fmax", f_max, "Highest frequency, Hz");
    freqresp->add_option("--points", points, "Frequency points");

    CLI::App* plot = app.add_subcommand("plot", "Render SVG plots from an output directory");
    plot->add_option("--out", opts.out_dir, "Directory holding results.csv / eigs_*.csv");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(analyze)) {
            return cmd_analyze(opts, seed, samples, sample_id, gain_overrides, ratio_rule);
        }
        if (app.got_subcommand(sweep)) {
            return cmd_sweep(opts, seed, samples, workers, all_conditions, all_models,
                             ratio_rule);
        }
        if (app.got_subcommand(freqresp)) {
            return cmd_freqresp(opts, branch_name, f_min, f_max, points);
        }
        if (app.got_subcommand(plot)) {
            return cmd_plot(opts);
        }
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
