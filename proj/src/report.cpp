#include "gridss/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

#include "gridss/errors.hpp"
#include "gridss/line_models.hpp"

namespace gridss {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string results_csv(const SweepResults& results) {
    std::ostringstream oss;
    oss << "sample_id,case_name,load_scale,line_model,max_real,stable,equilibrium_status,"
           "top_participant,top_participation,wall_ms\n";
    for (const auto& r : results.rows) {
        oss << r.sample_id << ',' << r.case_name << ',' << format_double(r.load_scale) << ','
            << r.line_model << ',' << (r.usable() ? format_double(r.max_real) : "") << ','
            << (r.usable() ? (r.stable ? "true" : "false") : "") << ',' << r.equilibrium_status
            << ',' << r.top_participant << ','
            << (r.usable() ? format_double(r.top_participation) : "") << ','
            << format_double(r.wall_ms) << '\n';
    }
    return oss.str();
}

SweepResults parse_results_csv(const std::string& text) {
    SweepResults out;
    std::istringstream iss(text);
    std::string line;
    if (!std::getline(iss, line)) throw IoError("results CSV is empty");
    while (std::getline(iss, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cols;
        std::stringstream ls(line);
        std::string col;
        while (std::getline(ls, col, ',')) cols.push_back(col);
        cols.resize(10);
        SweepResultRow r;
        r.sample_id = std::stoi(cols[0]);
        r.case_name = cols[1];
        r.load_scale = std::stod(cols[2]);
        r.line_model = cols[3];
        r.equilibrium_status = cols[6];
        if (r.usable()) {
            r.max_real = std::stod(cols[4]);
            r.stable = cols[5] == "true";
            r.top_participant = cols[7];
            if (!cols[8].empty()) r.top_participation = std::stod(cols[8]);
        }
        if (!cols[9].empty()) r.wall_ms = std::stod(cols[9]);
        out.rows.push_back(std::move(r));
    }
    return out;
}

std::string summary_json(const SweepResults& results, const NumericPolicy& policy) {
    nlohmann::json j;
    j["seed"] = results.plan.seed;
    j["samples"] = results.plan.samples.size();
    j["segments"] = results.plan.segments;
    j["policy"] = {
        {"powerflow_tol", policy.powerflow_tol},
        {"newton_tol", policy.newton_tol},
        {"newton_max_iter", policy.newton_max_iter},
        {"fd_step", policy.fd_step},
        {"gy_condition_limit", policy.gy_condition_limit},
        {"zero_eig_flag", policy.zero_eig_flag},
    };
    nlohmann::json cells = nlohmann::json::object();
    for (const auto& [key, s] : results.summaries) {
        cells[key] = {{"count", s.count}, {"failures", s.failures}, {"min", s.min},
                      {"q1", s.q1},       {"median", s.median},     {"q3", s.q3},
                      {"max", s.max}};
    }
    j["cells"] = cells;
    return j.dump(2);
}

std::string eigs_csv(int sample_id, const std::string& line_model,
                     const StabilityVerdict& verdict) {
    std::ostringstream oss;
    oss << "sample_id,line_model,re,im,top_participant_state,participation\n";
    for (std::size_t i = 0; i < verdict.eigenvalues.size(); ++i) {
        const auto top = verdict.top_participants(static_cast<int>(i), 1);
        oss << sample_id << ',' << line_model << ',' << format_double(verdict.eigenvalues[i].real())
            << ',' << format_double(verdict.eigenvalues[i].imag()) << ','
            << (top.empty() ? "" : top.front().state) << ','
            << (top.empty() ? "" : format_double(top.front().factor)) << '\n';
    }
    return oss.str();
}

std::string freqresp_csv(const BranchSpec& branch, const std::vector<LineModel>& models,
                         int segments, double f_min_hz, double f_max_hz, int points,
                         double f_base_hz) {
    if (points < 2 || f_min_hz <= 0.0 || f_max_hz <= f_min_hz) {
        throw ConfigError("frequency response needs points >= 2 and 0 < f_min < f_max");
    }
    std::ostringstream oss;
    oss << "f_hz,model,zin_abs,zin_arg\n";
    for (int k = 0; k < points; ++k) {
        const double f = f_min_hz * std::pow(f_max_hz / f_min_hz,
                                             static_cast<double>(k) / (points - 1));
        const double omega_pu = f / f_base_hz;
        for (const auto model : models) {
            const LineRealization line = realize_branch(branch, model, segments);
            const Cplx z = open_circuit_impedance(line, omega_pu);
            oss << format_double(f) << ',' << line_model_name(model) << ','
                << format_double(std::abs(z)) << ',' << format_double(std::arg(z)) << '\n';
        }
        if (branch.c_km > 0.0) {
            const Cplx z = telegrapher_open_circuit_impedance(branch, omega_pu);
            oss << format_double(f) << ",exact," << format_double(std::abs(z)) << ','
                << format_double(std::arg(z)) << '\n';
        }
    }
    return oss.str();
}

namespace {

struct SvgCanvas {
    std::ostringstream body;
    double width, height;

    SvgCanvas(double w, double h) : width(w), height(h) {}

    void line(double x1, double y1, double x2, double y2, const char* stroke,
              double stroke_width = 1.0) {
        body << "<line x1='" << x1 << "' y1='" << y1 << "' x2='" << x2 << "' y2='" << y2
             << "' stroke='" << stroke << "' stroke-width='" << stroke_width << "'/>\n";
    }
    void rect(double x, double y, double w, double h, const char* fill, const char* stroke) {
        body << "<rect x='" << x << "' y='" << y << "' width='" << w << "' height='" << h
             << "' fill='" << fill << "' stroke='" << stroke << "'/>\n";
    }
    void circle(double cx, double cy, double r, const char* fill) {
        body << "<circle cx='" << cx << "' cy='" << cy << "' r='" << r << "' fill='" << fill
             << "'/>\n";
    }
    void text(double x, double y, const std::string& s, int size = 11,
              const char* anchor = "middle") {
        body << "<text x='" << x << "' y='" << y << "' font-size='" << size
             << "' font-family='sans-serif' text-anchor='" << anchor << "'>" << s << "</text>\n";
    }
    std::string str() const {
        std::ostringstream oss;
        oss << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width << "' height='"
            << height << "' viewBox='0 0 " << width << " " << height << "'>\n"
            << "<rect width='100%' height='100%' fill='white'/>\n"
            << body.str() << "</svg>\n";
        return oss.str();
    }
};

const char* model_color(const std::string& model) {
    if (model == "statpi") return "#c0392b";
    if (model == "dynpi") return "#2980b9";
    if (model == "mssb") return "#27ae60";
    return "#7f8c8d";
}

}  // namespace

std::string boxplot_svg(const SweepResults& results) {
    // Group keys in plan order so columns follow case/load enumeration.
    std::vector<std::string> group_keys;
    std::vector<std::pair<std::string, BoxplotStats>> boxes;
    for (const auto& cond : results.plan.conditions) {
        for (const auto model : results.plan.line_models) {
            const std::string key =
                summary_key(cond.case_name, cond.load_scale, line_model_name(model));
            const auto it = results.summaries.find(key);
            if (it != results.summaries.end() && it->second.count > 0) {
                boxes.emplace_back(key, it->second);
            }
        }
    }
    if (boxes.empty()) {
        return SvgCanvas(300, 100).str();
    }

    double lo = boxes.front().second.min, hi = boxes.front().second.max;
    for (const auto& [k, s] : boxes) {
        lo = std::min(lo, s.min);
        hi = std::max(hi, s.max);
    }
    const double pad = 0.05 * std::max(1e-6, hi - lo);
    lo -= pad;
    hi += pad;

    const double margin_l = 70, margin_b = 80, margin_t = 20, margin_r = 20;
    const double slot = 34;
    SvgCanvas svg(margin_l + margin_r + slot * boxes.size(), 360);
    const double plot_h = svg.height - margin_t - margin_b;
    auto ymap = [&](double v) { return margin_t + plot_h * (hi - v) / (hi - lo); };

    svg.line(margin_l, margin_t, margin_l, margin_t + plot_h, "black");
    svg.line(margin_l, ymap(0.0), svg.width - margin_r, ymap(0.0), "#bbbbbb");
    svg.text(margin_l - 6, ymap(0.0) + 4, "0", 10, "end");
    svg.text(margin_l - 40, margin_t + plot_h / 2, "max Re(lambda)", 11, "middle");
    for (int t = 0; t <= 4; ++t) {
        const double v = lo + (hi - lo) * t / 4.0;
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.3g", v);
        svg.line(margin_l - 4, ymap(v), margin_l, ymap(v), "black");
        svg.text(margin_l - 6, ymap(v) + 4, buf, 10, "end");
    }

    double x = margin_l + slot / 2;
    for (const auto& [key, s] : boxes) {
        const std::string model = key.substr(key.rfind('|') + 1);
        const char* color = model_color(model);
        const double bw = 18;
        svg.line(x, ymap(s.min), x, ymap(s.q1), color);
        svg.line(x, ymap(s.q3), x, ymap(s.max), color);
        svg.rect(x - bw / 2, ymap(s.q3), bw, std::max(1.0, ymap(s.q1) - ymap(s.q3)), "none",
                 color);
        svg.line(x - bw / 2, ymap(s.median), x + bw / 2, ymap(s.median), color, 2.0);
        svg.body << "<text x='" << x << "' y='" << svg.height - margin_b + 12
                 << "' font-size='9' font-family='sans-serif' text-anchor='end' transform='rotate(-60 "
                 << x << " " << svg.height - margin_b + 12 << ")'>" << key << "</text>\n";
        x += slot;
    }
    return svg.str();
}

std::string eig_scatter_svg(const std::vector<EigScatterSeries>& series) {
    double re_lo = -1.0, re_hi = 0.1, im_lo = -1.0, im_hi = 1.0;
    bool first = true;
    for (const auto& s : series) {
        for (const auto& e : s.eigenvalues) {
            if (first) {
                re_lo = re_hi = e.real();
                im_lo = im_hi = e.imag();
                first = false;
            }
            re_lo = std::min(re_lo, e.real());
            re_hi = std::max(re_hi, e.real());
            im_lo = std::min(im_lo, e.imag());
            im_hi = std::max(im_hi, e.imag());
        }
    }
    const double re_pad = 0.05 * std::max(1e-6, re_hi - re_lo);
    const double im_pad = 0.05 * std::max(1e-6, im_hi - im_lo);
    re_lo -= re_pad;
    re_hi += re_pad;
    im_lo -= im_pad;
    im_hi += im_pad;

    SvgCanvas svg(560, 420);
    const double ml = 60, mr = 20, mt = 20, mb = 50;
    auto xmap = [&](double re) { return ml + (svg.width - ml - mr) * (re - re_lo) / (re_hi - re_lo); };
    auto ymap = [&](double im) { return mt + (svg.height - mt - mb) * (im_hi - im) / (im_hi - im_lo); };

    svg.line(ml, mt, ml, svg.height - mb, "black");
    svg.line(ml, svg.height - mb, svg.width - mr, svg.height - mb, "black");
    if (re_lo < 0.0 && re_hi > 0.0) {
        svg.line(xmap(0.0), mt, xmap(0.0), svg.height - mb, "#999999");
    }
    svg.text((ml + svg.width - mr) / 2, svg.height - 12, "Re(lambda) [1/s]");
    svg.text(16, (mt + svg.height - mb) / 2, "Im", 11);

    double legend_y = mt + 12;
    for (const auto& s : series) {
        const char* color = model_color(s.line_model);
        for (const auto& e : s.eigenvalues) {
            svg.circle(xmap(e.real()), ymap(e.imag()), 3.0, color);
        }
        svg.circle(svg.width - mr - 90, legend_y - 4, 4.0, color);
        svg.text(svg.width - mr - 80, legend_y, s.line_model, 11, "start");
        legend_y += 16;
    }
    return svg.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << content;
    if (!out) throw IoError("failed writing '" + path + "'");
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read '" + path + "'");
    std::ostringstream oss;
    oss << in.rdbuf();
    return oss.str();
}

}  // namespace gridss
