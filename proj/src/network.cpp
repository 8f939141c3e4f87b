#include "gridss/network.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

#include "gridss/default_case_json.hpp"
#include "gridss/errors.hpp"

namespace gridss {

using nlohmann::json;

double PerUnitBase::omega_b() const { return 2.0 * std::numbers::pi * f_hz; }

void PerUnitBase::validate() const {
    if (s_base_mva <= 0.0 || v_base_kv <= 0.0 || f_hz <= 0.0) {
        throw ConfigError("per-unit base values must be strictly positive");
    }
}

void BranchSpec::validate() const {
    if (r_km < 0.0) throw ConfigError("branch r_km must be >= 0");
    if (l_km <= 0.0) throw ConfigError("branch l_km must be > 0");
    if (c_km < 0.0) throw ConfigError("branch c_km must be >= 0");
    if (length_km <= 0.0) throw ConfigError("branch length_km must be > 0");
}

void OperatingCondition::validate() const {
    if (eta_gfm < 0.0 || eta_gfl < 0.0) {
        throw ConfigError("generation shares must be non-negative");
    }
    if (eta_gfm + eta_gfl > 1.0 + 1e-12) {
        throw ConfigError("eta_gfm + eta_gfl exceeds 1: nothing left for the slack machine");
    }
    if (load_scale <= 0.0) throw ConfigError("load_scale must be > 0");
}

OperatingCondition standard_condition(int case_number) {
    switch (case_number) {
        case 1: return {"case1", 0.56, 0.14, 1.0};
        case 2: return {"case2", 0.28, 0.42, 1.0};
        case 3: return {"case3", 0.72, 0.18, 1.0};
        case 4: return {"case4", 0.36, 0.54, 1.0};
        default: throw ConfigError("case number must be 1..4");
    }
}

const Bus& NetworkCase::bus(int id) const {
    for (const auto& b : buses) {
        if (b.id == id) return b;
    }
    throw ConfigError("unknown bus id " + std::to_string(id));
}

int NetworkCase::bus_index(int id) const {
    for (std::size_t i = 0; i < buses.size(); ++i) {
        if (buses[i].id == id) return static_cast<int>(i);
    }
    throw ConfigError("unknown bus id " + std::to_string(id));
}

double NetworkCase::total_load_p() const {
    double total = 0.0;
    for (const auto& b : buses) total += b.load_p;
    return total;
}

void NetworkCase::validate() const {
    base.validate();
    int references = 0;
    for (const auto& b : buses) {
        if (b.kind == BusKind::Reference) ++references;
        if (b.load_p < 0.0 || b.load_q < 0.0) {
            throw ConfigError("bus " + std::to_string(b.id) + " has negative load");
        }
    }
    if (references != 1) throw ConfigError("exactly one reference bus required");
    for (const auto& br : branches) {
        br.validate();
        bus(br.from_bus);
        bus(br.to_bus);
    }
    bus(machine.bus);
    bus(gfm.bus);
    bus(gfl.bus);
    condition.validate();
}

namespace {

BusKind bus_kind_from_name(const std::string& s) {
    if (s == "reference") return BusKind::Reference;
    if (s == "pv") return BusKind::Pv;
    if (s == "pq") return BusKind::Pq;
    throw ConfigError("unknown bus kind '" + s + "'");
}

const char* bus_kind_name(BusKind k) {
    switch (k) {
        case BusKind::Reference: return "reference";
        case BusKind::Pv: return "pv";
        case BusKind::Pq: return "pq";
    }
    return "pq";
}

double num(const json& j, const char* key) {
    if (!j.contains(key)) throw ConfigError(std::string("missing numeric field '") + key + "'");
    return j.at(key).get<double>();
}

double num_or(const json& j, const char* key, double fallback) {
    return j.contains(key) ? j.at(key).get<double>() : fallback;
}

MachineParams machine_params_from_json(const json& j) {
    MachineParams p;
    p.r_a = num_or(j, "r_a", p.r_a);
    p.x_d = num(j, "x_d");
    p.x_q = num(j, "x_q");
    p.x_d_p = num(j, "x_d_p");
    p.x_q_p = num(j, "x_q_p");
    p.x_d_pp = num(j, "x_d_pp");
    p.x_q_pp = num(j, "x_q_pp");
    p.t_d0_p = num(j, "t_d0_p");
    p.t_q0_p = num(j, "t_q0_p");
    p.t_d0_pp = num(j, "t_d0_pp");
    p.t_q0_pp = num(j, "t_q0_pp");
    p.h = num(j, "h");
    p.d = num(j, "d");
    return p;
}

json machine_params_to_json(const MachineParams& p) {
    return json{{"r_a", p.r_a},       {"x_d", p.x_d},         {"x_q", p.x_q},
                {"x_d_p", p.x_d_p},   {"x_q_p", p.x_q_p},     {"x_d_pp", p.x_d_pp},
                {"x_q_pp", p.x_q_pp}, {"t_d0_p", p.t_d0_p},   {"t_q0_p", p.t_q0_p},
                {"t_d0_pp", p.t_d0_pp}, {"t_q0_pp", p.t_q0_pp}, {"h", p.h},
                {"d", p.d}};
}

AvrType1Params avr_from_json(const json& j) {
    AvrType1Params a;
    a.k_a = num(j, "k_a");
    a.t_a = num(j, "t_a");
    a.k_e = num(j, "k_e");
    a.t_e = num(j, "t_e");
    a.k_f = num(j, "k_f");
    a.t_f = num(j, "t_f");
    a.t_r = num(j, "t_r");
    a.a_e = num(j, "a_e");
    a.b_e = num(j, "b_e");
    return a;
}

json avr_to_json(const AvrType1Params& a) {
    return json{{"k_a", a.k_a}, {"t_a", a.t_a}, {"k_e", a.k_e}, {"t_e", a.t_e},
                {"k_f", a.k_f}, {"t_f", a.t_f}, {"t_r", a.t_r}, {"a_e", a.a_e},
                {"b_e", a.b_e}};
}

LclFilterParams filter_from_json(const json& j) {
    LclFilterParams f;
    f.l_f = num(j, "l_f");
    f.r_f = num(j, "r_f");
    f.c_f = num(j, "c_f");
    f.l_g = num(j, "l_g");
    f.r_g = num(j, "r_g");
    return f;
}

json filter_to_json(const LclFilterParams& f) {
    return json{{"l_f", f.l_f}, {"r_f", f.r_f}, {"c_f", f.c_f}, {"l_g", f.l_g}, {"r_g", f.r_g}};
}

PllParams pll_from_json(const json& j) {
    PllParams p;
    p.omega_lp = num(j, "omega_lp");
    p.k_p = num(j, "k_p");
    p.k_i = num(j, "k_i");
    return p;
}

json pll_to_json(const PllParams& p) {
    return json{{"omega_lp", p.omega_lp}, {"k_p", p.k_p}, {"k_i", p.k_i}};
}

GfmGains gfm_gains_from_json(const json& j) {
    GfmGains g;
    g.t_a = num(j, "t_a");
    g.k_d = num(j, "k_d");
    g.k_q = num(j, "k_q");
    g.k_pv = num(j, "k_pv");
    g.k_iv = num(j, "k_iv");
    g.k_pc = num(j, "k_pc");
    g.k_ic = num(j, "k_ic");
    return g;
}

json gfm_gains_to_json(const GfmGains& g) {
    return json{{"t_a", g.t_a},   {"k_d", g.k_d},   {"k_q", g.k_q},  {"k_pv", g.k_pv},
                {"k_iv", g.k_iv}, {"k_pc", g.k_pc}, {"k_ic", g.k_ic}};
}

GflGains gfl_gains_from_json(const json& j) {
    GflGains g;
    g.k_pp = num(j, "k_pp");
    g.k_ip = num(j, "k_ip");
    g.k_pq = num(j, "k_pq");
    g.k_iq = num(j, "k_iq");
    g.k_pc = num(j, "k_pc");
    g.k_ic = num(j, "k_ic");
    return g;
}

json gfl_gains_to_json(const GflGains& g) {
    return json{{"k_pp", g.k_pp}, {"k_ip", g.k_ip}, {"k_pq", g.k_pq},
                {"k_iq", g.k_iq}, {"k_pc", g.k_pc}, {"k_ic", g.k_ic}};
}

}  // namespace

NetworkCase case_from_json(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("case JSON parse failure: ") + e.what());
    }
    try {
        NetworkCase c;
        c.name = j.value("name", "case");
        const auto& jb = j.at("base");
        c.base.s_base_mva = num(jb, "s_base_mva");
        c.base.v_base_kv = num_or(jb, "v_base_kv", 230.0);
        c.base.f_hz = num(jb, "f_hz");

        const std::string lm = j.value("load_model", "constant_impedance");
        if (lm == "constant_impedance") {
            c.load_model = LoadModel::ConstantImpedance;
        } else if (lm == "constant_power") {
            c.load_model = LoadModel::ConstantPower;
        } else {
            throw ConfigError("unknown load_model '" + lm + "'");
        }

        for (const auto& bj : j.at("buses")) {
            Bus b;
            b.id = bj.at("id").get<int>();
            b.kind = bus_kind_from_name(bj.at("kind").get<std::string>());
            b.voltage_setpoint = num_or(bj, "voltage_setpoint", 1.0);
            b.load_p = num_or(bj, "load_p", 0.0);
            b.load_q = num_or(bj, "load_q", 0.0);
            c.buses.push_back(b);
        }
        for (const auto& rj : j.at("branches")) {
            BranchSpec br;
            br.from_bus = rj.at("from").get<int>();
            br.to_bus = rj.at("to").get<int>();
            br.r_km = num(rj, "r_km");
            br.l_km = num(rj, "l_km");
            br.c_km = num(rj, "c_km");
            br.length_km = num(rj, "length_km");
            br.transformer = rj.value("transformer", false);
            c.branches.push_back(br);
        }

        const auto& mj = j.at("machine");
        c.machine.bus = mj.at("bus").get<int>();
        c.machine.params = machine_params_from_json(mj.at("params"));
        c.machine.avr = avr_from_json(mj.at("avr"));

        const auto& fj = j.at("gfm");
        c.gfm.bus = fj.at("bus").get<int>();
        c.gfm.filter = filter_from_json(fj.at("filter"));
        c.gfm.pll = pll_from_json(fj.at("pll"));
        c.gfm.fixed.omega_f = num(fj.at("fixed"), "omega_f");
        c.gfm.fixed.k_ffi = num_or(fj.at("fixed"), "k_ffi", 0.0);
        c.gfm.fixed.k_ffv = num_or(fj.at("fixed"), "k_ffv", 0.0);
        c.gfm.fixed.r_v = num_or(fj.at("fixed"), "r_v", 0.0);
        c.gfm.fixed.l_v = num_or(fj.at("fixed"), "l_v", 0.2);
        c.gfm.fixed.k_ad = num_or(fj.at("fixed"), "k_ad", 0.2);
        c.gfm.fixed.omega_ad = num_or(fj.at("fixed"), "omega_ad", 50.0);
        c.gfm.gains = gfm_gains_from_json(fj.at("gains"));

        const auto& lj = j.at("gfl");
        c.gfl.bus = lj.at("bus").get<int>();
        c.gfl.filter = filter_from_json(lj.at("filter"));
        c.gfl.pll = pll_from_json(lj.at("pll"));
        c.gfl.fixed.k_ffv = num_or(lj.at("fixed"), "k_ffv", 0.0);
        c.gfl.gains = gfl_gains_from_json(lj.at("gains"));

        if (j.contains("condition")) {
            const auto& cj = j.at("condition");
            c.condition.case_name = cj.value("case_name", "custom");
            c.condition.eta_gfm = num(cj, "eta_gfm");
            c.condition.eta_gfl = num(cj, "eta_gfl");
            c.condition.load_scale = num(cj, "load_scale");
            c.gfm_p_set = num_or(j, "gfm_p_set", 0.0);
            c.gfl_p_set = num_or(j, "gfl_p_set", 0.0);
            c.gfl_q_set = num_or(j, "gfl_q_set", 0.0);
        }
        return c;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("case JSON structure failure: ") + e.what());
    }
}

std::string case_to_json(const NetworkCase& c) {
    json j;
    j["name"] = c.name;
    j["base"] = json{{"s_base_mva", c.base.s_base_mva},
                     {"v_base_kv", c.base.v_base_kv},
                     {"f_hz", c.base.f_hz}};
    j["load_model"] = c.load_model == LoadModel::ConstantImpedance ? "constant_impedance"
                                                                   : "constant_power";
    j["buses"] = json::array();
    for (const auto& b : c.buses) {
        j["buses"].push_back(json{{"id", b.id},
                                  {"kind", bus_kind_name(b.kind)},
                                  {"voltage_setpoint", b.voltage_setpoint},
                                  {"load_p", b.load_p},
                                  {"load_q", b.load_q}});
    }
    j["branches"] = json::array();
    for (const auto& br : c.branches) {
        j["branches"].push_back(json{{"from", br.from_bus},
                                     {"to", br.to_bus},
                                     {"r_km", br.r_km},
                                     {"l_km", br.l_km},
                                     {"c_km", br.c_km},
                                     {"length_km", br.length_km},
                                     {"transformer", br.transformer}});
    }
    j["machine"] = json{{"bus", c.machine.bus},
                        {"params", machine_params_to_json(c.machine.params)},
                        {"avr", avr_to_json(c.machine.avr)}};
    j["gfm"] = json{{"bus", c.gfm.bus},
                    {"filter", filter_to_json(c.gfm.filter)},
                    {"pll", pll_to_json(c.gfm.pll)},
                    {"fixed", json{{"omega_f", c.gfm.fixed.omega_f},
                                   {"k_ffi", c.gfm.fixed.k_ffi},
                                   {"k_ffv", c.gfm.fixed.k_ffv},
                                   {"r_v", c.gfm.fixed.r_v},
                                   {"l_v", c.gfm.fixed.l_v},
                                   {"k_ad", c.gfm.fixed.k_ad},
                                   {"omega_ad", c.gfm.fixed.omega_ad}}},
                    {"gains", gfm_gains_to_json(c.gfm.gains)}};
    j["gfl"] = json{{"bus", c.gfl.bus},
                    {"filter", filter_to_json(c.gfl.filter)},
                    {"pll", pll_to_json(c.gfl.pll)},
                    {"fixed", json{{"k_ffv", c.gfl.fixed.k_ffv}}},
                    {"gains", gfl_gains_to_json(c.gfl.gains)}};
    j["condition"] = json{{"case_name", c.condition.case_name},
                          {"eta_gfm", c.condition.eta_gfm},
                          {"eta_gfl", c.condition.eta_gfl},
                          {"load_scale", c.condition.load_scale}};
    j["gfm_p_set"] = c.gfm_p_set;
    j["gfl_p_set"] = c.gfl_p_set;
    j["gfl_q_set"] = c.gfl_q_set;
    return j.dump(2);
}

NetworkCase default_case_template() { return case_from_json(detail::kWscc9Json); }

NetworkCase load_case_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open case file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return case_from_json(ss.str());
}

NetworkCase build_wscc9(double load_scale, const OperatingCondition& condition,
                        const NetworkCase& base_template) {
    if (load_scale <= 0.0) throw ConfigError("load_scale must be > 0");
    OperatingCondition cond = condition;
    cond.load_scale = load_scale;
    cond.validate();

    NetworkCase c = base_template;
    c.condition = cond;
    for (auto& b : c.buses) {
        b.load_p *= load_scale;
        b.load_q *= load_scale;
    }
    const double p_total = c.total_load_p();
    c.gfm_p_set = cond.eta_gfm * p_total;
    c.gfl_p_set = cond.eta_gfl * p_total;
    c.gfl_q_set = 0.0;  // GFL holds q_ref = 0; GFM holds its voltage setpoint

    for (auto& b : c.buses) {
        if (b.id == c.machine.bus) {
            b.kind = BusKind::Reference;
        } else if (b.id == c.gfm.bus) {
            b.kind = BusKind::Pv;
        } else {
            b.kind = BusKind::Pq;
        }
    }
    c.validate();
    return c;
}

NetworkCase build_wscc9(double load_scale, const OperatingCondition& condition) {
    return build_wscc9(load_scale, condition, default_case_template());
}

}  // namespace gridss
