#pragma once

#include <string>
#include <vector>

#include "gridss/dq.hpp"
#include "gridss/inverter.hpp"
#include "gridss/machine.hpp"

namespace gridss {

struct PerUnitBase {
    double s_base_mva = 100.0;
    double v_base_kv = 230.0;
    double f_hz = 60.0;

    [[nodiscard]] double omega_b() const;  // rad/s
    void validate() const;
};

enum class BusKind { Reference, Pv, Pq };

struct Bus {
    int id = 0;
    BusKind kind = BusKind::Pq;
    double voltage_setpoint = 1.0;  // used by Reference/Pv
    double load_p = 0.0, load_q = 0.0;
};

/// Per-unit-length branch data at nominal frequency. Shunt conductance is zero.
struct BranchSpec {
    int from_bus = 0, to_bus = 0;
    double r_km = 0.0;  // series resistance, pu/km
    double l_km = 0.0;  // series inductance, pu/km
    double c_km = 0.0;  // shunt capacitance, pu/km
    double length_km = 0.0;
    bool transformer = false;  // series impedance only, never segmented

    [[nodiscard]] Cplx z_km() const { return {r_km, l_km}; }
    [[nodiscard]] Cplx y_km() const { return {0.0, c_km}; }
    void validate() const;
};

/// Dispatch shares and loading multiplier for one studied scenario.
struct OperatingCondition {
    std::string case_name;
    double eta_gfm = 0.0;
    double eta_gfl = 0.0;
    double load_scale = 1.0;

    [[nodiscard]] double eta_ibr() const { return eta_gfm + eta_gfl; }
    void validate() const;
};

/// The four studied generation-share cases (load_scale left at 1; callers set it).
OperatingCondition standard_condition(int case_number);

enum class LoadModel { ConstantImpedance, ConstantPower };

struct MachineSpec {
    int bus = 1;
    MachineParams params;
    AvrType1Params avr;
};

struct GfmSpec {
    int bus = 3;
    LclFilterParams filter;
    PllParams pll;
    GfmFixedParams fixed;
    GfmGains gains;  // defaults; the sweep substitutes per sample
};

struct GflSpec {
    int bus = 2;
    LclFilterParams filter;
    PllParams pll;
    GflFixedParams fixed;
    GflGains gains;
};

/// A fully specified study case: topology, devices, scaled loads, dispatch.
struct NetworkCase {
    std::string name;
    PerUnitBase base;
    LoadModel load_model = LoadModel::ConstantImpedance;
    std::vector<Bus> buses;
    std::vector<BranchSpec> branches;
    MachineSpec machine;
    GfmSpec gfm;
    GflSpec gfl;
    OperatingCondition condition;

    // Dispatch derived from the condition by build_wscc9.
    double gfm_p_set = 0.0;
    double gfl_p_set = 0.0;
    double gfl_q_set = 0.0;

    [[nodiscard]] const Bus& bus(int id) const;
    [[nodiscard]] int bus_index(int id) const;
    [[nodiscard]] double total_load_p() const;
    void validate() const;
};

/// The unscaled 9-bus template (buses, branches, device parameters) parsed from
/// the embedded dataset.
NetworkCase default_case_template();

NetworkCase case_from_json(const std::string& json_text);
std::string case_to_json(const NetworkCase& c);
NetworkCase load_case_file(const std::string& path);

/// Scale loads, assign inverter setpoints from the condition's shares, and mark
/// bus kinds (reference machine at bus 1, GFL as PQ at bus 2, GFM as PV at bus 3).
NetworkCase build_wscc9(double load_scale, const OperatingCondition& condition,
                        const NetworkCase& base_template);
NetworkCase build_wscc9(double load_scale, const OperatingCondition& condition);

}  // namespace gridss
