#pragma once

#include <utility>
#include <vector>

#include "gridss/dq.hpp"
#include "gridss/network.hpp"

namespace gridss {

/// Lumped pi equivalent after hyperbolic correction, nominal frequency.
/// Shunt conductance is overwritten to zero after the correction.
struct LumpedPi {
    Cplx z_pi;  // total corrected series impedance
    Cplx y_pi;  // total corrected shunt admittance, Re forced to 0

    [[nodiscard]] double r_pi() const { return z_pi.real(); }
    [[nodiscard]] double l_pi() const { return z_pi.imag(); }  // at omega = 1 pu
    [[nodiscard]] double c_pi() const { return y_pi.imag(); }
    void validate() const;
};

/// One of N identical segments of a multi-segment single-branch line.
struct SegmentParams {
    double r_seg = 0.0, l_seg = 0.0, c_seg = 0.0;
    int n_segments = 1;
    double seg_length_km = 0.0;

    void validate() const;
};

enum class LineModel { StatPi, DynPi, Mssb };

const char* line_model_name(LineModel m);
LineModel line_model_from_name(const std::string& name);

/// A branch bound to one realization. Transformers are always algebraic series
/// impedances; the three models apply to transmission lines.
struct LineRealization {
    LineModel model = LineModel::StatPi;
    LumpedPi pi;        // used by StatPi and DynPi
    SegmentParams seg;  // used by Mssb
    bool algebraic = false;

    /// Real dynamic states contributed, excluding bus voltages shared with the
    /// network (those are owned per bus): DynPi contributes the series current
    /// pair; Mssb contributes N current pairs plus N-1 interior voltage pairs.
    [[nodiscard]] int owned_state_count() const;
};

/// sinh(x)/x with an analytic small-|x| continuation (exact 1 at x = 0).
Cplx sinhc(const Cplx& x);
/// tanh(x/2)/(x/2) with the same treatment.
Cplx tanhc_half(const Cplx& x);

/// Hyperbolic correction of per-unit-length data to a lumped pi, nominal
/// frequency. gamma*length -> 0 degenerates to the plain product, never 0/0.
LumpedPi hyperbolic_correction(const Cplx& z_km, const Cplx& y_km, double length_km);

LumpedPi corrected_pi(const BranchSpec& branch);
SegmentParams segment_params(const BranchSpec& branch, int n_segments);
LineRealization realize_branch(const BranchSpec& branch, LineModel model, int n_segments);

/// Algebraic two-port: current into port 1 and current out of port 2 with the
/// half-shunt y_pi/2 at each terminal.
std::pair<Dq, Dq> statpi_port_currents(const Dq& v1, const Dq& v2, const LumpedPi& pi);

struct DynPiState {
    Dq i, v1, v2;
};

struct DynPiDerivatives {
    Dq di, dv1, dv2;
};

/// Dynamic pi residual; boundary currents are the external injections into the
/// two ports. omega_sys is the instantaneous network frame speed in pu.
DynPiDerivatives dynpi_residual(const DynPiState& s, const Dq& i_in, const Dq& i_out,
                                const LumpedPi& pi, double omega_sys, double omega_b);

/// Multi-segment residual. states = [i_1..i_N, v_1..v_{N+1}] as dq pairs packed
/// (d, q); derivatives has the same layout. Terminal node voltages v_1, v_{N+1}
/// carry only this line's half-shunt, so the caller can merge them with bus
/// capacitance; interior nodes carry the merged full segment shunt.
void mssb_residual(const double* states, const Dq& i_in, const Dq& i_out,
                   const SegmentParams& seg, double omega_sys, double omega_b,
                   double* derivatives);

/// Port currents of the zero-derivative (steady state) solution of a dynamic
/// realization for given terminal voltages. Used by equivalence checks.
std::pair<Dq, Dq> dynpi_steady_port_currents(const Dq& v1, const Dq& v2, const LumpedPi& pi,
                                             double omega_sys);

/// Two-port chain (ABCD) matrix of a realization evaluated at frequency
/// omega_pu (1 = nominal). For Mssb this cascades the N segment pis.
struct TwoPortAbcd {
    Cplx a, b, c, d;
};
TwoPortAbcd realization_abcd(const LineRealization& line, double omega_pu);

/// Open-circuit input impedance of a realization at omega_pu.
Cplx open_circuit_impedance(const LineRealization& line, double omega_pu);

/// Exact distributed-parameter open-circuit input impedance z_c*coth(gamma*l)
/// from the per-unit-length data, evaluated at omega_pu.
Cplx telegrapher_open_circuit_impedance(const BranchSpec& branch, double omega_pu);

}  // namespace gridss
