#pragma once

// Interface fluxes for the standard PPU scheme and the fractional-flow
// (total velocity / total mass) schemes with PPU or weighted-average flow
// mobilities and PPU or hybrid-upwinded transport mobilities.
//
// Every kernel is a template on the scalar type: instantiating with Dual<N>
// yields exact derivatives with upwind indicators held locally constant.
// Sign convention: positive fluxes go from side i to side j. Every ">= 0"
// upwind test resolves ties to side i.

#include "huflow/dual.hpp"
#include "huflow/fluid.hpp"

#include <array>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

namespace huflow {

enum class Formulation { standard, total_velocity, total_mass };
enum class FlowUpwinding { ppu, wa };
enum class TransportUpwinding { ppu, hu };
/// How the density factor outside the total velocity is upwinded (HU, TV).
enum class DensityUpwinding { per_term, total };

struct SchemeConfig {
    Formulation formulation = Formulation::total_velocity;
    FlowUpwinding flow = FlowUpwinding::wa;
    TransportUpwinding transport = TransportUpwinding::hu;
    DensityUpwinding density = DensityUpwinding::per_term;
    double alpha = 1.0;
    double eps_saturation = kSaturationEpsilon;
    double eps_mobility = kMobilityEpsilon;
    /// Used in place of |g_ref| + |c_ref| when both vanish (Pa).
    double beta_floor = 1.0;

    void validate() const;
    std::string label() const;

    static SchemeConfig ppu();
    static SchemeConfig ppu_hu();
    static SchemeConfig wahu_tv();
    static SchemeConfig wahu_tm();

    /// Accepts ppu, ppu-ppu, ppu-hu, ppu-hu-tm, ppu-ppu-tm, wahu-tv, wahu-tm,
    /// wa-ppu-tv. Throws std::invalid_argument listing valid labels otherwise.
    static SchemeConfig from_label(std::string_view label);
    static const std::vector<std::string>& labels();

    bool operator==(const SchemeConfig&) const = default;
};

/// Cell-side quantities entering a face flux.
template <class T>
struct SideState {
    T pressure{};
    std::array<T, kMaxPhases> saturation{};
    std::array<T, kMaxPhases> density{};
    std::array<T, kMaxPhases> mobility{};    // k_r / mu
    std::array<T, kMaxPhases> capillary{};   // p - p_l
};

/// Fixed per-connection data.
struct FaceParameters {
    double transmissibility = 1.0;
    double delta_z = 0.0;     // z_i - z_j
    double gravity = 9.81;
    double g_ref = 0.0;
    std::array<double, kMaxPhases> c_ref{};
    std::array<double, kMaxPhases> gamma{};
};

template <class T>
struct FaceFlux {
    int phases = 0;
    std::array<T, kMaxPhases> interface_density{};
    std::array<T, kMaxPhases> gravity_potential{};   // g_l = rho_l,ij g dz
    std::array<T, kMaxPhases> capillary_diff{};      // p_cap,l,i - p_cap,l,j
    std::array<T, kMaxPhases> potential_diff{};      // Delta Phi_l
    std::array<T, kMaxPhases> beta{};                // WA weights (0.5 unless WA)
    std::array<T, kMaxPhases> flow_mobility{};
    T total{};                                       // u_t, or f_t for total mass
    std::array<T, kMaxPhases> viscous{};             // per-phase V, G, C terms
    std::array<T, kMaxPhases> gravity{};
    std::array<T, kMaxPhases> capillary{};
    std::array<T, kMaxPhases> phase_flux{};          // u_l, or f_l for total mass
    std::array<T, kMaxPhases> component_flux{};      // F_c in kg/s
    std::array<double, kMaxPhases> omega_gravity{};
    std::array<double, kMaxPhases> omega_capillary{};
};

// ---------------------------------------------------------------------------
// Building blocks

/// Delta Phi_l = (p_i - p_cap,i) - (p_j - p_cap,j) - rho_l,ij g dz.
template <class T>
T phase_potential_diff(const SideState<T>& si, const SideState<T>& sj, int l, const FaceParameters& face,
                       double eps_saturation = kSaturationEpsilon)
{
    const T rho = interface_density(si.saturation[l], sj.saturation[l], si.density[l], sj.density[l], eps_saturation);
    return (si.pressure - si.capillary[l]) - (sj.pressure - sj.capillary[l]) - rho * (face.gravity * face.delta_z);
}

template <class T>
const T& ppu_select(double potential, const T& side_i, const T& side_j)
{
    return potential >= 0.0 ? side_i : side_j;
}

template <class T>
T ppu_mobility(const T& dphi, const T& mob_i, const T& mob_j)
{
    return ppu_select(value_of(dphi), mob_i, mob_j);
}

/// beta = 0.5 + atan(gamma dphi / (|g_ref| + |c_ref|)) / pi.
template <class T>
T wa_beta(const T& dphi, double gamma, double g_ref, double c_ref, double floor = 1.0)
{
    double scale = std::abs(g_ref) + std::abs(c_ref);
    if (scale == 0.0) scale = floor;
    using std::atan;
    return 0.5 + atan(dphi * (gamma / scale)) / std::numbers::pi;
}

template <class T>
T wa_mobility(const T& beta, const T& mob_i, const T& mob_j)
{
    return beta * mob_i + (1.0 - beta) * mob_j;
}

/// T * sum_l mob_l dphi_l; gives u_t for mobilities and f_t for mass mobilities.
template <class T>
T total_flux(double transmissibility, const std::array<T, kMaxPhases>& flow_mobility,
             const std::array<T, kMaxPhases>& dphi, int phases)
{
    T sum(0.0);
    for (int l = 0; l < phases; ++l) sum += flow_mobility[l] * dphi[l];
    return transmissibility * sum;
}

template <class T>
const T& hu_viscous_upwind(double total, const T& mob_i, const T& mob_j)
{
    return total >= 0.0 ? mob_i : mob_j;
}

/// Potential-ordering upwind parameter:
///   omega_l = sum_m [mob_m,i (pot_m < pot_l) + mob_m,j (pot_m > pot_l)] (pot_m - pot_l).
/// Gravity uses pot = g_m, capillarity uses pot = Delta p_cap,m.
template <class T>
double upwind_parameter(const std::array<T, kMaxPhases>& potential, const std::array<T, kMaxPhases>& mob_i,
                        const std::array<T, kMaxPhases>& mob_j, int l, int phases)
{
    const double pl = value_of(potential[l]);
    double omega = 0.0;
    for (int m = 0; m < phases; ++m) {
        const double pm = value_of(potential[m]);
        if (pm < pl) omega += value_of(mob_i[m]) * (pm - pl);
        else if (pm > pl) omega += value_of(mob_j[m]) * (pm - pl);
    }
    return omega;
}

/// Total mobility for the fractional-flow denominators; eps stands in only
/// when every phase is immobile, so sum_l mob_l / mob_t stays exactly 1.
template <class T>
T guarded_total(const std::array<T, kMaxPhases>& mob, int phases, double eps)
{
    T total(0.0);
    for (int m = 0; m < phases; ++m) total += mob[m];
    return value_of(total) < eps ? T(eps) : total;
}

/// T * sum_m mob_l mob_m / mob_t (pot_m - pot_l), the antisymmetric
/// redistribution used for both the gravity and the capillary term.
template <class T>
T redistribution_term(double transmissibility, const std::array<T, kMaxPhases>& mob,
                      const std::array<T, kMaxPhases>& potential, int l, int phases, double eps_mobility)
{
    const T mob_t = guarded_total(mob, phases, eps_mobility);
    T sum(0.0);
    for (int m = 0; m < phases; ++m) {
        if (m == l) continue;
        sum += mob[m] * (potential[m] - potential[l]);
    }
    return transmissibility * mob[l] * sum / mob_t;
}

/// Only the unit matters here: which is the mobility actually weighted,
/// lambda (standard, total velocity) or rho * lambda (total mass).
template <class T>
std::array<T, kMaxPhases> side_mobilities(const SideState<T>& s, Formulation f, int phases)
{
    std::array<T, kMaxPhases> mob{};
    for (int l = 0; l < phases; ++l)
        mob[l] = f == Formulation::total_mass ? s.density[l] * s.mobility[l] : s.mobility[l];
    return mob;
}

// ---------------------------------------------------------------------------
// Full face flux

template <class T>
FaceFlux<T> compute_face_flux(int phases, const SideState<T>& si, const SideState<T>& sj, const FaceParameters& face,
                              const SchemeConfig& scheme)
{
    FaceFlux<T> out;
    out.phases = phases;
    const double trans = face.transmissibility;
    const double gdz = face.gravity * face.delta_z;

    for (int l = 0; l < phases; ++l) {
        out.interface_density[l] = interface_density(si.saturation[l], sj.saturation[l], si.density[l],
                                                     sj.density[l], scheme.eps_saturation);
        out.gravity_potential[l] = out.interface_density[l] * gdz;
        out.capillary_diff[l] = si.capillary[l] - sj.capillary[l];
        out.potential_diff[l] = (si.pressure - sj.pressure) - out.capillary_diff[l] - out.gravity_potential[l];
        out.beta[l] = T(0.5);
    }

    if (scheme.formulation == Formulation::standard) {
        out.total = T(0.0);
        for (int l = 0; l < phases; ++l) {
            const double dphi = value_of(out.potential_diff[l]);
            const T& lam = ppu_select(dphi, si.mobility[l], sj.mobility[l]);
            const T& rho = ppu_select(dphi, si.density[l], sj.density[l]);
            out.beta[l] = T(dphi >= 0.0 ? 1.0 : 0.0);
            out.flow_mobility[l] = lam;
            out.phase_flux[l] = trans * lam * out.potential_diff[l];
            out.viscous[l] = out.phase_flux[l];
            out.component_flux[l] = rho * out.phase_flux[l];
            out.total += out.phase_flux[l];
        }
        return out;
    }

    const auto mob_i = side_mobilities(si, scheme.formulation, phases);
    const auto mob_j = side_mobilities(sj, scheme.formulation, phases);

    // Flow subproblem: total velocity or total mass flux.
    for (int l = 0; l < phases; ++l) {
        if (scheme.flow == FlowUpwinding::wa) {
            out.beta[l] = wa_beta(out.potential_diff[l], face.gamma[l], face.g_ref, face.c_ref[l], scheme.beta_floor);
            out.flow_mobility[l] = wa_mobility(out.beta[l], mob_i[l], mob_j[l]);
        } else {
            out.beta[l] = T(value_of(out.potential_diff[l]) >= 0.0 ? 1.0 : 0.0);
            out.flow_mobility[l] = ppu_mobility(out.potential_diff[l], mob_i[l], mob_j[l]);
        }
    }
    out.total = total_flux(trans, out.flow_mobility, out.potential_diff, phases);
    const double total = value_of(out.total);

    // Transport subproblem.
    std::array<T, kMaxPhases> mob_v{}, mob_g{}, mob_c{};
    if (scheme.transport == TransportUpwinding::ppu) {
        for (int l = 0; l < phases; ++l) {
            mob_v[l] = ppu_mobility(out.potential_diff[l], mob_i[l], mob_j[l]);
            mob_g[l] = mob_v[l];
            mob_c[l] = mob_v[l];
        }
    } else {
        for (int l = 0; l < phases; ++l) {
            mob_v[l] = hu_viscous_upwind(total, mob_i[l], mob_j[l]);
            out.omega_gravity[l] = upwind_parameter(out.gravity_potential, mob_i, mob_j, l, phases);
            out.omega_capillary[l] = upwind_parameter(out.capillary_diff, mob_i, mob_j, l, phases);
            mob_g[l] = out.omega_gravity[l] >= 0.0 ? mob_i[l] : mob_j[l];
            mob_c[l] = out.omega_capillary[l] >= 0.0 ? mob_i[l] : mob_j[l];
        }
    }

    const T mob_vt = guarded_total(mob_v, phases, scheme.eps_mobility);
    for (int l = 0; l < phases; ++l) {
        out.viscous[l] = mob_v[l] / mob_vt * out.total;
        out.gravity[l] = redistribution_term(trans, mob_g, out.gravity_potential, l, phases, scheme.eps_mobility);
        out.capillary[l] = redistribution_term(trans, mob_c, out.capillary_diff, l, phases, scheme.eps_mobility);
        out.phase_flux[l] = out.viscous[l] + out.gravity[l] + out.capillary[l];
    }

    // Component fluxes. Immiscible: component c is phase c, so only the
    // density factor remains outside the total for the velocity formulation.
    for (int c = 0; c < phases; ++c) {
        if (scheme.formulation == Formulation::total_mass) {
            out.component_flux[c] = out.phase_flux[c];
        } else if (scheme.transport == TransportUpwinding::ppu) {
            out.component_flux[c] =
                ppu_select(value_of(out.potential_diff[c]), si.density[c], sj.density[c]) * out.phase_flux[c];
        } else if (scheme.density == DensityUpwinding::total) {
            out.component_flux[c] = ppu_select(total, si.density[c], sj.density[c]) * out.phase_flux[c];
        } else {
            auto term = [&](const T& t) { return ppu_select(value_of(t), si.density[c], sj.density[c]) * t; };
            out.component_flux[c] = term(out.viscous[c]) + term(out.gravity[c]) + term(out.capillary[c]);
        }
    }
    return out;
}

/// Side state for a cell from the fluid system: all phase saturations given.
template <class T>
SideState<T> make_side_state(const FluidSystem& fluids, const T& pressure, const std::array<T, kMaxPhases>& saturation)
{
    SideState<T> s;
    s.pressure = pressure;
    for (int l = 0; l < fluids.phase_count(); ++l) {
        const auto& ph = fluids.phase(l);
        s.saturation[l] = saturation[l];
        s.density[l] = ph.density(pressure);
        s.mobility[l] = ph.relperm(saturation[l]) / ph.viscosity;
        s.capillary[l] = fluids.capillary_pressure(l, saturation[l]);
    }
    return s;
}

FaceParameters make_face_parameters(const FluidSystem& fluids, const SchemeConfig& scheme, double transmissibility,
                                    double delta_z);

extern template FaceFlux<double> compute_face_flux(int, const SideState<double>&, const SideState<double>&,
                                                   const FaceParameters&, const SchemeConfig&);

}  // namespace huflow
