#pragma once

// Randomised property checks over face fluxes and small simulators.

#include "huflow/flux.hpp"
#include "huflow/harness.hpp"

#include <random>
#include <string>

namespace huflow {

struct RandomFace {
    int phases = 2;
    SideState<double> i;
    SideState<double> j;
    FaceParameters face;
};

/// Incompressible random face state: saturations on the simplex, densities
/// 100-1500 kg/m^3, mobilities from random power laws, capillary pressures
/// up to 1e4 Pa, gamma >= 0.
RandomFace random_face(std::mt19937_64& rng, int phases);

/// Finite-difference du_t/d(Delta p_l) >= -1e-12 * T * sum(mob) for WA and PPU flow.
CheckResult check_total_velocity_monotone(unsigned seed, int samples);
/// beta in (0, 1) and P = beta + dbeta/dDp * DeltaPhi in [0, 1].
CheckResult check_weight_bounds(unsigned seed, int samples);
/// sum_l u_l = u_t (TV) and sum_l f_l = f_t = sum_c F_c (TM), 1e-14 relative.
CheckResult check_redistribution(unsigned seed, int samples);
/// Standard PPU equals the TV split with PPU flow and transport, 1e-12 relative.
CheckResult check_ppu_equivalence(unsigned seed, int samples);

struct JacobianCheck {
    double max_relative_error = 0.0;
    int compared = 0;  // states where the finite-difference stencil saw no switch
    int skipped = 0;
};
/// Dual-number Jacobian against central differences of the residual on random
/// 3x1x3 states. States whose one-sided differences disagree (a switch
/// locus inside the stencil) are skipped.
JacobianCheck jacobian_error(const SchemeConfig& scheme, int phases, unsigned seed, int samples);
CheckResult check_jacobian(unsigned seed, int samples);

/// Closed-domain mass over a short coarse segregation run for every scheme.
CheckResult check_mass_conservation();
/// load(serialize(x)) == x for every builtin case.
CheckResult check_config_round_trip();
/// The capillary spline passes through every table knot.
CheckResult check_spline_knots();

}  // namespace huflow
