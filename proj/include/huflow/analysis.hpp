#pragma once

// Residual-space study of a single cell L coupled to a fixed boundary cell R.
// The pressure unknown is the water pressure; gas capillary pressure enters
// as p_cap,g = p_w - p_g = -P_c(S_w).

#include "huflow/fluid.hpp"
#include "huflow/flux.hpp"

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace huflow {

struct OneCellProblem {
    double p_right = 210.0;
    double sw_right = 0.2;
    double permeability = 1.0;
    double porosity = 0.3;
    double area = 1.0;
    double distance = 1.0;
    double g_dz = -1.0;                       // g (z_L - z_R)
    std::array<double, 2> rho_left{6.18, 2.06};   // water, gas
    std::array<double, 2> rho_right{6.0, 2.0};
    std::array<double, 2> viscosity{1.0, 1.0};
    std::array<RelPerm, 2> relperm{RelPerm{1.0, 2.0}, RelPerm{1.0, 3.0}};
    double capillary_scale = 5e-5;
    CapillarySpline capillary;                // P_c(S_w), already scaled
    double sw_previous = 0.4;
    double dt = 0.1;

    // Sampled window.
    double p_min = 200.0, p_max = 215.0;
    double s_min = 0.001, s_max = 0.999;

    static OneCellProblem defaults();

    double transmissibility() const { return permeability * area / distance; }
    double pore_volume() const { return porosity * area * distance; }
    void validate() const;
};

enum class LocusKind { phase_potential, total_flux, capillary };

struct LocusId {
    LocusKind kind = LocusKind::phase_potential;
    int phase = 0;  // only for phase_potential

    std::string name() const;
    bool operator==(const LocusId&) const = default;
};

/// The loci on which the scheme's residual has a derivative jump.
std::vector<LocusId> kink_loci(const SchemeConfig& scheme, bool capillary);
std::vector<LocusId> all_loci();

/// Flux across the L-R face at left-cell state (p, S_w).
FaceFlux<double> one_cell_flux(const OneCellProblem& problem, const SchemeConfig& scheme, double p, double sw);

/// Value of a locus function; the locus is its zero level set.
double locus_value(const OneCellProblem& problem, const SchemeConfig& scheme, const LocusId& locus, double p,
                   double sw);

/// One-cell residual (water, gas) and its 2x2 Jacobian w.r.t. (p, S_w).
struct OneCellResidual {
    std::array<double, 2> value{};
    std::array<std::array<double, 2>, 2> jacobian{};
    double norm() const;
};
OneCellResidual one_cell_residual(const OneCellProblem& problem, const SchemeConfig& scheme, double p, double sw);

/// Total flux reported on the velocity surface: u_t, or f_t for total mass.
double one_cell_total(const OneCellProblem& problem, const SchemeConfig& scheme, double p, double sw);

struct FieldSample {
    std::string quantity;
    std::vector<double> p;   // axis, size nx
    std::vector<double> s;   // axis, size ns
    std::vector<double> value;  // row-major [is * nx + ip]
    std::vector<LocusId> loci;
    std::vector<std::vector<double>> locus_fields;  // same layout as value

    double at(std::size_t ip, std::size_t is) const { return value[is * p.size() + ip]; }
    double locus_at(std::size_t k, std::size_t ip, std::size_t is) const { return locus_fields[k][is * p.size() + ip]; }
    std::optional<std::size_t> locus_index(const LocusId& id) const;
};

struct LocusPoint {
    double p = 0.0;
    double s = 0.0;
};

FieldSample velocity_surface(const OneCellProblem& problem, const SchemeConfig& scheme, int resolution);
FieldSample residual_surface(const OneCellProblem& problem, const SchemeConfig& scheme, int resolution);
/// Per-phase flow flux T * lambda^F_l * dPhi_l, the quantity whose kink and
/// bend the weighted average trades off.
FieldSample phase_flow_surface(const OneCellProblem& problem, const SchemeConfig& scheme, int phase, int resolution);

/// Sign changes of a locus function on the lattice, located by linear
/// interpolation along either axis.
std::vector<LocusPoint> trace_locus(const FieldSample& field, const LocusId& locus);

struct KinkMeasure {
    double kink = 0.0;  // max jump of the p-direction first difference across the locus
    double bend = 0.0;  // max |second difference| along S on the downwind side, locus stencils excluded
    int crossings = 0;
};

/// Throws std::runtime_error if the locus does not cross the sampled domain.
KinkMeasure kink_measure(const FieldSample& field, const LocusId& locus);

/// One-sided p-derivatives of the velocity-surface quantity at the point
/// where the locus crosses the line S_w = sw; returns |right - left|.
double locus_slope_jump(const OneCellProblem& problem, const SchemeConfig& scheme, const LocusId& locus, double sw,
                        double offset = 1e-9);

struct OneCellSolution {
    bool converged = false;
    double p = 0.0;
    double sw = 0.0;
    double residual_norm = 0.0;
    double total = 0.0;      // u_t, or f_t for total mass, at the solution
    double mass_flux = 0.0;  // sum of component fluxes
    int distinct_solutions = 0;
    int iterations = 0;
};

/// Newton with saturation clamping from one start.
OneCellSolution solve_one_cell_from(const OneCellProblem& problem, const SchemeConfig& scheme, double p0, double s0,
                                    int max_iterations = 200);

/// Dense multistart Newton; reports the solution with the smallest residual
/// and how many distinct limits were found.
OneCellSolution solve_one_cell(const OneCellProblem& problem, const SchemeConfig& scheme, int starts_per_axis = 8);

struct NewtonPath {
    std::vector<LocusPoint> points;
    bool terminated = false;  // reached ||R|| < tolerance
    double final_residual = 0.0;
    std::vector<int> crossings;  // per entry of all_loci()
    int distinct_kink_loci = 0;  // loci in kink_loci() crossed at least once
    int kink_crossings = 0;      // total sign changes over kink_loci()
};

NewtonPath newton_path(const OneCellProblem& problem, const SchemeConfig& scheme, LocusPoint start,
                       double step_scale = 0.02, double tolerance = 1e-10, int max_steps = 100000);

/// Four starts inset 5% from the window corners.
std::array<LocusPoint, 4> corner_starts(const OneCellProblem& problem);

void write_field(const FieldSample& field, std::ostream& out);
void write_loci(const FieldSample& field, std::ostream& out);
void write_path(const NewtonPath& path, std::ostream& out);

}  // namespace huflow
