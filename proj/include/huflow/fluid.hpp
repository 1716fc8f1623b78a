#pragma once

#include "huflow/dual.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace huflow {

inline constexpr int kMaxPhases = 3;

/// Brooks-Corey relative permeability k_r(S) = endpoint * S^exponent.
struct RelPerm {
    double endpoint = 1.0;
    double exponent = 2.0;

    void validate() const;

    /// Value and exact derivative. Throws std::domain_error for S outside [0, 1].
    std::pair<double, double> eval(double saturation) const;

    /// Kernel evaluation; saturation is clamped into [0, 1].
    template <class T>
    T operator()(const T& saturation) const
    {
        const double s = std::clamp(value_of(saturation), 0.0, 1.0);
        const double kr = endpoint * std::pow(s, exponent);
        const double dkr = s > 0.0 ? endpoint * exponent * std::pow(s, exponent - 1.0)
                                   : (exponent == 1.0 ? endpoint : 0.0);
        return chain(saturation, kr, dkr);
    }

    /// max over S in [0, 1] of |k_r''(S)|.
    double max_second_derivative() const;
};

/// Natural cubic spline through (S, p_cap) knots, constant outside the table.
class CapillarySpline {
public:
    CapillarySpline() = default;  // identically zero

    static CapillarySpline natural(std::span<const double> saturations, std::span<const double> pressures,
                                   double scale = 1.0);

    double operator()(double s) const { return evaluate(s).first; }
    double derivative(double s) const { return evaluate(s).second; }
    std::pair<double, double> evaluate(double s) const;

    template <class T>
    T apply(const T& s) const
    {
        const auto [v, dv] = evaluate(value_of(s));
        return chain(s, v, dv);
    }

    bool is_zero() const { return knots_s_.empty() || scale_ == 0.0; }
    double scale() const { return scale_; }
    std::span<const double> knot_saturations() const { return knots_s_; }
    std::span<const double> knot_pressures() const { return knots_p_; }

private:
    std::vector<double> knots_s_;
    std::vector<double> knots_p_;   // already scaled
    std::vector<double> second_;    // spline second derivatives at knots
    double scale_ = 0.0;
};

using CapillaryTable = std::vector<std::pair<double, double>>;

/// The ten-knot table used throughout (S_wet, p_cap in Pa).
const CapillaryTable& reference_capillary_table();

/// Built-in name ("reference") or path to a two-column text file.
CapillaryTable load_capillary_table(const std::string& name_or_path);

/// Analytic curve the table is attributed to: 5e4 * (1/S_wet)^4. Has an
/// asymptote at S_wet -> 0; kept for comparison only.
double capillary_generator(double s_wet);

/// rho(p) = reference * (1 + compressibility * (p - reference_pressure)).
struct DensityModel {
    double reference = 1000.0;
    double compressibility = 0.0;  // 1/Pa
    double reference_pressure = 0.0;

    template <class T>
    T operator()(const T& p) const
    {
        if (compressibility == 0.0) return T(reference);
        return reference * (1.0 + compressibility * (p - reference_pressure));
    }
    bool incompressible() const { return compressibility == 0.0; }
};

struct PhaseSpec {
    std::string name;
    double viscosity = 1e-3;  // Pa s
    DensityModel density;
    double surface_density = 1000.0;
    RelPerm relperm;
    int wettability_rank = 0;  // 0 = most wetting
};

/// Capillary pressure of one phase relative to the reference pressure,
/// p_cap(S) = sign * spline(S) or sign * spline(1 - S).
struct CapillaryRelation {
    CapillarySpline spline;
    double sign = 1.0;
    bool complement = false;

    template <class T>
    T operator()(const T& s) const
    {
        if (spline.is_zero()) return T(0.0);
        return complement ? sign * spline.apply(1.0 - s) : sign * spline.apply(s);
    }
};

/// Immutable phase system. Component c lives only in phase c.
class FluidSystem {
public:
    /// capillary: per-phase relation; the reference phase's entry is ignored.
    FluidSystem(std::vector<PhaseSpec> phases, std::vector<CapillaryRelation> capillary, double gravity = 9.81);

    int phase_count() const { return static_cast<int>(phases_.size()); }
    const PhaseSpec& phase(int l) const { return phases_[l]; }
    const std::vector<PhaseSpec>& phases() const { return phases_; }
    int reference_phase() const { return reference_; }
    double gravity() const { return gravity_; }
    /// Per-phase WA scaling coefficients for a given tuning parameter alpha.
    std::array<double, kMaxPhases> gammas(double alpha) const;
    double capillary_reference(int l) const { return c_ref_[l]; }
    const std::array<double, kMaxPhases>& capillary_references() const { return c_ref_; }
    bool has_capillarity() const;
    bool incompressible() const;

    /// g_ref for a connection: max surface density * g * delta_z.
    double gravity_reference(double delta_z) const { return max_surface_density_ * gravity_ * delta_z; }

    template <class T>
    T capillary_pressure(int l, const T& s) const
    {
        if (l == reference_) return T(0.0);
        return capillary_[l](s);
    }

private:
    std::vector<PhaseSpec> phases_;
    std::vector<CapillaryRelation> capillary_;
    int reference_ = 0;
    double gravity_ = 9.81;
    double max_surface_density_ = 0.0;
    std::array<double, kMaxPhases> c_ref_{};
};

/// WA scaling coefficient gamma = alpha / k_r0 * max |k_r''|.
double gamma_coefficient(const RelPerm& model, double alpha);

struct ReferencePotentials {
    double g_ref = 0.0;
    std::array<double, kMaxPhases> c_ref{};
};

ReferencePotentials reference_potentials(const FluidSystem& fluids, double delta_z);

inline constexpr double kSaturationEpsilon = 1e-10;
inline constexpr double kMobilityEpsilon = 1e-12;

/// Saturation-weighted interface density with an epsilon added to each weight.
template <class T>
T interface_density(const T& s_i, const T& s_j, const T& rho_i, const T& rho_j,
                    double eps = kSaturationEpsilon)
{
    return ((s_i + eps) * rho_i + (s_j + eps) * rho_j) / (s_i + s_j + 2.0 * eps);
}

}  // namespace huflow
