#include "huflow/fluid.hpp"

#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace huflow {

void RelPerm::validate() const
{
    if (!(endpoint > 0.0 && endpoint <= 1.0)) throw std::invalid_argument("relperm: endpoint must lie in (0, 1]");
    if (!(exponent >= 1.0)) throw std::invalid_argument("relperm: exponent must be >= 1");
}

std::pair<double, double> RelPerm::eval(double saturation) const
{
    if (!(saturation >= 0.0 && saturation <= 1.0))
        throw std::domain_error("relperm: saturation " + std::to_string(saturation) + " outside [0, 1]");
    const double kr = endpoint * std::pow(saturation, exponent);
    const double dkr = saturation > 0.0 ? endpoint * exponent * std::pow(saturation, exponent - 1.0)
                                        : (exponent == 1.0 ? endpoint : 0.0);
    return {kr, dkr};
}

double RelPerm::max_second_derivative() const
{
    // k'' = k_r0 n (n-1) S^(n-2): monotone in S for n >= 2, peaks at S = 1.
    // For 1 < n < 2 it is unbounded at S = 0, so sample the open interval.
    const double n = exponent;
    if (n == 1.0) return 0.0;
    if (n >= 2.0) return endpoint * n * (n - 1.0);
    double best = 0.0;
    constexpr int samples = 10000;
    for (int k = 1; k <= samples; ++k) {
        const double s = static_cast<double>(k) / samples;
        best = std::max(best, endpoint * n * (n - 1.0) * std::pow(s, n - 2.0));
    }
    return best;
}

CapillarySpline CapillarySpline::natural(std::span<const double> saturations, std::span<const double> pressures,
                                         double scale)
{
    const std::size_t n = saturations.size();
    if (n != pressures.size()) throw std::invalid_argument("capillary spline: knot length mismatch");
    if (n < 4) throw std::invalid_argument("capillary spline: at least 4 knots required");
    for (std::size_t k = 1; k < n; ++k)
        if (!(saturations[k] > saturations[k - 1]))
            throw std::invalid_argument("capillary spline: saturations must be strictly increasing");

    CapillarySpline sp;
    sp.scale_ = scale;
    sp.knots_s_.assign(saturations.begin(), saturations.end());
    sp.knots_p_.resize(n);
    for (std::size_t k = 0; k < n; ++k) sp.knots_p_[k] = scale * pressures[k];

    // Tridiagonal system for interior second derivatives (Thomas algorithm).
    const auto& x = sp.knots_s_;
    const auto& y = sp.knots_p_;
    std::vector<double> m(n, 0.0), c(n, 0.0), d(n, 0.0);
    for (std::size_t k = 1; k + 1 < n; ++k) {
        const double h0 = x[k] - x[k - 1];
        const double h1 = x[k + 1] - x[k];
        const double a = h0;
        const double b = 2.0 * (h0 + h1);
        const double rhs = 6.0 * ((y[k + 1] - y[k]) / h1 - (y[k] - y[k - 1]) / h0);
        const double denom = b - a * c[k - 1];
        c[k] = h1 / denom;
        d[k] = (rhs - a * d[k - 1]) / denom;
    }
    for (std::size_t k = n - 2; k >= 1; --k) m[k] = d[k] - c[k] * m[k + 1];
    sp.second_ = std::move(m);
    return sp;
}

std::pair<double, double> CapillarySpline::evaluate(double s) const
{
    if (is_zero()) return {0.0, 0.0};
    const auto& x = knots_s_;
    const auto& y = knots_p_;
    // End knots belong to the table and take the one-sided spline slope.
    if (s < x.front()) return {y.front(), 0.0};
    if (s > x.back()) return {y.back(), 0.0};
    const auto it = std::upper_bound(x.begin(), x.end() - 1, s);
    const std::size_t k = static_cast<std::size_t>(it - x.begin()) - 1;
    const double h = x[k + 1] - x[k];
    const double a = (x[k + 1] - s) / h;
    const double b = (s - x[k]) / h;
    const double v = a * y[k] + b * y[k + 1] + ((a * a * a - a) * second_[k] + (b * b * b - b) * second_[k + 1]) * h * h / 6.0;
    const double dv = (y[k + 1] - y[k]) / h - (3.0 * a * a - 1.0) / 6.0 * h * second_[k] +
                      (3.0 * b * b - 1.0) / 6.0 * h * second_[k + 1];
    return {v, dv};
}

const CapillaryTable& reference_capillary_table()
{
    static const CapillaryTable table = {
        {0.05, 1.057e5}, {0.15, 8.034e4}, {0.25, 7.071e4}, {0.35, 6.500e4}, {0.45, 6.104e4},
        {0.55, 5.806e4}, {0.65, 5.568e4}, {0.75, 5.372e4}, {0.85, 5.207e4}, {0.95, 5.064e4},
    };
    return table;
}

CapillaryTable load_capillary_table(const std::string& name_or_path)
{
    if (name_or_path == "reference") return reference_capillary_table();
    std::ifstream in(name_or_path);
    if (!in) throw std::runtime_error("capillary table: cannot open '" + name_or_path + "'");
    CapillaryTable table;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        for (auto& ch : line)
            if (ch == ',' || ch == '\t') ch = ' ';
        std::istringstream row(line);
        double s = 0.0, p = 0.0;
        if (!(row >> s)) continue;
        if (!(row >> p))
            throw std::runtime_error("capillary table: line " + std::to_string(line_no) + " needs two columns");
        table.emplace_back(s, p);
    }
    return table;
}

double capillary_generator(double s_wet)
{
    if (!(s_wet > 0.0)) throw std::domain_error("capillary generator: wetting saturation must be positive");
    const double inv = 1.0 / s_wet;
    return 5e4 * inv * inv * inv * inv;
}

double gamma_coefficient(const RelPerm& model, double alpha)
{
    if (alpha < 0.0) throw std::invalid_argument("gamma: alpha must be non-negative");
    if (alpha == 0.0) return 0.0;
    return alpha / model.endpoint * model.max_second_derivative();
}

FluidSystem::FluidSystem(std::vector<PhaseSpec> phases, std::vector<CapillaryRelation> capillary, double gravity)
    : phases_(std::move(phases)), capillary_(std::move(capillary)), gravity_(gravity)
{
    const int np = phase_count();
    if (np < 2 || np > kMaxPhases) throw std::invalid_argument("fluids: two or three phases supported");
    if (capillary_.empty()) capillary_.resize(phases_.size());
    if (static_cast<int>(capillary_.size()) != np) throw std::invalid_argument("fluids: capillary count mismatch");

    std::vector<int> order(np);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return phases_[a].wettability_rank < phases_[b].wettability_rank; });
    for (int k = 1; k < np; ++k)
        if (phases_[order[k]].wettability_rank == phases_[order[k - 1]].wettability_rank)
            throw std::invalid_argument("fluids: wettability ranks must be distinct");
    // Least wetting phase for two phases, the intermediate one for three:
    // both are the second entry in wettability order.
    reference_ = order[1];

    for (int l = 0; l < np; ++l) {
        const auto& ph = phases_[l];
        if (!(ph.viscosity > 0.0)) throw std::invalid_argument("fluids: viscosity must be positive");
        if (!(ph.density.reference > 0.0)) throw std::invalid_argument("fluids: density must be positive");
        if (!(ph.surface_density > 0.0)) throw std::invalid_argument("fluids: surface density must be positive");
        ph.relperm.validate();
        max_surface_density_ = std::max(max_surface_density_, ph.surface_density);
    }
    for (int l = 0; l < np; ++l)
        c_ref_[l] = l == reference_ ? 0.0 : capillary_pressure(l, 0.8) - capillary_pressure(l, 0.2);
}

std::array<double, kMaxPhases> FluidSystem::gammas(double alpha) const
{
    std::array<double, kMaxPhases> g{};
    for (int l = 0; l < phase_count(); ++l) g[l] = gamma_coefficient(phases_[l].relperm, alpha);
    return g;
}

bool FluidSystem::has_capillarity() const
{
    for (int l = 0; l < phase_count(); ++l)
        if (l != reference_ && !capillary_[l].spline.is_zero()) return true;
    return false;
}

bool FluidSystem::incompressible() const
{
    return std::all_of(phases_.begin(), phases_.end(), [](const PhaseSpec& p) { return p.density.incompressible(); });
}

ReferencePotentials reference_potentials(const FluidSystem& fluids, double delta_z)
{
    return {fluids.gravity_reference(delta_z), fluids.capillary_references()};
}

}  // namespace huflow
