#include "huflow/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

namespace huflow {

namespace {

using D2 = Dual<2>;

FaceParameters one_cell_face(const OneCellProblem& pr, const SchemeConfig& scheme)
{
    FaceParameters face;
    face.transmissibility = pr.transmissibility();
    face.gravity = 1.0;
    face.delta_z = pr.g_dz;
    // Representative densities are the left-cell values.
    face.g_ref = std::max(pr.rho_left[0], pr.rho_left[1]) * pr.g_dz;
    // p_cap,g(S_g) = -P_c(1 - S_g), so p_cap,g(0.8) - p_cap,g(0.2) = P_c(0.8) - P_c(0.2).
    face.c_ref = {0.0, pr.capillary(0.8) - pr.capillary(0.2), 0.0};
    for (int l = 0; l < 2; ++l) face.gamma[l] = gamma_coefficient(pr.relperm[l], scheme.alpha);
    return face;
}

template <class T>
SideState<T> cell_side(const OneCellProblem& pr, const T& p, const T& sw, const std::array<double, 2>& rho)
{
    SideState<T> s;
    s.pressure = p;
    s.saturation[0] = sw;
    s.saturation[1] = 1.0 - sw;
    for (int l = 0; l < 2; ++l) {
        s.density[l] = T(rho[l]);
        s.mobility[l] = pr.relperm[l](s.saturation[l]) / pr.viscosity[l];
    }
    s.capillary[0] = T(0.0);
    s.capillary[1] = -pr.capillary.apply(sw);
    return s;
}

template <class T>
FaceFlux<T> flux_at(const OneCellProblem& pr, const SchemeConfig& scheme, const T& p, const T& sw)
{
    const auto left = cell_side(pr, p, sw, pr.rho_left);
    const auto right = cell_side(pr, T(pr.p_right), T(pr.sw_right), pr.rho_right);
    return compute_face_flux(2, left, right, one_cell_face(pr, scheme), scheme);
}

template <class T>
std::array<T, 2> residual_at(const OneCellProblem& pr, const SchemeConfig& scheme, const T& p, const T& sw)
{
    const auto flux = flux_at(pr, scheme, p, sw);
    const double acc = pr.pore_volume() / pr.dt;
    const double sg_prev = 1.0 - pr.sw_previous;
    return {acc * pr.rho_left[0] * (sw - pr.sw_previous) + flux.component_flux[0],
            acc * pr.rho_left[1] * ((1.0 - sw) - sg_prev) + flux.component_flux[1]};
}

std::vector<double> linspace(double a, double b, int n)
{
    std::vector<double> v(n);
    for (int k = 0; k < n; ++k) v[k] = n == 1 ? a : a + (b - a) * k / (n - 1);
    return v;
}

bool positive(double v) { return v >= 0.0; }

template <class F>
FieldSample sample(const OneCellProblem& pr, const SchemeConfig& scheme, int resolution, std::string quantity, F f)
{
    if (resolution < 32) throw std::invalid_argument("surface: resolution must be >= 32 per axis");
    pr.validate();
    scheme.validate();
    FieldSample out;
    out.quantity = std::move(quantity);
    out.p = linspace(pr.p_min, pr.p_max, resolution);
    out.s = linspace(pr.s_min, pr.s_max, resolution);
    out.loci = all_loci();
    out.value.resize(out.p.size() * out.s.size());
    out.locus_fields.assign(out.loci.size(), std::vector<double>(out.value.size()));
    for (std::size_t is = 0; is < out.s.size(); ++is)
        for (std::size_t ip = 0; ip < out.p.size(); ++ip) {
            const std::size_t k = is * out.p.size() + ip;
            out.value[k] = f(out.p[ip], out.s[is]);
            for (std::size_t m = 0; m < out.loci.size(); ++m)
                out.locus_fields[m][k] = locus_value(pr, scheme, out.loci[m], out.p[ip], out.s[is]);
        }
    return out;
}

std::array<double, 2> solve2(const std::array<std::array<double, 2>, 2>& a, const std::array<double, 2>& b)
{
    const double det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    if (det == 0.0 || !std::isfinite(det)) throw std::runtime_error("one-cell: singular Jacobian");
    return {(b[0] * a[1][1] - a[0][1] * b[1]) / det, (a[0][0] * b[1] - a[1][0] * b[0]) / det};
}

}  // namespace

OneCellProblem OneCellProblem::defaults()
{
    OneCellProblem pr;
    const auto& table = reference_capillary_table();
    std::vector<double> s, p;
    for (const auto& [sk, pk] : table) {
        s.push_back(sk);
        p.push_back(pk);
    }
    pr.capillary = CapillarySpline::natural(s, p, pr.capillary_scale);
    return pr;
}

void OneCellProblem::validate() const
{
    if (!(sw_right >= 0.0 && sw_right <= 1.0)) throw std::invalid_argument("one-cell: boundary saturation outside [0, 1]");
    if (!(sw_previous >= 0.0 && sw_previous <= 1.0))
        throw std::invalid_argument("one-cell: previous saturation outside [0, 1]");
    if (!(permeability > 0.0) || !(porosity > 0.0 && porosity <= 1.0) || !(area > 0.0) || !(distance > 0.0))
        throw std::invalid_argument("one-cell: invalid rock or geometry");
    if (!(dt > 0.0)) throw std::invalid_argument("one-cell: dt must be positive");
    if (!(p_max > p_min) || !(s_max > s_min) || s_min < 0.0 || s_max > 1.0)
        throw std::invalid_argument("one-cell: invalid sampling window");
    for (int l = 0; l < 2; ++l) {
        if (!(rho_left[l] > 0.0) || !(rho_right[l] > 0.0)) throw std::invalid_argument("one-cell: densities must be positive");
        if (!(viscosity[l] > 0.0)) throw std::invalid_argument("one-cell: viscosity must be positive");
        relperm[l].validate();
    }
}

std::string LocusId::name() const
{
    switch (kind) {
    case LocusKind::phase_potential: return phase == 0 ? "dphi_w" : "dphi_g";
    case LocusKind::total_flux: return "total";
    case LocusKind::capillary: return "capillary";
    }
    return "unknown";
}

std::vector<LocusId> all_loci()
{
    return {{LocusKind::phase_potential, 0}, {LocusKind::phase_potential, 1}, {LocusKind::total_flux, 0},
            {LocusKind::capillary, 0}};
}

std::vector<LocusId> kink_loci(const SchemeConfig& scheme, bool capillary)
{
    std::vector<LocusId> out;
    auto add = [&](LocusId id) {
        if (std::find(out.begin(), out.end(), id) == out.end()) out.push_back(id);
    };
    const bool ppu_somewhere = scheme.formulation == Formulation::standard || scheme.flow == FlowUpwinding::ppu ||
                               scheme.transport == TransportUpwinding::ppu;
    if (ppu_somewhere) {
        add({LocusKind::phase_potential, 0});
        add({LocusKind::phase_potential, 1});
    }
    if (scheme.formulation != Formulation::standard && scheme.transport == TransportUpwinding::hu) {
        add({LocusKind::total_flux, 0});
        if (capillary) add({LocusKind::capillary, 0});
    }
    return out;
}

FaceFlux<double> one_cell_flux(const OneCellProblem& problem, const SchemeConfig& scheme, double p, double sw)
{
    return flux_at(problem, scheme, p, sw);
}

double locus_value(const OneCellProblem& problem, const SchemeConfig& scheme, const LocusId& locus, double p, double sw)
{
    const auto f = flux_at(problem, scheme, p, sw);
    switch (locus.kind) {
    case LocusKind::phase_potential: return f.potential_diff[locus.phase];
    case LocusKind::total_flux: return f.total;
    case LocusKind::capillary: return f.capillary_diff[0] - f.capillary_diff[1];
    }
    return 0.0;
}

double OneCellResidual::norm() const { return std::hypot(value[0], value[1]); }

OneCellResidual one_cell_residual(const OneCellProblem& problem, const SchemeConfig& scheme, double p, double sw)
{
    const auto r = residual_at(problem, scheme, D2::variable(p, 0), D2::variable(sw, 1));
    OneCellResidual out;
    for (int c = 0; c < 2; ++c) {
        out.value[c] = r[c].value();
        out.jacobian[c] = {r[c].derivative(0), r[c].derivative(1)};
    }
    return out;
}

double one_cell_total(const OneCellProblem& problem, const SchemeConfig& scheme, double p, double sw)
{
    return flux_at(problem, scheme, p, sw).total;
}

std::optional<std::size_t> FieldSample::locus_index(const LocusId& id) const
{
    for (std::size_t k = 0; k < loci.size(); ++k)
        if (loci[k] == id) return k;
    return std::nullopt;
}

FieldSample velocity_surface(const OneCellProblem& problem, const SchemeConfig& scheme, int resolution)
{
    const char* name = scheme.formulation == Formulation::total_mass ? "total_mass_flux" : "total_velocity";
    return sample(problem, scheme, resolution, name,
                  [&](double p, double s) { return one_cell_total(problem, scheme, p, s); });
}

FieldSample residual_surface(const OneCellProblem& problem, const SchemeConfig& scheme, int resolution)
{
    return sample(problem, scheme, resolution, "residual_norm", [&](double p, double s) {
        const auto r = residual_at(problem, scheme, p, s);
        return std::hypot(r[0], r[1]);
    });
}

FieldSample phase_flow_surface(const OneCellProblem& problem, const SchemeConfig& scheme, int phase, int resolution)
{
    if (phase < 0 || phase > 1) throw std::invalid_argument("phase flow surface: phase must be 0 or 1");
    return sample(problem, scheme, resolution, phase == 0 ? "flow_flux_w" : "flow_flux_g", [&](double p, double s) {
        const auto f = flux_at(problem, scheme, p, s);
        return problem.transmissibility() * f.flow_mobility[phase] * f.potential_diff[phase];
    });
}

std::vector<LocusPoint> trace_locus(const FieldSample& field, const LocusId& locus)
{
    const auto idx = field.locus_index(locus);
    if (!idx) throw std::invalid_argument("trace_locus: locus not sampled");
    std::vector<LocusPoint> pts;
    const std::size_t nx = field.p.size(), ns = field.s.size();
    for (std::size_t is = 0; is < ns; ++is)
        for (std::size_t ip = 0; ip + 1 < nx; ++ip) {
            const double a = field.locus_at(*idx, ip, is), b = field.locus_at(*idx, ip + 1, is);
            if (positive(a) == positive(b)) continue;
            const double t = a / (a - b);
            pts.push_back({field.p[ip] + t * (field.p[ip + 1] - field.p[ip]), field.s[is]});
        }
    for (std::size_t ip = 0; ip < nx; ++ip)
        for (std::size_t is = 0; is + 1 < ns; ++is) {
            const double a = field.locus_at(*idx, ip, is), b = field.locus_at(*idx, ip, is + 1);
            if (positive(a) == positive(b)) continue;
            const double t = a / (a - b);
            pts.push_back({field.p[ip], field.s[is] + t * (field.s[is + 1] - field.s[is])});
        }
    return pts;
}

KinkMeasure kink_measure(const FieldSample& field, const LocusId& locus)
{
    const auto idx = field.locus_index(locus);
    if (!idx) throw std::invalid_argument("kink_measure: locus not sampled");
    const std::size_t nx = field.p.size(), ns = field.s.size();
    if (nx < 4 || ns < 3) throw std::invalid_argument("kink_measure: field too small");
    const double hp = field.p[1] - field.p[0];
    const double hs = field.s[1] - field.s[0];
    KinkMeasure m;

    for (std::size_t is = 0; is < ns; ++is)
        for (std::size_t ip = 1; ip + 2 < nx; ++ip) {
            if (positive(field.locus_at(*idx, ip, is)) == positive(field.locus_at(*idx, ip + 1, is))) continue;
            const double left = (field.at(ip, is) - field.at(ip - 1, is)) / hp;
            const double right = (field.at(ip + 2, is) - field.at(ip + 1, is)) / hp;
            m.kink = std::max(m.kink, std::abs(right - left));
            ++m.crossings;
        }
    if (m.crossings == 0) throw std::runtime_error("kink_measure: locus " + locus.name() + " not found in the domain");

    // Downwind side of the locus: the left cell is downstream (locus function
    // negative). Stencils straddling any sampled locus are skipped.
    for (std::size_t ip = 0; ip < nx; ++ip)
        for (std::size_t is = 1; is + 1 < ns; ++is) {
            if (field.locus_at(*idx, ip, is) >= 0.0) continue;
            bool straddles = false;
            for (std::size_t k = 0; k < field.loci.size() && !straddles; ++k) {
                const bool s0 = positive(field.locus_at(k, ip, is - 1));
                straddles = s0 != positive(field.locus_at(k, ip, is)) || s0 != positive(field.locus_at(k, ip, is + 1));
            }
            if (straddles) continue;
            const double d2 = (field.at(ip, is + 1) - 2.0 * field.at(ip, is) + field.at(ip, is - 1)) / (hs * hs);
            m.bend = std::max(m.bend, std::abs(d2));
        }
    return m;
}

double locus_slope_jump(const OneCellProblem& problem, const SchemeConfig& scheme, const LocusId& locus, double sw,
                        double offset)
{
    auto g = [&](double p) { return locus_value(problem, scheme, locus, p, sw); };
    constexpr int scan = 2000;
    double a = problem.p_min, b = a;
    bool found = false;
    for (int k = 1; k <= scan && !found; ++k) {
        b = problem.p_min + (problem.p_max - problem.p_min) * k / scan;
        if (positive(g(a)) != positive(g(b))) found = true;
        else a = b;
    }
    if (!found) throw std::runtime_error("locus_slope_jump: locus " + locus.name() + " not crossed at this saturation");
    for (int it = 0; it < 200 && b - a > 1e-13; ++it) {
        const double mid = 0.5 * (a + b);
        if (positive(g(mid)) == positive(g(a))) a = mid;
        else b = mid;
    }
    const double root = 0.5 * (a + b);
    auto slope = [&](double p) { return flux_at(problem, scheme, D2::variable(p, 0), D2(sw)).total.derivative(0); };
    return std::abs(slope(root + offset) - slope(root - offset));
}

OneCellSolution solve_one_cell_from(const OneCellProblem& problem, const SchemeConfig& scheme, double p0, double s0,
                                    int max_iterations)
{
    OneCellSolution sol;
    double p = p0, s = std::clamp(s0, 0.0, 1.0);
    for (int it = 0; it <= max_iterations; ++it) {
        const auto r = one_cell_residual(problem, scheme, p, s);
        sol.residual_norm = r.norm();
        sol.iterations = it;
        if (!std::isfinite(sol.residual_norm)) break;
        if (sol.residual_norm < 1e-11) {
            sol.converged = true;
            break;
        }
        if (it == max_iterations) break;
        std::array<double, 2> d{};
        try {
            d = solve2(r.jacobian, {-r.value[0], -r.value[1]});
        } catch (const std::runtime_error&) {
            break;
        }
        p += d[0];
        s = std::clamp(s + d[1], 0.0, 1.0);
    }
    sol.p = p;
    sol.sw = s;
    const auto f = flux_at(problem, scheme, p, s);
    sol.total = f.total;
    sol.mass_flux = f.component_flux[0] + f.component_flux[1];
    return sol;
}

OneCellSolution solve_one_cell(const OneCellProblem& problem, const SchemeConfig& scheme, int starts_per_axis)
{
    if (starts_per_axis < 1) throw std::invalid_argument("solve_one_cell: need at least one start per axis");
    std::vector<OneCellSolution> found;
    OneCellSolution best;
    best.residual_norm = INFINITY;
    for (int a = 0; a < starts_per_axis; ++a)
        for (int b = 0; b < starts_per_axis; ++b) {
            const double fp = (a + 0.5) / starts_per_axis, fs = (b + 0.5) / starts_per_axis;
            const double p0 = problem.p_min + fp * (problem.p_max - problem.p_min);
            const double s0 = problem.s_min + fs * (problem.s_max - problem.s_min);
            const auto sol = solve_one_cell_from(problem, scheme, p0, s0);
            if (!sol.converged) continue;
            const bool known = std::any_of(found.begin(), found.end(), [&](const OneCellSolution& o) {
                return std::abs(o.p - sol.p) < 1e-6 && std::abs(o.sw - sol.sw) < 1e-6;
            });
            if (!known) found.push_back(sol);
            if (sol.residual_norm < best.residual_norm) best = sol;
        }
    best.distinct_solutions = static_cast<int>(found.size());
    return best;
}

NewtonPath newton_path(const OneCellProblem& problem, const SchemeConfig& scheme, LocusPoint start, double step_scale,
                       double tolerance, int max_steps)
{
    if (!(step_scale > 0.0 && step_scale <= 0.1)) throw std::invalid_argument("newton_path: step scale must be in (0, 0.1]");
    const auto loci = all_loci();
    const auto kinks = kink_loci(scheme, !problem.capillary.is_zero());
    NewtonPath path;
    path.crossings.assign(loci.size(), 0);
    auto signs = [&](const LocusPoint& x) {
        std::vector<bool> s;
        for (const auto& id : loci) s.push_back(positive(locus_value(problem, scheme, id, x.p, x.s)));
        return s;
    };

    LocusPoint x{start.p, std::clamp(start.s, 0.0, 1.0)};
    path.points.push_back(x);
    auto prev = signs(x);
    for (int step = 0; step <= max_steps; ++step) {
        const auto r = one_cell_residual(problem, scheme, x.p, x.s);
        path.final_residual = r.norm();
        if (path.final_residual < tolerance) {
            path.terminated = true;
            break;
        }
        if (step == max_steps || !std::isfinite(path.final_residual)) break;
        std::array<double, 2> d{};
        try {
            d = solve2(r.jacobian, {-r.value[0], -r.value[1]});
        } catch (const std::runtime_error&) {
            break;
        }
        x.p += step_scale * d[0];
        x.s = std::clamp(x.s + step_scale * d[1], 0.0, 1.0);
        path.points.push_back(x);
        const auto now = signs(x);
        for (std::size_t k = 0; k < loci.size(); ++k)
            if (now[k] != prev[k]) ++path.crossings[k];
        prev = now;
    }
    for (std::size_t k = 0; k < loci.size(); ++k) {
        if (std::find(kinks.begin(), kinks.end(), loci[k]) == kinks.end()) continue;
        path.kink_crossings += path.crossings[k];
        if (path.crossings[k] > 0) ++path.distinct_kink_loci;
    }
    return path;
}

std::array<LocusPoint, 4> corner_starts(const OneCellProblem& problem)
{
    const double dp = 0.05 * (problem.p_max - problem.p_min);
    const double ds = 0.05 * (problem.s_max - problem.s_min);
    return {{{problem.p_min + dp, problem.s_min + ds},
             {problem.p_max - dp, problem.s_min + ds},
             {problem.p_min + dp, problem.s_max - ds},
             {problem.p_max - dp, problem.s_max - ds}}};
}

void write_field(const FieldSample& field, std::ostream& out)
{
    out << std::setprecision(17);
    out << "p,s," << field.quantity;
    for (const auto& id : field.loci) out << ',' << id.name();
    out << '\n';
    for (std::size_t is = 0; is < field.s.size(); ++is)
        for (std::size_t ip = 0; ip < field.p.size(); ++ip) {
            out << field.p[ip] << ',' << field.s[is] << ',' << field.at(ip, is);
            for (std::size_t k = 0; k < field.loci.size(); ++k) out << ',' << field.locus_at(k, ip, is);
            out << '\n';
        }
}

void write_loci(const FieldSample& field, std::ostream& out)
{
    out << std::setprecision(17) << "locus,p,s\n";
    for (const auto& id : field.loci)
        for (const auto& pt : trace_locus(field, id)) out << id.name() << ',' << pt.p << ',' << pt.s << '\n';
}

void write_path(const NewtonPath& path, std::ostream& out)
{
    out << std::setprecision(17) << "step,p,s\n";
    for (std::size_t k = 0; k < path.points.size(); ++k)
        out << k << ',' << path.points[k].p << ',' << path.points[k].s << '\n';
}

}  // namespace huflow
