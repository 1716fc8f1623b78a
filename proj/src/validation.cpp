#include "huflow/validation.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

namespace huflow {

namespace {

double uniform(std::mt19937_64& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

std::array<double, kMaxPhases> random_simplex(std::mt19937_64& rng, int phases, double floor = 0.0)
{
    std::array<double, kMaxPhases> s{};
    double sum = 0.0;
    for (int l = 0; l < phases; ++l) {
        s[l] = floor - std::log(uniform(rng, 1e-12, 1.0));
        sum += s[l];
    }
    for (int l = 0; l < phases; ++l) s[l] /= sum;
    return s;
}

std::string format(double v)
{
    std::ostringstream os;
    os << std::setprecision(3) << std::scientific << v;
    return os.str();
}

const std::vector<SchemeConfig>& four_schemes()
{
    static const std::vector<SchemeConfig> s = {SchemeConfig::ppu(), SchemeConfig::ppu_hu(), SchemeConfig::wahu_tv(),
                                                SchemeConfig::wahu_tm()};
    return s;
}

double mobility_scale(const RandomFace& f, Formulation form)
{
    const auto mi = side_mobilities(f.i, form, f.phases);
    const auto mj = side_mobilities(f.j, form, f.phases);
    double s = 0.0;
    for (int l = 0; l < f.phases; ++l) s += mi[l] + mj[l];
    return f.face.transmissibility * s;
}

}  // namespace

RandomFace random_face(std::mt19937_64& rng, int phases)
{
    RandomFace f;
    f.phases = phases;
    std::array<double, kMaxPhases> exponent{}, viscosity{}, density{};
    for (int l = 0; l < phases; ++l) {
        exponent[l] = uniform(rng, 1.0, 3.0);
        viscosity[l] = uniform(rng, 2e-4, 1e-3);
        density[l] = uniform(rng, 100.0, 1500.0);
    }
    const int ref = 1;
    auto fill = [&](SideState<double>& s) {
        s.pressure = 1e7 + uniform(rng, -1e4, 1e4);
        s.saturation = random_simplex(rng, phases);
        for (int l = 0; l < phases; ++l) {
            s.density[l] = density[l];
            s.mobility[l] = std::pow(s.saturation[l], exponent[l]) / viscosity[l];
            s.capillary[l] = l == ref ? 0.0 : uniform(rng, -1e4, 1e4);
        }
    };
    fill(f.i);
    fill(f.j);
    f.face.transmissibility = uniform(rng, 0.5, 2.0);
    f.face.delta_z = uniform(rng, -3.0, 3.0);
    f.face.gravity = 9.81;
    double rho_max = 0.0;
    for (int l = 0; l < phases; ++l) rho_max = std::max(rho_max, density[l]);
    f.face.g_ref = rho_max * f.face.gravity * std::abs(f.face.delta_z);
    for (int l = 0; l < phases; ++l) {
        f.face.c_ref[l] = l == ref ? 0.0 : uniform(rng, 0.0, 1e4);
        // Mix of moderate, vanishing and large weights.
        const double pick = uniform(rng, 0.0, 1.0);
        f.face.gamma[l] = pick < 0.1 ? 0.0 : (pick < 0.2 ? uniform(rng, 100.0, 1e4) : uniform(rng, 0.0, 50.0));
    }
    return f;
}

CheckResult check_total_velocity_monotone(unsigned seed, int samples)
{
    std::mt19937_64 rng(seed);
    const std::vector<SchemeConfig> schemes = {SchemeConfig::wahu_tv(), SchemeConfig::ppu_hu(), SchemeConfig::wahu_tm()};
    double worst = 0.0;  // most negative normalised slope
    int evaluated = 0;
    for (int n = 0; n < samples; ++n) {
        const RandomFace f = random_face(rng, n % 2 ? 3 : 2);
        for (const auto& scheme : schemes) {
            const double scale = mobility_scale(f, scheme.formulation);
            for (int l = 0; l < f.phases; ++l) {
                // Raising p_l on side i alone shifts Delta p_l by +h.
                const double base = compute_face_flux(f.phases, f.i, f.j, f.face, scheme).potential_diff[l];
                const double h = 1e-3 * (1.0 + std::abs(base));
                auto total_at = [&](double shift) {
                    SideState<double> si = f.i;
                    si.capillary[l] -= shift;
                    return compute_face_flux(f.phases, si, f.j, f.face, scheme).total;
                };
                const double slope = (total_at(h) - total_at(-h)) / (2.0 * h);
                worst = std::min(worst, slope / scale);
                ++evaluated;
            }
        }
    }
    return {"total flux monotone in phase pressure differences", worst >= -1e-12,
            std::to_string(evaluated) + " slopes, min normalised slope " + format(worst)};
}

CheckResult check_weight_bounds(unsigned seed, int samples)
{
    std::mt19937_64 rng(seed);
    double beta_min = 1.0, beta_max = 0.0, p_min = 1.0, p_max = 0.0;
    for (int n = 0; n < samples; ++n) {
        const RandomFace f = random_face(rng, n % 2 ? 3 : 2);
        const auto flux = compute_face_flux(f.phases, f.i, f.j, f.face, SchemeConfig::wahu_tv());
        for (int l = 0; l < f.phases; ++l) {
            const auto dphi = Dual<1>::variable(flux.potential_diff[l], 0);
            const auto beta = wa_beta(dphi, f.face.gamma[l], f.face.g_ref, f.face.c_ref[l]);
            const double p = beta.value() + beta.derivative(0) * dphi.value();
            beta_min = std::min(beta_min, beta.value());
            beta_max = std::max(beta_max, beta.value());
            p_min = std::min(p_min, p);
            p_max = std::max(p_max, p);
        }
    }
    constexpr double ulp = 1e-15;
    const bool ok = beta_min > 0.0 && beta_max < 1.0 && p_min >= -ulp && p_max <= 1.0 + ulp;
    return {"weights bounded", ok,
            "beta in [" + format(beta_min) + ", " + format(beta_max) + "], P in [" + format(p_min) + ", " +
                format(p_max) + "]"};
}

CheckResult check_redistribution(unsigned seed, int samples)
{
    std::mt19937_64 rng(seed);
    double worst = 0.0;
    for (int n = 0; n < samples; ++n) {
        const RandomFace f = random_face(rng, n % 2 ? 3 : 2);
        for (const auto& label : SchemeConfig::labels()) {
            const auto scheme = SchemeConfig::from_label(label);
            if (scheme.formulation == Formulation::standard) continue;
            const auto flux = compute_face_flux(f.phases, f.i, f.j, f.face, scheme);
            double sum = 0.0, scale = std::abs(flux.total);
            for (int l = 0; l < f.phases; ++l) {
                sum += flux.phase_flux[l];
                scale += std::abs(flux.viscous[l]) + std::abs(flux.gravity[l]) + std::abs(flux.capillary[l]);
            }
            worst = std::max(worst, std::abs(sum - flux.total) / scale);
            if (scheme.formulation == Formulation::total_mass) {
                double mass = 0.0;
                for (int c = 0; c < f.phases; ++c) mass += flux.component_flux[c];
                worst = std::max(worst, std::abs(mass - flux.total) / scale);
            }
        }
    }
    return {"phase fluxes sum to the total", worst <= 1e-14, "max relative defect " + format(worst)};
}

CheckResult check_ppu_equivalence(unsigned seed, int samples)
{
    std::mt19937_64 rng(seed);
    const auto standard = SchemeConfig::ppu();
    const auto split = SchemeConfig::from_label("ppu-ppu");
    double worst = 0.0;
    for (int n = 0; n < samples; ++n) {
        const RandomFace f = random_face(rng, n % 2 ? 3 : 2);
        const auto a = compute_face_flux(f.phases, f.i, f.j, f.face, standard);
        const auto b = compute_face_flux(f.phases, f.i, f.j, f.face, split);
        double scale = 0.0;
        for (int l = 0; l < f.phases; ++l)
            scale += std::abs(a.component_flux[l]) + std::abs(b.viscous[l] * a.interface_density[l]);
        for (int c = 0; c < f.phases; ++c)
            worst = std::max(worst, std::abs(a.component_flux[c] - b.component_flux[c]) / std::max(scale, 1e-300));
    }
    return {"standard PPU equals the PPU-PPU split", worst <= 1e-12, "max relative difference " + format(worst)};
}

JacobianCheck jacobian_error(const SchemeConfig& scheme, int phases, unsigned seed, int samples)
{
    CaseSpec spec = builtin_case(phases == 2 ? "tilted_box_20_cap" : "barriers_cap");
    spec.grid.nx = 3;
    spec.grid.nz = 3;
    spec.grid.barriers = BarrierLayout::none;
    spec.grid.tilt_deg = 30.0;
    for (auto& p : spec.fluids.phases) p.compressibility = 1e-9;  // exercise the density derivatives
    const Simulator sim(make_grid(spec.grid), make_fluids(spec.fluids), scheme, make_newton_settings(spec.solver));

    std::mt19937_64 rng(seed);
    const double dt = 10.0 * kSecondsPerDay;
    JacobianCheck out;
    auto random_state = [&] {
        State s;
        for (std::size_t c = 0; c < sim.grid().cell_count(); ++c) {
            s.pressure.push_back(1e7 + uniform(rng, -5e4, 5e4));
            s.saturation.push_back(random_simplex(rng, phases, 0.2));
        }
        return s;
    };
    for (int n = 0; n < samples; ++n) {
        const State prev = random_state();
        const State state = random_state();
        const auto a = sim.assemble(state, prev, dt);
        const Eigen::MatrixXd jac(a.jacobian);
        const Eigen::VectorXd x = sim.pack(state);
        const Eigen::VectorXd r0 = a.residual;

        Eigen::MatrixXd fd(jac.rows(), jac.cols());
        bool switched = false;
        for (Eigen::Index k = 0; k < x.size() && !switched; ++k) {
            const double h = k % phases == 0 ? 1.0 : 1e-6;
            Eigen::VectorXd xp = x, xm = x;
            xp[k] += h;
            xm[k] -= h;
            const Eigen::VectorXd rp = sim.residual(sim.unpack(xp), prev, dt);
            const Eigen::VectorXd rm = sim.residual(sim.unpack(xm), prev, dt);
            const Eigen::VectorXd fwd = (rp - r0) / h, bwd = (r0 - rm) / h;
            fd.col(k) = (rp - rm) / (2.0 * h);
            const double col = std::max(jac.col(k).cwiseAbs().maxCoeff(), 1e-300);
            if ((fwd - bwd).cwiseAbs().maxCoeff() > 1e-3 * col) switched = true;
        }
        if (switched) {
            ++out.skipped;
            continue;
        }
        ++out.compared;
        for (Eigen::Index r = 0; r < jac.rows(); ++r) {
            const double row = std::max(jac.row(r).cwiseAbs().maxCoeff(), 1e-300);
            out.max_relative_error = std::max(out.max_relative_error, (jac.row(r) - fd.row(r)).cwiseAbs().maxCoeff() / row);
        }
    }
    return out;
}

CheckResult check_jacobian(unsigned seed, int samples)
{
    double worst = 0.0;
    int compared = 0, skipped = 0;
    for (const auto& scheme : four_schemes())
        for (int phases : {2, 3}) {
            const auto r = jacobian_error(scheme, phases, seed + phases, samples);
            worst = std::max(worst, r.max_relative_error);
            compared += r.compared;
            skipped += r.skipped;
        }
    return {"dual-number Jacobian matches finite differences", worst <= 1e-6 && compared > 0,
            std::to_string(compared) + " states compared, " + std::to_string(skipped) + " skipped near switches, max error " +
                format(worst)};
}

CheckResult check_mass_conservation()
{
    CaseSpec spec = builtin_case("seg1d_100");
    spec.grid.nz = 20;
    spec.grid.dz = 10.0;
    spec.schedule = {{5.0}, 100.0, 505.0};
    double worst = 0.0;
    bool completed = true;
    for (const auto& scheme : four_schemes()) {
        const auto out = run_case(spec, scheme);
        worst = std::max(worst, out.max_relative_mass_error);
        completed = completed && !out.report.aborted;
    }
    return {"closed-domain mass conserved", completed && worst <= 1e-10, "max relative mass error " + format(worst)};
}

CheckResult check_config_round_trip()
{
    int failures = 0;
    std::string first;
    for (const auto& name : builtin_case_names()) {
        const CaseSpec c = builtin_case(name);
        std::stringstream buf;
        serialize_case(c, buf);
        if (!(parse_case(buf, name) == c)) {
            if (!failures) first = name;
            ++failures;
        }
    }
    return {"config round trip", failures == 0,
            failures ? std::to_string(failures) + " cases differ, first " + first
                     : std::to_string(builtin_case_names().size()) + " builtin cases"};
}

CheckResult check_spline_knots()
{
    const auto& table = reference_capillary_table();
    std::vector<double> s, p;
    for (const auto& [sk, pk] : table) {
        s.push_back(sk);
        p.push_back(pk);
    }
    const auto spline = CapillarySpline::natural(s, p, 1.0);
    double worst = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k) worst = std::max(worst, std::abs(spline(s[k]) - p[k]) / std::abs(p[k]));
    return {"spline reproduces the table knots", worst <= 1e-12, "max relative knot error " + format(worst)};
}

std::vector<CheckResult> run_invariant_suite(unsigned seed, int samples)
{
    return {check_total_velocity_monotone(seed, samples),
            check_weight_bounds(seed, samples),
            check_redistribution(seed, samples),
            check_ppu_equivalence(seed, samples),
            check_jacobian(seed, std::max(1, samples / 100)),
            check_mass_conservation(),
            check_config_round_trip(),
            check_spline_knots()};
}

}  // namespace huflow
