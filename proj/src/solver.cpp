#include "huflow/solver.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <type_traits>

namespace huflow {

namespace {

using FaceDual = Dual<2 * kMaxPhases>;
using CellDual = Dual<kMaxPhases>;

template <class T>
T variable(double value, int index)
{
    if constexpr (std::is_same_v<T, double>) return value;
    else return T::variable(value, index);
}

}  // namespace

void SourceSpec::validate(std::size_t cells, int phases) const
{
    std::vector<char> fixed(cells, 0);
    for (auto c : dirichlet_cells) {
        if (c >= cells) throw std::invalid_argument("sources: Dirichlet cell out of range");
        fixed[c] = 1;
    }
    for (const auto& r : rates) {
        if (r.cell >= cells) throw std::invalid_argument("sources: rate cell out of range");
        if (r.phase < 0 || r.phase >= phases) throw std::invalid_argument("sources: rate phase out of range");
        if (fixed[r.cell]) throw std::invalid_argument("sources: cell is both Dirichlet and rate-sourced");
        if (!std::isfinite(r.rate)) throw std::invalid_argument("sources: rate must be finite");
    }
}

void NewtonSettings::validate() const
{
    if (max_iterations < 1) throw std::invalid_argument("newton: max_iterations must be >= 1");
    if (!(residual_tolerance > 0.0)) throw std::invalid_argument("newton: residual tolerance must be positive");
    if (!(saturation_tolerance > 0.0) || !(pressure_tolerance > 0.0))
        throw std::invalid_argument("newton: update tolerances must be positive");
    if (!(max_saturation_change > 0.0)) throw std::invalid_argument("newton: max saturation change must be positive");
    if (max_cut_depth < 0) throw std::invalid_argument("newton: max cut depth must be >= 0");
    if (!(residual_floor > 0.0)) throw std::invalid_argument("newton: residual floor must be positive");
}

std::vector<double> RunReport::accepted_dts() const
{
    std::vector<double> out;
    for (const auto& s : steps)
        if (s.converged) out.push_back(s.dt);
    return out;
}

std::vector<double> build_schedule(std::span<const double> ramp, double dt, double end)
{
    if (!(dt > 0.0) || !(end > 0.0)) throw std::invalid_argument("schedule: dt and end time must be positive");
    std::vector<double> steps;
    double t = 0.0;
    const double tiny = 1e-9 * dt;
    auto push = [&](double h) {
        if (!(h > 0.0)) throw std::invalid_argument("schedule: ramp steps must be positive");
        const double take = std::min(h, end - t);
        steps.push_back(take);
        t += take;
    };
    for (double h : ramp) {
        if (end - t <= tiny) break;
        push(h);
    }
    while (end - t > tiny) push(dt);
    return steps;
}

std::pair<double, double> state_change(const State& a, const State& b)
{
    double ds = 0.0, dp = 0.0;
    for (std::size_t c = 0; c < a.cell_count(); ++c) {
        for (int l = 0; l < kMaxPhases; ++l) ds = std::max(ds, std::abs(a.saturation[c][l] - b.saturation[c][l]));
        dp = std::max(dp, std::abs(a.pressure[c] - b.pressure[c]) / std::max(std::abs(b.pressure[c]), 1.0));
    }
    return {ds, dp};
}

struct Simulator::LinearSolver {
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    Eigen::Index analyzed_nonzeros = -1;
};

Simulator::Simulator(Grid grid, FluidSystem fluids, SchemeConfig scheme, NewtonSettings settings, SourceSpec sources)
    : grid_(std::move(grid)),
      fluids_(std::move(fluids)),
      scheme_(scheme),
      settings_(settings),
      sources_(std::move(sources)),
      linear_(std::make_unique<LinearSolver>())
{
    scheme_.validate();
    settings_.validate();
    const int np = fluids_.phase_count();
    sources_.validate(grid_.cell_count(), np);

    primary_.push_back(-1);
    for (int l = 0; l < np; ++l)
        if (l != fluids_.reference_phase()) primary_.push_back(l);

    dirichlet_.assign(grid_.cell_count(), 0);
    for (auto c : sources_.dirichlet_cells) dirichlet_[c] = 1;
    pin_pressure_ = fluids_.incompressible() && sources_.dirichlet_cells.empty();

    faces_.reserve(grid_.connections().size());
    for (const auto& conn : grid_.connections())
        faces_.push_back(make_face_parameters(fluids_, scheme_, conn.transmissibility, conn.delta_z));
}

Simulator::~Simulator() = default;
Simulator::Simulator(Simulator&&) noexcept = default;
Simulator& Simulator::operator=(Simulator&&) noexcept = default;

void Simulator::validate_state(const State& state) const
{
    const std::size_t n = grid_.cell_count();
    if (state.pressure.size() != n || state.saturation.size() != n)
        throw std::invalid_argument("state: size does not match grid (" + std::to_string(n) + " cells)");
    const int np = fluids_.phase_count();
    for (std::size_t c = 0; c < n; ++c) {
        if (!std::isfinite(state.pressure[c])) throw std::invalid_argument("state: non-finite pressure");
        double sum = 0.0;
        for (int l = 0; l < np; ++l) {
            const double s = state.saturation[c][l];
            if (!(s >= 0.0 && s <= 1.0)) throw std::invalid_argument("state: saturation outside [0, 1]");
            sum += s;
        }
        if (std::abs(sum - 1.0) > 1e-12) throw std::invalid_argument("state: saturations do not sum to 1");
    }
}

template <class T>
SideState<T> Simulator::side(const State& state, std::size_t cell, int offset) const
{
    const int np = fluids_.phase_count();
    const int ref = fluids_.reference_phase();
    std::array<T, kMaxPhases> s{};
    T rest(1.0);
    for (int k = 1; k < np; ++k) {
        const int l = primary_[k];
        s[l] = variable<T>(state.saturation[cell][l], offset + k);
        rest -= s[l];
    }
    s[ref] = rest;
    return make_side_state(fluids_, variable<T>(state.pressure[cell], offset), s);
}

Simulator::Assembly Simulator::assemble(const State& state, const State& previous, double dt, bool with_jacobian) const
{
    if (!(dt > 0.0)) throw std::invalid_argument("assemble: dt must be positive");
    validate_state(previous);
    if (state.cell_count() != grid_.cell_count()) throw std::invalid_argument("assemble: state size mismatch");

    const int np = fluids_.phase_count();
    const int ref = fluids_.reference_phase();
    const std::size_t n = grid_.cell_count();
    Assembly a;
    a.residual = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n * np));
    a.scale = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n * np));
    std::vector<Eigen::Triplet<double>> triplets;
    if (with_jacobian) triplets.reserve(n * np * np + grid_.connections().size() * 4 * np * np);

    auto row_of = [np](std::size_t cell, int c) { return static_cast<Eigen::Index>(cell * np + c); };
    auto pinned_row = [&](std::size_t cell, int c) {
        return dirichlet_[cell] || (pin_pressure_ && cell == 0 && c == ref);
    };

    // Accumulation and sources.
    for (std::size_t i = 0; i < n; ++i) {
        const double pv = grid_.pore_volume(i);
        double mass_prev = 0.0;
        for (int c = 0; c < np; ++c)
            mass_prev += fluids_.phase(c).density(previous.pressure[i]) * previous.saturation[i][c];
        const double scale = std::max(pv * mass_prev / dt, settings_.residual_floor);

        if (dirichlet_[i]) {
            for (int k = 0; k < np; ++k) {
                const double x = k == 0 ? state.pressure[i] : state.saturation[i][primary_[k]];
                const double x0 = k == 0 ? previous.pressure[i] : previous.saturation[i][primary_[k]];
                a.residual[row_of(i, k)] = x - x0;
                if (with_jacobian) triplets.emplace_back(row_of(i, k), row_of(i, k), 1.0);
            }
            continue;
        }

        const auto s = side<CellDual>(state, i, 0);
        for (int c = 0; c < np; ++c) {
            const Eigen::Index r = row_of(i, c);
            a.scale[r] = scale;
            if (pinned_row(i, c)) {
                a.scale[r] = 1.0;
                a.residual[r] = state.pressure[i] - previous.pressure[i];
                if (with_jacobian) triplets.emplace_back(r, row_of(i, 0), 1.0);
                continue;
            }
            const double m_prev = fluids_.phase(c).density(previous.pressure[i]) * previous.saturation[i][c];
            const CellDual acc = (s.density[c] * s.saturation[c] - m_prev) * (pv / dt);
            a.residual[r] += acc.value();
            if (with_jacobian)
                for (int k = 0; k < np; ++k) triplets.emplace_back(r, row_of(i, k), acc.derivative(k));
        }
    }
    for (const auto& src : sources_.rates) {
        const Eigen::Index r = row_of(src.cell, src.phase);
        if (!pinned_row(src.cell, src.phase)) a.residual[r] -= src.rate;
    }

    // Interface fluxes.
    const auto conns = grid_.connections();
    for (std::size_t f = 0; f < conns.size(); ++f) {
        const auto& conn = conns[f];
        if (conn.barrier) continue;
        const auto i = static_cast<std::size_t>(conn.i);
        const auto j = static_cast<std::size_t>(conn.j);
        if (with_jacobian) {
            const auto si = side<FaceDual>(state, i, 0);
            const auto sj = side<FaceDual>(state, j, kMaxPhases);
            const auto flux = compute_face_flux(np, si, sj, faces_[f], scheme_);
            for (int c = 0; c < np; ++c) {
                const FaceDual& F = flux.component_flux[c];
                for (const auto& [cell, sign] : {std::pair{i, 1.0}, std::pair{j, -1.0}}) {
                    if (pinned_row(cell, c)) continue;
                    const Eigen::Index r = row_of(cell, c);
                    a.residual[r] += sign * F.value();
                    for (int k = 0; k < np; ++k) {
                        triplets.emplace_back(r, row_of(i, k), sign * F.derivative(k));
                        triplets.emplace_back(r, row_of(j, k), sign * F.derivative(kMaxPhases + k));
                    }
                }
            }
        } else {
            const auto si = side<double>(state, i, 0);
            const auto sj = side<double>(state, j, 0);
            const auto flux = compute_face_flux(np, si, sj, faces_[f], scheme_);
            for (int c = 0; c < np; ++c) {
                if (!pinned_row(i, c)) a.residual[row_of(i, c)] += flux.component_flux[c];
                if (!pinned_row(j, c)) a.residual[row_of(j, c)] -= flux.component_flux[c];
            }
        }
    }

    if (with_jacobian) {
        const auto size = static_cast<Eigen::Index>(n * np);
        a.jacobian.resize(size, size);
        a.jacobian.setFromTriplets(triplets.begin(), triplets.end());
        a.jacobian.makeCompressed();
    }
    return a;
}

Eigen::VectorXd Simulator::residual(const State& state, const State& previous, double dt) const
{
    return assemble(state, previous, dt, false).residual;
}

Eigen::VectorXd Simulator::pack(const State& state) const
{
    const int np = fluids_.phase_count();
    Eigen::VectorXd x(static_cast<Eigen::Index>(state.cell_count() * np));
    for (std::size_t c = 0; c < state.cell_count(); ++c) {
        x[static_cast<Eigen::Index>(c * np)] = state.pressure[c];
        for (int k = 1; k < np; ++k) x[static_cast<Eigen::Index>(c * np + k)] = state.saturation[c][primary_[k]];
    }
    return x;
}

State Simulator::unpack(const Eigen::VectorXd& x) const
{
    const int np = fluids_.phase_count();
    const std::size_t n = static_cast<std::size_t>(x.size()) / np;
    State s;
    s.pressure.resize(n);
    s.saturation.assign(n, {});
    for (std::size_t c = 0; c < n; ++c) {
        s.pressure[c] = x[static_cast<Eigen::Index>(c * np)];
        double rest = 1.0;
        for (int k = 1; k < np; ++k) {
            const double v = x[static_cast<Eigen::Index>(c * np + k)];
            s.saturation[c][primary_[k]] = v;
            rest -= v;
        }
        s.saturation[c][fluids_.reference_phase()] = rest;
    }
    return s;
}

int Simulator::apply_update(State& state, const Eigen::VectorXd& update) const
{
    const int np = fluids_.phase_count();
    const int ref = fluids_.reference_phase();
    int damped_cells = 0;
    for (std::size_t c = 0; c < state.cell_count(); ++c) {
        const auto base = static_cast<Eigen::Index>(c * np);
        state.pressure[c] += update[base];

        std::array<double, kMaxPhases> ds{};
        double ds_ref = 0.0;
        double largest = 0.0;
        for (int k = 1; k < np; ++k) {
            ds[k] = update[base + k];
            ds_ref -= ds[k];
            largest = std::max(largest, std::abs(ds[k]));
        }
        largest = std::max(largest, std::abs(ds_ref));

        bool damped = false;
        if (settings_.chop == ChopMode::appleyard && largest > settings_.max_saturation_change) {
            const double factor = settings_.max_saturation_change / largest;
            for (int k = 1; k < np; ++k) ds[k] *= factor;
            damped = true;
        }

        auto& sat = state.saturation[c];
        double sum = 0.0;
        for (int k = 1; k < np; ++k) {
            const int l = primary_[k];
            const double raw = sat[l] + ds[k];
            sat[l] = std::clamp(raw, 0.0, 1.0);
            damped = damped || sat[l] != raw;
            sum += sat[l];
        }
        if (sum > 1.0) {
            for (int k = 1; k < np; ++k) sat[primary_[k]] /= sum;
            sat[ref] = 0.0;
            damped = true;
        } else {
            sat[ref] = 1.0 - sum;
        }
        damped_cells += damped ? 1 : 0;
    }
    return damped_cells;
}

double Simulator::normalized_residual_norm(const Assembly& a) const
{
    return a.residual.cwiseQuotient(a.scale).norm();
}

bool Simulator::check_convergence(double residual_norm, double max_ds, double max_rel_dp, bool have_update) const
{
    if (!(residual_norm < settings_.residual_tolerance)) return false;
    if (!settings_.update_checks || !have_update) return true;
    return max_ds < settings_.saturation_tolerance && max_rel_dp < settings_.pressure_tolerance;
}

NewtonReport Simulator::newton(State& state, const State& previous, double dt) const
{
    NewtonReport rep;
    double last_ds = 0.0, last_dp = 0.0;
    bool have_update = false;
    for (;;) {
        const Assembly a = assemble(state, previous, dt);
        const double norm = normalized_residual_norm(a);
        rep.residual_history.push_back(norm);
        if (!std::isfinite(norm)) break;
        if (check_convergence(norm, last_ds, last_dp, have_update)) {
            rep.converged = true;
            break;
        }
        if (rep.iterations >= settings_.max_iterations) break;

        // Row scaling by the mass normalisation keeps cells comparable.
        Eigen::SparseMatrix<double> jac = a.jacobian;
        const Eigen::VectorXd inv = a.scale.cwiseInverse();
        jac = inv.asDiagonal() * jac;
        jac.makeCompressed();
        const Eigen::VectorXd rhs = -a.residual.cwiseProduct(inv);

        auto& lu = linear_->lu;
        if (linear_->analyzed_nonzeros != jac.nonZeros()) {
            lu.analyzePattern(jac);
            linear_->analyzed_nonzeros = jac.nonZeros();
        }
        lu.factorize(jac);
        if (lu.info() != Eigen::Success) break;
        const Eigen::VectorXd delta = lu.solve(rhs);
        if (lu.info() != Eigen::Success || !delta.allFinite()) break;

        const State before = state;
        rep.chops += apply_update(state, delta);
        ++rep.iterations;
        std::tie(last_ds, last_dp) = state_change(state, before);
        have_update = true;
        rep.max_saturation_update = last_ds;
        rep.max_relative_pressure_update = last_dp;
    }
    return rep;
}

RunReport Simulator::run(State initial, std::span<const double> schedule, const StepObserver& observer) const
{
    validate_state(initial);
    RunReport rep;
    State x = std::move(initial);
    double t = 0.0;
    int attempt = 0;

    std::function<bool(double, int, int)> advance = [&](double dt, int depth, int requested) -> bool {
        State trial = x;
        const NewtonReport nr = newton(trial, x, dt);
        StepRecord rec{attempt++, requested, t, dt, depth, nr.iterations, nr.chops, nr.converged};
        rep.steps.push_back(rec);
        rep.total_iterations += nr.iterations;
        if (nr.converged) {
            x = std::move(trial);
            t += dt;
            if (observer) observer(rec, x);
            return true;
        }
        rep.wasted_iterations += nr.iterations;
        if (depth >= settings_.max_cut_depth) return false;
        ++rep.cuts;
        return advance(0.5 * dt, depth + 1, requested) && advance(0.5 * dt, depth + 1, requested);
    };

    for (std::size_t r = 0; r < schedule.size(); ++r) {
        if (!(schedule[r] > 0.0)) throw std::invalid_argument("run: timestep sizes must be positive");
        if (!advance(schedule[r], 0, static_cast<int>(r))) {
            rep.aborted = true;
            break;
        }
    }
    rep.end_time = t;
    rep.final_state = std::move(x);
    return rep;
}

std::array<double, kMaxPhases> Simulator::component_masses(const State& state) const
{
    std::array<double, kMaxPhases> m{};
    for (std::size_t i = 0; i < state.cell_count(); ++i)
        for (int c = 0; c < fluids_.phase_count(); ++c)
            m[c] += grid_.pore_volume(i) * fluids_.phase(c).density(state.pressure[i]) * state.saturation[i][c];
    return m;
}

}  // namespace huflow
