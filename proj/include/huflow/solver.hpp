#pragma once

#include "huflow/fluid.hpp"
#include "huflow/flux.hpp"
#include "huflow/mesh.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <array>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace huflow {

/// Per-cell reference pressure and all phase saturations. Only the
/// non-reference saturations are Newton unknowns; the reference one is
/// always 1 minus the others.
struct State {
    std::vector<double> pressure;
    std::vector<std::array<double, kMaxPhases>> saturation;

    std::size_t cell_count() const { return pressure.size(); }
    bool operator==(const State&) const = default;
};

struct RateSource {
    std::size_t cell = 0;
    int phase = 0;
    double rate = 0.0;  // kg/s, positive for injection
};

struct SourceSpec {
    std::vector<std::size_t> dirichlet_cells;  // unknowns frozen at their initial values
    std::vector<RateSource> rates;

    void validate(std::size_t cells, int phases) const;
};

enum class ChopMode { vanilla, appleyard };

struct NewtonSettings {
    int max_iterations = 15;
    double residual_tolerance = 1e-6;
    bool update_checks = true;
    double saturation_tolerance = 0.01;
    double pressure_tolerance = 1e-3;  // relative
    ChopMode chop = ChopMode::appleyard;
    double max_saturation_change = 0.2;
    int max_cut_depth = 6;
    double residual_floor = 1e-12;  // kg/s

    void validate() const;
};

struct NewtonReport {
    bool converged = false;
    int iterations = 0;
    std::vector<double> residual_history;
    int chops = 0;
    double max_saturation_update = 0.0;
    double max_relative_pressure_update = 0.0;
};

struct StepRecord {
    int index = 0;          // attempt counter
    int requested = 0;      // index into the requested schedule
    double time = 0.0;      // s, at the start of the attempt
    double dt = 0.0;        // s
    int cut_depth = 0;
    int iterations = 0;
    int chops = 0;
    bool converged = false;
};

struct RunReport {
    std::vector<StepRecord> steps;
    int total_iterations = 0;   // converged + wasted
    int wasted_iterations = 0;
    int cuts = 0;
    bool aborted = false;
    double end_time = 0.0;      // s, reached
    State final_state;

    int converged_iterations() const { return total_iterations - wasted_iterations; }
    std::vector<double> accepted_dts() const;
};

/// Requested timestep sequence in seconds: ramp steps, then dt until end,
/// the last step truncated to land on end exactly.
std::vector<double> build_schedule(std::span<const double> ramp, double dt, double end);

/// max |ΔS| and max |Δp| / |p| between two states.
std::pair<double, double> state_change(const State& a, const State& b);

class Simulator {
public:
    Simulator(Grid grid, FluidSystem fluids, SchemeConfig scheme, NewtonSettings settings, SourceSpec sources = {});
    ~Simulator();
    Simulator(Simulator&&) noexcept;
    Simulator& operator=(Simulator&&) noexcept;

    const Grid& grid() const { return grid_; }
    const FluidSystem& fluids() const { return fluids_; }
    const SchemeConfig& scheme() const { return scheme_; }
    const NewtonSettings& settings() const { return settings_; }
    const SourceSpec& sources() const { return sources_; }

    int unknowns_per_cell() const { return fluids_.phase_count(); }
    std::size_t unknown_count() const { return grid_.cell_count() * unknowns_per_cell(); }
    /// Phase whose saturation is unknown k (k >= 1) of each cell.
    int primary_phase(int k) const { return primary_[k]; }
    /// True when the reference equation of cell 0 is replaced by a pressure pin.
    bool pressure_pinned() const { return pin_pressure_; }

    struct Assembly {
        Eigen::VectorXd residual;   // kg/s
        Eigen::VectorXd scale;      // per-row normalisation, kg/s
        Eigen::SparseMatrix<double> jacobian;
    };

    /// Residual R_c,i = V phi (M^{n+1} - M^n)/dt + sum_j F_c,ij - V Q_c,i.
    Assembly assemble(const State& state, const State& previous, double dt, bool with_jacobian = true) const;

    /// Residual only, as a flat vector in unknown order; for oracles.
    Eigen::VectorXd residual(const State& state, const State& previous, double dt) const;

    /// Unknown vector <-> state conversion (reference saturation implied).
    Eigen::VectorXd pack(const State& state) const;
    State unpack(const Eigen::VectorXd& x) const;

    /// Applies a Newton update with saturation chopping; returns cells damped.
    int apply_update(State& state, const Eigen::VectorXd& update) const;

    double normalized_residual_norm(const Assembly& a) const;

    bool check_convergence(double residual_norm, double max_ds, double max_rel_dp, bool have_update) const;

    /// Newton solve of one backward-Euler step; state is the initial guess
    /// on entry and the last iterate on exit.
    NewtonReport newton(State& state, const State& previous, double dt) const;

    using StepObserver = std::function<void(const StepRecord&, const State&)>;

    /// Runs the requested schedule with halving cuts on Newton failure.
    RunReport run(State initial, std::span<const double> schedule, const StepObserver& observer = {}) const;

    /// Per-component mass in place, kg.
    std::array<double, kMaxPhases> component_masses(const State& state) const;

    void validate_state(const State& state) const;

private:
    template <class T>
    SideState<T> side(const State& state, std::size_t cell, int offset) const;

    Grid grid_;
    FluidSystem fluids_;
    SchemeConfig scheme_;
    NewtonSettings settings_;
    SourceSpec sources_;
    std::vector<int> primary_;       // primary_[0] unused (pressure)
    std::vector<char> dirichlet_;
    std::vector<FaceParameters> faces_;
    bool pin_pressure_ = false;
    struct LinearSolver;
    std::unique_ptr<LinearSolver> linear_;
};

}  // namespace huflow
