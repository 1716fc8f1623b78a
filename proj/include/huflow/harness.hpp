#pragma once

#include "huflow/analysis.hpp"
#include "huflow/solver.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace huflow {

inline constexpr double kMilliDarcy = 9.869233e-16;  // m^2
inline constexpr double kSecondsPerDay = 86400.0;

enum class BarrierLayout { none, staggered };

struct GridConfig {
    int nx = 1, ny = 1, nz = 100;
    double dx = 10.0, dy = 10.0, dz = 2.0;  // m
    double tilt_deg = 0.0;
    double permeability_md = 100.0;
    double porosity = 0.25;
    BarrierLayout barriers = BarrierLayout::none;

    bool operator==(const GridConfig&) const = default;
};

struct PhaseConfig {
    std::string name;
    double viscosity = 1e-3;
    double density = 1000.0;
    double compressibility = 0.0;
    double reference_pressure = 1e7;
    double surface_density = 1000.0;
    double kr_endpoint = 1.0;
    double kr_exponent = 2.0;

    bool operator==(const PhaseConfig&) const = default;
};

/// Phases are listed from most to least wetting.
struct FluidsConfig {
    std::vector<PhaseConfig> phases;
    bool capillary = false;
    std::string capillary_table = "reference";
    double capillary_scale = 1.0;
    double gravity = 9.81;

    bool operator==(const FluidsConfig&) const = default;
};

/// Bands of a single phase stacked from lattice row z = 0; fractions sum to 1.
struct InitialBand {
    std::string phase;
    double fraction = 0.0;

    bool operator==(const InitialBand&) const = default;
};

struct InitialConfig {
    std::vector<InitialBand> bands;
    double pressure = 1e7;  // Pa at depth 0; hydrostatic with the mean initial density

    bool operator==(const InitialConfig&) const = default;
};

struct ScheduleConfig {
    std::vector<double> ramp_days;
    double dt_days = 100.0;
    double end_days = 5000.0;

    bool operator==(const ScheduleConfig&) const = default;
    std::vector<double> seconds() const;
};

struct SolverConfig {
    int max_iterations = 15;
    ChopMode chop = ChopMode::vanilla;
    double max_saturation_change = 0.2;
    bool update_checks = true;
    double residual_tolerance = 1e-6;
    int max_cut_depth = 6;

    bool operator==(const SolverConfig&) const = default;
};

struct SchemeChoice {
    std::string label = "wahu-tv";
    double alpha = 1.0;
    DensityUpwinding density = DensityUpwinding::per_term;

    bool operator==(const SchemeChoice&) const = default;
    SchemeConfig config() const;
};

enum class CaseKind { simulation, one_cell };

struct CaseSpec {
    std::string name = "custom";
    CaseKind kind = CaseKind::simulation;
    GridConfig grid;
    FluidsConfig fluids;
    InitialConfig initial;
    ScheduleConfig schedule;
    SolverConfig solver;
    SchemeChoice scheme;

    void validate() const;
    bool operator==(const CaseSpec&) const = default;
};

/// seg1d_{100,150,200,300}, tilted_box_<deg>[_cap] for deg in {0,20,45,70,90},
/// barriers[_cap], barriers_50[_cap] (50x50 lattice), one_cell.
CaseSpec builtin_case(const std::string& name);
const std::vector<std::string>& builtin_case_names();

/// INI-style config applied on top of start (defaults when null);
/// [case] base = <builtin> replaces the starting point with a builtin case.
CaseSpec load_case(const std::string& path, const CaseSpec* start = nullptr);
CaseSpec parse_case(std::istream& in, const std::string& source = "<stream>", const CaseSpec* start = nullptr);
void serialize_case(const CaseSpec& spec, std::ostream& out);

/// Sets one config key, e.g. ("schedule", "dt_days", "300"); validates the result.
void set_case_value(CaseSpec& spec, const std::string& section, const std::string& key, const std::string& value);

/// Builtin name or path to a config file.
CaseSpec resolve_case(const std::string& name_or_path);

// Assembly of solver inputs from a case.
Grid make_grid(const GridConfig& config);
FluidSystem make_fluids(const FluidsConfig& config);
State initial_state(const CaseSpec& spec, const Grid& grid, const FluidSystem& fluids);
NewtonSettings make_newton_settings(const SolverConfig& config);
Simulator make_simulator(const CaseSpec& spec);
Simulator make_simulator(const CaseSpec& spec, const SchemeConfig& scheme);

/// Connections along z between rows r-1 and r that the staggered barrier
/// layout closes, as (upper cell, lower cell).
std::vector<std::pair<std::size_t, std::size_t>> barrier_connections(const GridConfig& config);

struct RunOutcome {
    std::string case_name;
    std::string scheme;
    RunReport report;
    std::array<double, kMaxPhases> initial_mass{};
    std::array<double, kMaxPhases> final_mass{};
    double max_relative_mass_error = 0.0;
    double wall_seconds = 0.0;
    std::vector<double> requested_schedule;  // s
};

RunOutcome run_case(const CaseSpec& spec, const SchemeConfig& scheme, const Simulator::StepObserver& observer = {});
RunOutcome run_case(const CaseSpec& spec);

struct ComparisonMatrix {
    std::vector<std::string> cases;
    std::vector<std::string> schemes;
    std::vector<RunOutcome> runs;  // row-major: case then scheme

    const RunOutcome& at(std::size_t c, std::size_t s) const { return runs[c * schemes.size() + s]; }
};

/// Runs every (case, scheme) pair with jobs worker threads.
ComparisonMatrix run_matrix(const std::vector<CaseSpec>& cases, const std::vector<SchemeConfig>& schemes, int jobs = 1);

/// "243(0)" style cell, with "aborted" appended for aborted runs.
std::string format_total(const RunReport& report);

void write_steps_csv(const RunReport& report, std::ostream& out);
void write_state_csv(const Grid& grid, const FluidSystem& fluids, const State& state, std::ostream& out);
void write_summary_json(const RunOutcome& outcome, std::ostream& out);
void write_matrix_csv(const ComparisonMatrix& matrix, std::ostream& out);
void write_matrix_table(const ComparisonMatrix& matrix, std::ostream& out);
/// Columns: case, scheme, step, time_days, cumulative_iterations.
void write_cumulative_csv(const ComparisonMatrix& matrix, std::ostream& out);

/// Output root: the given directory, else $HUFLOW_OUT_DIR, else "huflow_out".
std::string output_root(const std::string& requested);

// Invariant suite behind the `validate` command.
struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};
std::vector<CheckResult> run_invariant_suite(unsigned seed = 12345, int samples = 1000);

}  // namespace huflow
