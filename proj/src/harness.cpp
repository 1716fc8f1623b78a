#include "huflow/harness.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace huflow {

namespace {

double relative_mass_error(const std::array<double, kMaxPhases>& a, const std::array<double, kMaxPhases>& b, int phases)
{
    double err = 0.0;
    for (int l = 0; l < phases; ++l) {
        const double ref = std::max(std::abs(a[l]), 1e-300);
        if (a[l] == 0.0 && b[l] == 0.0) continue;
        err = std::max(err, std::abs(b[l] - a[l]) / ref);
    }
    return err;
}

}  // namespace

RunOutcome run_case(const CaseSpec& spec, const SchemeConfig& scheme, const Simulator::StepObserver& observer)
{
    const Simulator sim = make_simulator(spec, scheme);
    const State initial = initial_state(spec, sim.grid(), sim.fluids());
    const int phases = sim.fluids().phase_count();

    RunOutcome out;
    out.case_name = spec.name;
    out.scheme = scheme.label();
    out.requested_schedule = spec.schedule.seconds();
    out.initial_mass = sim.component_masses(initial);

    // Mass is only meaningful at accepted states; track the worst drift over
    // all of them, not only the final one.
    double worst = 0.0;
    auto watch = [&](const StepRecord& rec, const State& state) {
        if (rec.converged) worst = std::max(worst, relative_mass_error(out.initial_mass, sim.component_masses(state), phases));
        if (observer) observer(rec, state);
    };

    const auto start = std::chrono::steady_clock::now();
    out.report = sim.run(initial, out.requested_schedule, watch);
    out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.final_mass = sim.component_masses(out.report.final_state);
    out.max_relative_mass_error = std::max(worst, relative_mass_error(out.initial_mass, out.final_mass, phases));
    return out;
}

RunOutcome run_case(const CaseSpec& spec) { return run_case(spec, spec.scheme.config()); }

ComparisonMatrix run_matrix(const std::vector<CaseSpec>& cases, const std::vector<SchemeConfig>& schemes, int jobs)
{
    ComparisonMatrix m;
    for (const auto& c : cases) m.cases.push_back(c.name);
    for (const auto& s : schemes) m.schemes.push_back(s.label());
    const std::size_t total = cases.size() * schemes.size();
    m.runs.resize(total);

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t k = next++; k < total; k = next++) {
            try {
                m.runs[k] = run_case(cases[k / schemes.size()], schemes[k % schemes.size()]);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    const int n = std::clamp(jobs, 1, static_cast<int>(std::max<std::size_t>(total, 1)));
    std::vector<std::thread> pool;
    for (int t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    return m;
}

std::string format_total(const RunReport& report)
{
    std::string s = std::to_string(report.total_iterations) + "(" + std::to_string(report.wasted_iterations) + ")";
    if (report.aborted) s += " aborted";
    return s;
}

void write_steps_csv(const RunReport& report, std::ostream& out)
{
    out << "attempt,requested,time_days,dt_days,cut_depth,iterations,chops,converged\n" << std::setprecision(17);
    for (const auto& s : report.steps)
        out << s.index << ',' << s.requested << ',' << s.time / kSecondsPerDay << ',' << s.dt / kSecondsPerDay << ','
            << s.cut_depth << ',' << s.iterations << ',' << s.chops << ',' << (s.converged ? 1 : 0) << '\n';
}

void write_state_csv(const Grid& grid, const FluidSystem& fluids, const State& state, std::ostream& out)
{
    out << "cell,x,y,z,depth,pressure";
    for (int l = 0; l < fluids.phase_count(); ++l) out << ",S_" << fluids.phase(l).name;
    out << '\n' << std::setprecision(17);
    const auto depth = grid.depths();
    for (std::size_t c = 0; c < grid.cell_count(); ++c) {
        const auto idx = grid.lattice_index(c);
        out << c << ',' << idx.x << ',' << idx.y << ',' << idx.z << ',' << depth[c] << ',' << state.pressure[c];
        for (int l = 0; l < fluids.phase_count(); ++l) out << ',' << state.saturation[c][l];
        out << '\n';
    }
}

void write_summary_json(const RunOutcome& o, std::ostream& out)
{
    nlohmann::json j;
    j["case"] = o.case_name;
    j["scheme"] = o.scheme;
    j["total_iterations"] = o.report.total_iterations;
    j["wasted_iterations"] = o.report.wasted_iterations;
    j["converged_iterations"] = o.report.converged_iterations();
    j["cuts"] = o.report.cuts;
    j["aborted"] = o.report.aborted;
    j["end_time_days"] = o.report.end_time / kSecondsPerDay;
    j["attempts"] = o.report.steps.size();
    j["accepted_steps"] = o.report.accepted_dts().size();
    j["requested_steps"] = o.requested_schedule.size();
    j["max_relative_mass_error"] = o.max_relative_mass_error;
    j["wall_seconds"] = o.wall_seconds;
    j["total"] = format_total(o.report);
    out << j.dump(2) << '\n';
}

void write_matrix_csv(const ComparisonMatrix& m, std::ostream& out)
{
    out << "case,scheme,total_iterations,wasted_iterations,cuts,aborted,end_time_days,max_relative_mass_error\n";
    out << std::setprecision(17);
    for (std::size_t c = 0; c < m.cases.size(); ++c)
        for (std::size_t s = 0; s < m.schemes.size(); ++s) {
            const auto& r = m.at(c, s);
            out << m.cases[c] << ',' << m.schemes[s] << ',' << r.report.total_iterations << ','
                << r.report.wasted_iterations << ',' << r.report.cuts << ',' << (r.report.aborted ? 1 : 0) << ','
                << r.report.end_time / kSecondsPerDay << ',' << r.max_relative_mass_error << '\n';
        }
}

void write_matrix_table(const ComparisonMatrix& m, std::ostream& out)
{
    std::size_t w0 = 4;
    for (const auto& c : m.cases) w0 = std::max(w0, c.size());
    std::vector<std::size_t> widths;
    for (std::size_t s = 0; s < m.schemes.size(); ++s) {
        std::size_t w = m.schemes[s].size();
        for (std::size_t c = 0; c < m.cases.size(); ++c) w = std::max(w, format_total(m.at(c, s).report).size());
        widths.push_back(w);
    }
    out << std::left << std::setw(static_cast<int>(w0)) << "case";
    for (std::size_t s = 0; s < m.schemes.size(); ++s) out << "  " << std::setw(static_cast<int>(widths[s])) << m.schemes[s];
    out << '\n';
    for (std::size_t c = 0; c < m.cases.size(); ++c) {
        out << std::setw(static_cast<int>(w0)) << m.cases[c];
        for (std::size_t s = 0; s < m.schemes.size(); ++s)
            out << "  " << std::setw(static_cast<int>(widths[s])) << format_total(m.at(c, s).report);
        out << '\n';
    }
    out << std::right;
}

void write_cumulative_csv(const ComparisonMatrix& m, std::ostream& out)
{
    out << "case,scheme,step,time_days,cumulative_iterations\n" << std::setprecision(17);
    for (std::size_t c = 0; c < m.cases.size(); ++c)
        for (std::size_t s = 0; s < m.schemes.size(); ++s) {
            int cum = 0;
            int step = 0;
            for (const auto& rec : m.at(c, s).report.steps) {
                cum += rec.iterations;
                if (!rec.converged) continue;
                out << m.cases[c] << ',' << m.schemes[s] << ',' << ++step << ',' << (rec.time + rec.dt) / kSecondsPerDay
                    << ',' << cum << '\n';
            }
        }
}

std::string output_root(const std::string& requested)
{
    if (!requested.empty()) return requested;
    if (const char* env = std::getenv("HUFLOW_OUT_DIR"); env && *env) return env;
    return "huflow_out";
}

}  // namespace huflow
