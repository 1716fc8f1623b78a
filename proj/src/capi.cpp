#include "huflow/huflow.h"

#include "huflow/analysis.hpp"
#include "huflow/harness.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

struct huflow_case {
    huflow::CaseSpec spec;
};

struct huflow_report {
    huflow::CaseSpec spec;
    huflow::RunOutcome outcome;
};

namespace {

thread_local std::string last_error;

huflow_status fail(huflow_status status, const std::string& message)
{
    last_error = message;
    return status;
}

/// Runs fn, mapping std::invalid_argument to `argument_status` and every
/// other exception to `other_status`.
template <class F>
huflow_status guard(huflow_status argument_status, huflow_status other_status, F&& fn)
{
    try {
        fn();
        return HUFLOW_OK;
    } catch (const std::invalid_argument& e) {
        return fail(argument_status, e.what());
    } catch (const std::exception& e) {
        return fail(other_status, e.what());
    }
}

std::ofstream open_output(const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out) throw std::ios_base::failure("cannot write '" + path.string() + "'");
    return out;
}

void emit(huflow_line_sink sink, void* user, const std::string& text)
{
    if (!sink) return;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) sink(line.c_str(), user);
}

}  // namespace

extern "C" {

const char* huflow_version(void) { return "0.1.0"; }
const char* huflow_last_error(void) { return last_error.c_str(); }

size_t huflow_scheme_count(void) { return huflow::SchemeConfig::labels().size(); }
const char* huflow_scheme_label(size_t index)
{
    const auto& v = huflow::SchemeConfig::labels();
    return index < v.size() ? v[index].c_str() : nullptr;
}

size_t huflow_builtin_case_count(void) { return huflow::builtin_case_names().size(); }
const char* huflow_builtin_case_name(size_t index)
{
    const auto& v = huflow::builtin_case_names();
    return index < v.size() ? v[index].c_str() : nullptr;
}

huflow_status huflow_case_builtin(const char* name, huflow_case** out)
{
    if (!name || !out) return fail(HUFLOW_ERROR_ARGUMENT, "null argument");
    return guard(HUFLOW_ERROR_ARGUMENT, HUFLOW_ERROR_ARGUMENT,
                 [&] { *out = new huflow_case{huflow::builtin_case(name)}; });
}

huflow_status huflow_case_resolve(const char* name_or_path, huflow_case** out)
{
    if (!name_or_path || !out) return fail(HUFLOW_ERROR_ARGUMENT, "null argument");
    return guard(HUFLOW_ERROR_ARGUMENT, HUFLOW_ERROR_CONFIG,
                 [&] { *out = new huflow_case{huflow::resolve_case(name_or_path)}; });
}

huflow_status huflow_case_apply_config(huflow_case* c, const char* path)
{
    if (!c || !path) return fail(HUFLOW_ERROR_ARGUMENT, "null argument");
    if (!std::filesystem::exists(path)) return fail(HUFLOW_ERROR_IO, std::string("cannot open config '") + path + "'");
    return guard(HUFLOW_ERROR_CONFIG, HUFLOW_ERROR_CONFIG, [&] { c->spec = huflow::load_case(path, &c->spec); });
}

huflow_status huflow_case_set(huflow_case* c, const char* section, const char* key, const char* value)
{
    if (!c || !section || !key || !value) return fail(HUFLOW_ERROR_ARGUMENT, "null argument");
    return guard(HUFLOW_ERROR_CONFIG, HUFLOW_ERROR_CONFIG, [&] { huflow::set_case_value(c->spec, section, key, value); });
}

huflow_status huflow_case_save(const huflow_case* c, const char* path)
{
    if (!c || !path) return fail(HUFLOW_ERROR_ARGUMENT, "null argument");
    return guard(HUFLOW_ERROR_IO, HUFLOW_ERROR_IO, [&] {
        auto out = open_output(path);
        huflow::serialize_case(c->spec, out);
    });
}

const char* huflow_case_name(const huflow_case* c) { return c ? c->spec.name.c_str() : nullptr; }
int huflow_case_is_one_cell(const huflow_case* c) { return c && c->spec.kind == huflow::CaseKind::one_cell; }
void huflow_case_free(huflow_case* c) { delete c; }

huflow_status huflow_run(const huflow_case* c, const char* scheme, huflow_report** out)
{
    if (!c || !out) return fail(HUFLOW_ERROR_ARGUMENT, "null argument");
    if (c->spec.kind != huflow::CaseKind::simulation)
        return fail(HUFLOW_ERROR_ARGUMENT, "case '" + c->spec.name + "' is a one-cell study; use the analysis entry point");
    huflow::SchemeConfig config;
    const huflow_status parsed = guard(HUFLOW_ERROR_ARGUMENT, HUFLOW_ERROR_ARGUMENT, [&] {
        huflow::SchemeChoice choice = c->spec.scheme;
        if (scheme) choice.label = scheme;
        config = choice.config();
    });
    if (parsed != HUFLOW_OK) return parsed;
    return guard(HUFLOW_ERROR_RUNTIME, HUFLOW_ERROR_RUNTIME,
                 [&] { *out = new huflow_report{c->spec, huflow::run_case(c->spec, config)}; });
}

int huflow_report_total_iterations(const huflow_report* r) { return r ? r->outcome.report.total_iterations : 0; }
int huflow_report_wasted_iterations(const huflow_report* r) { return r ? r->outcome.report.wasted_iterations : 0; }
int huflow_report_cuts(const huflow_report* r) { return r ? r->outcome.report.cuts : 0; }
int huflow_report_aborted(const huflow_report* r) { return r ? r->outcome.report.aborted : 0; }
double huflow_report_end_time_days(const huflow_report* r)
{
    return r ? r->outcome.report.end_time / huflow::kSecondsPerDay : 0.0;
}
double huflow_report_mass_error(const huflow_report* r) { return r ? r->outcome.max_relative_mass_error : 0.0; }
size_t huflow_report_step_count(const huflow_report* r) { return r ? r->outcome.report.steps.size() : 0; }

huflow_status huflow_report_step(const huflow_report* r, size_t index, huflow_step* out)
{
    if (!r || !out) return fail(HUFLOW_ERROR_ARGUMENT, "null argument");
    if (index >= r->outcome.report.steps.size()) return fail(HUFLOW_ERROR_ARGUMENT, "step index out of range");
    const auto& s = r->outcome.report.steps[index];
    *out = {s.index,      s.requested,  s.time / huflow::kSecondsPerDay, s.dt / huflow::kSecondsPerDay,
            s.cut_depth, s.iterations, s.chops,                         s.converged ? 1 : 0};
    return HUFLOW_OK;
}

huflow_status huflow_report_write(const huflow_report* r, const char* dir)
{
    if (!r || !dir) return fail(HUFLOW_ERROR_ARGUMENT, "null argument");
    return guard(HUFLOW_ERROR_IO, HUFLOW_ERROR_IO, [&] {
        const std::filesystem::path root(dir);
        std::filesystem::create_directories(root);
        auto steps = open_output(root / "steps.csv");
        huflow::write_steps_csv(r->outcome.report, steps);
        auto summary = open_output(root / "summary.json");
        huflow::write_summary_json(r->outcome, summary);
        const auto grid = huflow::make_grid(r->spec.grid);
        const auto fluids = huflow::make_fluids(r->spec.fluids);
        auto state = open_output(root / "final_state.csv");
        huflow::write_state_csv(grid, fluids, r->outcome.report.final_state, state);
    });
}

void huflow_report_free(huflow_report* r) { delete r; }

huflow_status huflow_compare(const char* const* cases, size_t case_count, const char* const* schemes,
                             size_t scheme_count, int jobs, const char* out_dir, huflow_line_sink sink, void* user,
                             int* aborted_runs)
{
    if (!cases || !schemes || !out_dir || case_count == 0 || scheme_count == 0)
        return fail(HUFLOW_ERROR_ARGUMENT, "compare needs at least one case and one scheme");
    std::vector<huflow::CaseSpec> specs;
    std::vector<huflow::SchemeConfig> configs;
    const huflow_status parsed = guard(HUFLOW_ERROR_ARGUMENT, HUFLOW_ERROR_CONFIG, [&] {
        for (size_t k = 0; k < case_count; ++k) {
            specs.push_back(huflow::resolve_case(cases[k]));
            if (specs.back().kind != huflow::CaseKind::simulation)
                throw std::invalid_argument("case '" + specs.back().name + "' is not a simulation case");
        }
        for (size_t k = 0; k < scheme_count; ++k) configs.push_back(huflow::SchemeConfig::from_label(schemes[k]));
    });
    if (parsed != HUFLOW_OK) return parsed;

    return guard(HUFLOW_ERROR_RUNTIME, HUFLOW_ERROR_RUNTIME, [&] {
        const auto matrix = huflow::run_matrix(specs, configs, jobs);
        const std::filesystem::path root(out_dir);
        std::filesystem::create_directories(root);
        std::ostringstream table;
        huflow::write_matrix_table(matrix, table);
        auto totals = open_output(root / "totals.txt");
        totals << table.str();
        auto csv = open_output(root / "matrix.csv");
        huflow::write_matrix_csv(matrix, csv);
        auto cum = open_output(root / "cumulative.csv");
        huflow::write_cumulative_csv(matrix, cum);
        emit(sink, user, table.str());
        int aborted = 0;
        for (const auto& run : matrix.runs) aborted += run.report.aborted ? 1 : 0;
        if (aborted_runs) *aborted_runs = aborted;
    });
}

huflow_status huflow_analyze_one_cell(const char* scheme, const char* surface, int resolution, int paths,
                                      const char* density, const char* out_dir, huflow_line_sink sink, void* user)
{
    if (!scheme || !surface || !out_dir) return fail(HUFLOW_ERROR_ARGUMENT, "null argument");
    const std::string kind = surface;
    if (kind != "velocity" && kind != "residual")
        return fail(HUFLOW_ERROR_ARGUMENT, "surface must be 'velocity' or 'residual'");
    if (resolution < 3) return fail(HUFLOW_ERROR_ARGUMENT, "resolution must be at least 3");
    huflow::SchemeConfig config;
    const huflow_status parsed = guard(HUFLOW_ERROR_ARGUMENT, HUFLOW_ERROR_ARGUMENT, [&] {
        config = huflow::SchemeConfig::from_label(scheme);
        const std::string d = density ? density : "per_term";
        if (d == "total") config.density = huflow::DensityUpwinding::total;
        else if (d != "per_term") throw std::invalid_argument("density must be 'per_term' or 'total'");
    });
    if (parsed != HUFLOW_OK) return parsed;

    return guard(HUFLOW_ERROR_RUNTIME, HUFLOW_ERROR_RUNTIME, [&] {
        const auto problem = huflow::OneCellProblem::defaults();
        const std::filesystem::path root(out_dir);
        std::filesystem::create_directories(root);

        const auto field = kind == "velocity" ? huflow::velocity_surface(problem, config, resolution)
                                              : huflow::residual_surface(problem, config, resolution);
        auto f = open_output(root / (kind + "_field.csv"));
        huflow::write_field(field, f);
        auto l = open_output(root / "loci.csv");
        huflow::write_loci(field, l);

        const auto sol = huflow::solve_one_cell(problem, config);
        nlohmann::json j;
        j["scheme"] = config.label();
        j["converged"] = sol.converged;
        j["p"] = sol.p;
        j["sw"] = sol.sw;
        j["residual_norm"] = sol.residual_norm;
        j["total"] = sol.total;
        j["mass_flux"] = sol.mass_flux;
        j["distinct_solutions"] = sol.distinct_solutions;
        std::ostringstream summary;
        summary << config.label() << ": p = " << sol.p << ", S_w = " << sol.sw << ", total = " << sol.total
                << ", residual = " << sol.residual_norm << '\n';

        if (paths) {
            nlohmann::json jp = nlohmann::json::array();
            const auto starts = huflow::corner_starts(problem);
            for (std::size_t k = 0; k < starts.size(); ++k) {
                const auto path = huflow::newton_path(problem, config, starts[k]);
                auto out = open_output(root / ("path_" + std::to_string(k) + ".csv"));
                huflow::write_path(path, out);
                jp.push_back({{"start_p", starts[k].p},
                              {"start_sw", starts[k].s},
                              {"terminated", path.terminated},
                              {"steps", path.points.size()},
                              {"kink_loci_crossed", path.distinct_kink_loci}});
                summary << "path " << k << ": " << (path.terminated ? "terminated" : "did not terminate") << " after "
                        << path.points.size() << " points, " << path.distinct_kink_loci << " kink loci crossed\n";
            }
            j["paths"] = jp;
        }
        auto s = open_output(root / "solution.json");
        s << j.dump(2) << '\n';
        emit(sink, user, summary.str());
    });
}

huflow_status huflow_validate(unsigned seed, int samples, huflow_line_sink sink, void* user, int* failures)
{
    if (samples < 1) return fail(HUFLOW_ERROR_ARGUMENT, "samples must be positive");
    return guard(HUFLOW_ERROR_RUNTIME, HUFLOW_ERROR_RUNTIME, [&] {
        int failed = 0;
        for (const auto& r : huflow::run_invariant_suite(seed, samples)) {
            failed += r.passed ? 0 : 1;
            emit(sink, user, std::string(r.passed ? "PASS " : "FAIL ") + r.name + ": " + r.detail);
        }
        if (failures) *failures = failed;
    });
}

}  // extern "C"
