// Command-line driver over the C API.
//
// Exit codes: 0 success, 1 aborted simulation or run failure, 2 usage or
// configuration error.

#include "huflow/huflow.h"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitAborted = 1;
constexpr int kExitUsage = 2;

int report_error(huflow_status status)
{
    std::cerr << "huflow: " << huflow_last_error() << '\n';
    return status == HUFLOW_ERROR_RUNTIME ? kExitAborted : kExitUsage;
}

std::string valid_schemes()
{
    std::string s;
    for (size_t k = 0; k < huflow_scheme_count(); ++k) s += std::string(k ? ", " : "") + huflow_scheme_label(k);
    return s;
}

bool known_scheme(const std::string& label)
{
    for (size_t k = 0; k < huflow_scheme_count(); ++k)
        if (label == huflow_scheme_label(k)) return true;
    return false;
}

int unknown_scheme(const std::string& label)
{
    std::cerr << "huflow: unknown scheme '" << label << "'; valid schemes: " << valid_schemes() << '\n';
    return kExitUsage;
}

/// Explicit --out is used as is; otherwise $HUFLOW_OUT_DIR (or huflow_out) plus a subdirectory.
std::string output_dir(const std::string& requested, const std::string& sub)
{
    if (!requested.empty()) return requested;
    const char* env = std::getenv("HUFLOW_OUT_DIR");
    const std::filesystem::path root = env && *env ? env : "huflow_out";
    return (root / sub).string();
}

void print_line(const char* line, void*) { std::cout << line << '\n'; }

struct CaseHandle {
    huflow_case* ptr = nullptr;
    ~CaseHandle() { huflow_case_free(ptr); }
};

struct ReportHandle {
    huflow_report* ptr = nullptr;
    ~ReportHandle() { huflow_report_free(ptr); }
};

struct RunOptions {
    std::string case_name;
    std::string scheme;
    std::string config;
    std::vector<std::string> sets;
    std::string out;
};

int run_command(const RunOptions& o)
{
    if (!o.scheme.empty() && !known_scheme(o.scheme)) return unknown_scheme(o.scheme);
    CaseHandle c;
    if (auto st = huflow_case_resolve(o.case_name.c_str(), &c.ptr); st != HUFLOW_OK) return report_error(st);
    if (!o.config.empty())
        if (auto st = huflow_case_apply_config(c.ptr, o.config.c_str()); st != HUFLOW_OK) return report_error(st);
    for (const auto& item : o.sets) {
        const auto eq = item.find('=');
        const auto dot = item.find('.');
        if (eq == std::string::npos || dot == std::string::npos || dot > eq) {
            std::cerr << "huflow: --set expects section.key=value, got '" << item << "'\n";
            return kExitUsage;
        }
        const std::string section = item.substr(0, dot), key = item.substr(dot + 1, eq - dot - 1), value = item.substr(eq + 1);
        if (auto st = huflow_case_set(c.ptr, section.c_str(), key.c_str(), value.c_str()); st != HUFLOW_OK)
            return report_error(st);
    }
    if (huflow_case_is_one_cell(c.ptr)) {
        std::cerr << "huflow: '" << huflow_case_name(c.ptr) << "' is a one-cell study; use `huflow analyze one-cell`\n";
        return kExitUsage;
    }

    ReportHandle r;
    if (auto st = huflow_run(c.ptr, o.scheme.empty() ? nullptr : o.scheme.c_str(), &r.ptr); st != HUFLOW_OK)
        return report_error(st);
    const std::string label = o.scheme.empty() ? "default" : o.scheme;
    const std::string dir = output_dir(o.out, std::string(huflow_case_name(c.ptr)) + "/" + label);
    if (auto st = huflow_report_write(r.ptr, dir.c_str()); st != HUFLOW_OK) return report_error(st);

    const bool aborted = huflow_report_aborted(r.ptr);
    std::cout << huflow_case_name(c.ptr) << ' ' << label << ": " << huflow_report_total_iterations(r.ptr) << '('
              << huflow_report_wasted_iterations(r.ptr) << ") iterations, " << huflow_report_cuts(r.ptr) << " cuts, "
              << (aborted ? "aborted" : "completed") << " at " << huflow_report_end_time_days(r.ptr) << " days\n"
              << "output: " << dir << '\n';
    return aborted ? kExitAborted : kExitOk;
}

int save_command(const std::string& case_name, const std::string& path)
{
    CaseHandle c;
    if (auto st = huflow_case_resolve(case_name.c_str(), &c.ptr); st != HUFLOW_OK) return report_error(st);
    if (auto st = huflow_case_save(c.ptr, path.c_str()); st != HUFLOW_OK) return report_error(st);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Immiscible multiphase flow simulator with hybrid-upwinding flux schemes"};
    app.require_subcommand(1);
    app.set_version_flag("--version", huflow_version());

    RunOptions ro;
    auto* run = app.add_subcommand("run", "Run one case with one scheme");
    run->add_option("case", ro.case_name, "Builtin case name or config file")->required();
    run->add_option("--scheme", ro.scheme, "Scheme label (default: the case's scheme)");
    run->add_option("--config", ro.config, "Config file applied on top of the case");
    run->add_option("--set", ro.sets, "Override section.key=value (repeatable)");
    run->add_option("--out", ro.out, "Output directory");

    std::vector<std::string> cases;
    std::vector<std::string> schemes;
    int jobs = 1;
    std::string compare_out;
    auto* compare = app.add_subcommand("compare", "Run every case with every scheme and tabulate iterations");
    compare->add_option("cases", cases, "Builtin case names or config files")->required();
    compare->add_option("--schemes", schemes, "Comma-separated scheme labels")->required()->delimiter(',');
    compare->add_option("--jobs", jobs, "Parallel runs")->check(CLI::PositiveNumber);
    compare->add_option("--out", compare_out, "Output directory");

    std::string scheme = "wahu-tv", surface = "velocity", density = "per_term", analyze_out;
    int resolution = 101;
    bool paths = false;
    auto* analyze = app.add_subcommand("analyze", "Residual-space studies");
    analyze->require_subcommand(1);
    auto* one_cell = analyze->add_subcommand("one-cell", "One cell against a fixed boundary cell");
    one_cell->add_option("--scheme", scheme, "Scheme label");
    one_cell->add_option("--surface", surface, "velocity or residual");
    one_cell->add_option("--resolution", resolution, "Samples per axis")->check(CLI::Range(32, 2001));
    one_cell->add_flag("--paths", paths, "Trace Newton paths from the four window corners");
    one_cell->add_option("--density", density, "Density upwinding: per_term or total");
    one_cell->add_option("--out", analyze_out, "Output directory");

    unsigned seed = 12345;
    int samples = 1000;
    auto* validate = app.add_subcommand("validate", "Run the invariant suite");
    validate->add_option("--seed", seed, "Random seed");
    validate->add_option("--samples", samples, "Random samples per check")->check(CLI::PositiveNumber);

    auto* list = app.add_subcommand("list", "List builtin cases and scheme labels");

    std::string save_case, save_path;
    auto* save = app.add_subcommand("save", "Write a case as a config file");
    save->add_option("case", save_case, "Builtin case name or config file")->required();
    save->add_option("path", save_path, "Destination")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    if (*run) return run_command(ro);

    if (*compare) {
        for (const auto& s : schemes)
            if (!known_scheme(s)) return unknown_scheme(s);
        std::vector<const char*> cp, sp;
        for (const auto& c : cases) cp.push_back(c.c_str());
        for (const auto& s : schemes) sp.push_back(s.c_str());
        const std::string dir = output_dir(compare_out, "compare");
        int aborted = 0;
        if (auto st = huflow_compare(cp.data(), cp.size(), sp.data(), sp.size(), jobs, dir.c_str(), print_line, nullptr,
                                     &aborted);
            st != HUFLOW_OK)
            return report_error(st);
        std::cout << "output: " << dir << '\n';
        return aborted ? kExitAborted : kExitOk;
    }

    if (*one_cell) {
        if (!known_scheme(scheme)) return unknown_scheme(scheme);
        const std::string dir = output_dir(analyze_out, "one_cell/" + scheme);
        if (auto st = huflow_analyze_one_cell(scheme.c_str(), surface.c_str(), resolution, paths ? 1 : 0,
                                              density.c_str(), dir.c_str(), print_line, nullptr);
            st != HUFLOW_OK)
            return report_error(st);
        std::cout << "output: " << dir << '\n';
        return kExitOk;
    }

    if (*validate) {
        int failures = 0;
        if (auto st = huflow_validate(seed, samples, print_line, nullptr, &failures); st != HUFLOW_OK)
            return report_error(st);
        return failures ? kExitAborted : kExitOk;
    }

    if (*list) {
        std::cout << "cases:";
        for (size_t k = 0; k < huflow_builtin_case_count(); ++k) std::cout << ' ' << huflow_builtin_case_name(k);
        std::cout << "\nschemes: " << valid_schemes() << '\n';
        return kExitOk;
    }

    if (*save) return save_command(save_case, save_path);
    return kExitUsage;
}
