#include "huflow/harness.hpp"
#include "huflow/solver.hpp"
#include "huflow/validation.hpp"

#include <gtest/gtest.h>

#include <numeric>

using namespace huflow;

namespace {

CaseSpec small_column(int cells = 10)
{
    CaseSpec c = builtin_case("seg1d_100");
    c.grid.nz = cells;
    c.grid.dz = 200.0 / cells;
    return c;
}

}  // namespace

TEST(Schedule, RampThenFixedStepsLandingOnEnd)
{
    const std::vector<double> ramp = {5.0, 25.0, 50.0};
    const auto s = build_schedule(ramp, 100.0, 500.0);
    const std::vector<double> expected = {5.0, 25.0, 50.0, 100.0, 100.0, 100.0, 100.0, 20.0};
    EXPECT_EQ(s, expected);
    EXPECT_DOUBLE_EQ(std::accumulate(s.begin(), s.end(), 0.0), 500.0);
    const std::vector<double> long_ramp = {5.0, 25.0, 50.0};
    EXPECT_EQ(build_schedule(long_ramp, 100.0, 20.0), std::vector<double>({5.0, 15.0}));
    EXPECT_THROW(build_schedule(ramp, 0.0, 10.0), std::invalid_argument);
    const std::vector<double> bad = {-1.0};
    EXPECT_THROW(build_schedule(bad, 1.0, 10.0), std::invalid_argument);
}

TEST(StateChange, MaxSaturationAndRelativePressure)
{
    State a{{100.0, 200.0}, {{0.5, 0.5, 0.0}, {0.2, 0.8, 0.0}}};
    State b = a;
    b.pressure[1] = 210.0;
    b.saturation[0] = {0.45, 0.55, 0.0};
    const auto [ds, dp] = state_change(b, a);
    EXPECT_NEAR(ds, 0.05, 1e-15);
    EXPECT_NEAR(dp, 10.0 / 200.0, 1e-15);
}

TEST(Simulator, PackUnpackRoundTrip)
{
    const auto spec = small_column();
    const Simulator sim = make_simulator(spec);
    const State s = initial_state(spec, sim.grid(), sim.fluids());
    EXPECT_EQ(sim.unknown_count(), 20u);
    EXPECT_TRUE(sim.pressure_pinned());
    const State back = sim.unpack(sim.pack(s));
    for (std::size_t c = 0; c < s.cell_count(); ++c) {
        EXPECT_EQ(back.pressure[c], s.pressure[c]);
        for (int l = 0; l < 2; ++l) EXPECT_NEAR(back.saturation[c][l], s.saturation[c][l], 1e-15);
    }
}

TEST(Simulator, SegregatedStateIsStationary)
{
    // Gas above water: one long implicit step leaves every saturation in place.
    // With PPU flow both phases upwind from immobile cells at the contact, so
    // the two bands decouple and the Jacobian is singular; only WA flow here.
    auto spec = small_column();
    spec.initial.bands = {{"gas", 0.5}, {"water", 0.5}};
    for (const auto& label : SchemeConfig::labels()) {
        const auto scheme = SchemeConfig::from_label(label);
        if (scheme.flow != FlowUpwinding::wa) continue;
        const Simulator sim = make_simulator(spec, scheme);
        const State start = initial_state(spec, sim.grid(), sim.fluids());
        State s = start;
        const auto rep = sim.newton(s, start, 1000.0 * kSecondsPerDay);
        EXPECT_TRUE(rep.converged) << label;
        EXPECT_LT(state_change(s, start).first, 1e-9) << label;
    }
}

TEST(Simulator, MassConservedOverShortRun)
{
    const auto r = check_mass_conservation();
    EXPECT_TRUE(r.passed) << r.detail;
}

TEST(Simulator, JacobianMatchesFiniteDifferences)
{
    for (const auto& label : {"ppu", "ppu-hu", "wahu-tv", "wahu-tm"}) {
        const auto j = jacobian_error(SchemeConfig::from_label(label), 2, 17, 4);
        EXPECT_GT(j.compared, 0) << label;
        EXPECT_LT(j.max_relative_error, 1e-6) << label;
    }
}

TEST(Simulator, VanillaUpdateClampsIntoBounds)
{
    const auto spec = small_column(2);
    const Simulator sim = make_simulator(spec);
    State s = initial_state(spec, sim.grid(), sim.fluids());
    Eigen::VectorXd du = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(sim.unknown_count()));
    du[1] = 5.0;
    du[3] = -5.0;
    const int chopped = sim.apply_update(s, du);
    EXPECT_EQ(chopped, 2);
    for (const auto& sat : s.saturation) {
        EXPECT_GE(sat[0], 0.0);
        EXPECT_LE(sat[0], 1.0);
        EXPECT_NEAR(sat[0] + sat[1], 1.0, 1e-15);
    }
}

TEST(Simulator, AppleyardLimitsSaturationChange)
{
    auto spec = small_column(2);
    spec.solver.chop = ChopMode::appleyard;
    spec.solver.max_saturation_change = 0.1;
    const Simulator sim = make_simulator(spec);
    State s = initial_state(spec, sim.grid(), sim.fluids());
    const State before = s;
    Eigen::VectorXd du = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(sim.unknown_count()));
    du[1] = -0.3;
    du[3] = 0.05;
    sim.apply_update(s, du);
    const int k = sim.primary_phase(1);
    EXPECT_NEAR(s.saturation[0][k] - before.saturation[0][k], -0.1, 1e-15);
    EXPECT_NEAR(s.saturation[1][k] - before.saturation[1][k], 0.05, 1e-15);
}

TEST(Simulator, ConvergenceRequiresUpdateChecksWhenEnabled)
{
    const auto spec = small_column(2);
    const Simulator sim = make_simulator(spec);
    EXPECT_TRUE(sim.check_convergence(1e-7, 0.0, 0.0, true));
    EXPECT_FALSE(sim.check_convergence(1e-5, 0.0, 0.0, true));
    EXPECT_FALSE(sim.check_convergence(1e-7, 0.02, 0.0, true));
    EXPECT_FALSE(sim.check_convergence(1e-7, 0.0, 2e-3, true));
    EXPECT_TRUE(sim.check_convergence(1e-7, 0.5, 0.5, false));
    auto loose = spec;
    loose.solver.update_checks = false;
    EXPECT_TRUE(make_simulator(loose).check_convergence(1e-7, 0.5, 0.5, true));
}

TEST(Simulator, IterationAccountingAndCuts)
{
    auto spec = builtin_case("seg1d_300");
    spec.schedule.end_days = 1000.0;
    const auto out = run_case(spec, SchemeConfig::ppu());
    const auto& rep = out.report;
    int total = 0, wasted = 0, failed = 0;
    for (const auto& s : rep.steps) {
        total += s.iterations;
        if (!s.converged) {
            wasted += s.iterations;
            ++failed;
        }
    }
    EXPECT_EQ(rep.total_iterations, total);
    EXPECT_EQ(rep.wasted_iterations, wasted);
    EXPECT_EQ(rep.cuts, failed);
    EXPECT_FALSE(rep.aborted);
    EXPECT_DOUBLE_EQ(rep.end_time, 1000.0 * kSecondsPerDay);
    const auto dts = rep.accepted_dts();
    EXPECT_NEAR(std::accumulate(dts.begin(), dts.end(), 0.0), 1000.0 * kSecondsPerDay, 1e-6);
}

TEST(Simulator, AbortsAtMaximumCutDepth)
{
    auto spec = builtin_case("seg1d_300");
    spec.solver.max_iterations = 1;
    spec.solver.max_cut_depth = 2;
    const auto out = run_case(spec, SchemeConfig::ppu());
    EXPECT_TRUE(out.report.aborted);
    EXPECT_LT(out.report.end_time, 5000.0 * kSecondsPerDay);
    EXPECT_GT(out.report.wasted_iterations, 0);
    int deepest = 0;
    for (const auto& s : out.report.steps) deepest = std::max(deepest, s.cut_depth);
    EXPECT_EQ(deepest, 2);
}

TEST(Simulator, RejectsInvalidStates)
{
    const auto spec = small_column(2);
    const Simulator sim = make_simulator(spec);
    State s = initial_state(spec, sim.grid(), sim.fluids());
    s.saturation[0] = {0.7, 0.7, 0.0};
    EXPECT_THROW(sim.validate_state(s), std::invalid_argument);
    s = initial_state(spec, sim.grid(), sim.fluids());
    s.pressure.pop_back();
    EXPECT_THROW(sim.validate_state(s), std::invalid_argument);
}

TEST(NewtonSettings, Validation)
{
    NewtonSettings s;
    s.max_iterations = 0;
    EXPECT_THROW(s.validate(), std::invalid_argument);
    s = {};
    s.max_cut_depth = -1;
    EXPECT_THROW(s.validate(), std::invalid_argument);
}
