#include "huflow/analysis.hpp"

#include "oracle.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace huflow;

namespace {

const OneCellProblem& problem()
{
    static const OneCellProblem p = OneCellProblem::defaults();
    return p;
}

constexpr LocusId kWater{LocusKind::phase_potential, 0};
constexpr LocusId kGas{LocusKind::phase_potential, 1};

}  // namespace

TEST(OneCell, DefaultsMatchStudyParameters)
{
    const auto& p = problem();
    EXPECT_EQ(p.p_right, 210.0);
    EXPECT_EQ(p.sw_right, 0.2);
    EXPECT_EQ(p.g_dz, -1.0);
    EXPECT_EQ(p.rho_left[0], 6.18);
    EXPECT_EQ(p.rho_right[1], 2.0);
    EXPECT_EQ(p.sw_previous, 0.4);
    EXPECT_EQ(p.dt, 0.1);
    EXPECT_DOUBLE_EQ(p.transmissibility(), 1.0);
    EXPECT_DOUBLE_EQ(p.pore_volume(), 0.3);
    EXPECT_DOUBLE_EQ(p.capillary(0.05), 1.057e5 * 5e-5);
}

TEST(OneCell, FluxesAndResidualsMatchOracle)
{
    for (const auto& e : test::oracle()["one_cell_samples"]) {
        const auto scheme = SchemeConfig::from_label(e["scheme"].get<std::string>());
        const double p = e["p"], sw = e["sw"];
        const auto f = one_cell_flux(problem(), scheme, p, sw);
        EXPECT_TRUE(test::close_rel(f.total, e["total"], 1e-11)) << e.dump();
        for (int c = 0; c < 2; ++c) EXPECT_TRUE(test::close_rel(f.component_flux[c], e["flux"][c], 1e-11)) << e.dump();
        const auto r = one_cell_residual(problem(), scheme, p, sw);
        for (int c = 0; c < 2; ++c) EXPECT_TRUE(test::close_rel(r.value[c], e["residual"][c], 1e-11)) << e.dump();
    }
}

TEST(OneCell, SolutionsMatchOracle)
{
    const auto& sols = test::oracle()["one_cell_solutions"];
    auto check = [&](const char* key, SchemeConfig scheme) {
        const auto s = solve_one_cell(problem(), scheme);
        ASSERT_TRUE(s.converged) << key;
        EXPECT_NEAR(s.p, sols[key]["p"].get<double>(), 1e-8) << key;
        EXPECT_NEAR(s.sw, sols[key]["sw"].get<double>(), 1e-8) << key;
    };
    check("ppu", SchemeConfig::ppu());
    check("wahu-tv", SchemeConfig::wahu_tv());
    check("wahu-tm", SchemeConfig::wahu_tm());
    auto total_density = SchemeConfig::wahu_tv();
    total_density.density = DensityUpwinding::total;
    check("wahu-tv-total-density", total_density);
}

TEST(OneCell, ResidualJacobianMatchesFiniteDifference)
{
    for (const auto& label : {"ppu", "ppu-hu", "wahu-tv", "wahu-tm"}) {
        const auto scheme = SchemeConfig::from_label(label);
        for (auto [p, s] : {std::pair{207.3, 0.31}, {211.2, 0.72}}) {
            const auto r = one_cell_residual(problem(), scheme, p, s);
            const double hp = 1e-6, hs = 1e-7;
            const auto rp = one_cell_residual(problem(), scheme, p + hp, s), rm = one_cell_residual(problem(), scheme, p - hp, s);
            const auto sp = one_cell_residual(problem(), scheme, p, s + hs), sm = one_cell_residual(problem(), scheme, p, s - hs);
            for (int c = 0; c < 2; ++c) {
                EXPECT_NEAR(r.jacobian[c][0], (rp.value[c] - rm.value[c]) / (2 * hp), 1e-5) << label;
                EXPECT_NEAR(r.jacobian[c][1], (sp.value[c] - sm.value[c]) / (2 * hs), 1e-4) << label;
            }
        }
    }
}

TEST(OneCell, ConsistentSchemesGiveNearbySolutions)
{
    const auto a = solve_one_cell(problem(), SchemeConfig::ppu());
    const auto b = solve_one_cell(problem(), SchemeConfig::wahu_tv());
    EXPECT_LE(std::abs(a.sw - b.sw), 0.02 * a.sw);
}

TEST(Surfaces, RefinementReproducesSharedPoints)
{
    const auto scheme = SchemeConfig::wahu_tv();
    const auto coarse = velocity_surface(problem(), scheme, 33);
    const auto fine = velocity_surface(problem(), scheme, 65);
    for (std::size_t is = 0; is < 33; ++is)
        for (std::size_t ip = 0; ip < 33; ++ip) EXPECT_EQ(coarse.at(ip, is), fine.at(2 * ip, 2 * is));
    EXPECT_THROW(velocity_surface(problem(), scheme, 31), std::invalid_argument);
}

TEST(Surfaces, LocusPointsLieOnTheLocus)
{
    const auto scheme = SchemeConfig::ppu();
    const auto field = velocity_surface(problem(), scheme, 81);
    for (const auto& id : {kWater, kGas}) {
        const auto k = *field.locus_index(id);
        double cell_change = 0.0;
        for (std::size_t is = 0; is < field.s.size(); ++is)
            for (std::size_t ip = 0; ip + 1 < field.p.size(); ++ip)
                cell_change = std::max(cell_change, std::abs(field.locus_at(k, ip + 1, is) - field.locus_at(k, ip, is)));
        const auto pts = trace_locus(field, id);
        ASSERT_FALSE(pts.empty());
        for (const auto& pt : pts) EXPECT_LE(std::abs(locus_value(problem(), scheme, id, pt.p, pt.s)), cell_change);
    }
}

TEST(Surfaces, ResidualSurfaceMinimumNearSolution)
{
    const auto scheme = SchemeConfig::wahu_tv();
    const auto field = residual_surface(problem(), scheme, 101);
    const auto sol = solve_one_cell(problem(), scheme);
    std::size_t best = 0;
    for (std::size_t k = 1; k < field.value.size(); ++k)
        if (field.value[k] < field.value[best]) best = k;
    const double hp = field.p[1] - field.p[0], hs = field.s[1] - field.s[0];
    EXPECT_LE(std::abs(field.p[best % field.p.size()] - sol.p), 2 * hp);
    EXPECT_LE(std::abs(field.s[best / field.p.size()] - sol.sw), 2 * hs);
}

TEST(KinkMeasure, LinearFieldHasNoKinkOrBend)
{
    FieldSample f;
    for (int k = 0; k < 10; ++k) {
        f.p.push_back(k);
        f.s.push_back(0.1 * k);
    }
    f.loci = {kWater};
    f.locus_fields.resize(1);
    for (std::size_t is = 0; is < 10; ++is)
        for (std::size_t ip = 0; ip < 10; ++ip) {
            f.value.push_back(3.0 * f.p[ip] - 2.0 * f.s[is]);
            f.locus_fields[0].push_back(f.p[ip] - 4.5);
        }
    const auto m = kink_measure(f, kWater);
    EXPECT_NEAR(m.kink, 0.0, 1e-12);
    EXPECT_NEAR(m.bend, 0.0, 1e-9);
    EXPECT_EQ(m.crossings, 10);
    f.locus_fields[0].assign(f.value.size(), 1.0);
    EXPECT_THROW(kink_measure(f, kWater), std::runtime_error);
}

TEST(KinkMeasure, PpuKinksWhereArithmeticAveragingBends)
{
    const auto ppu = velocity_surface(problem(), SchemeConfig::ppu(), 101);
    auto avg = SchemeConfig::from_label("wa-ppu-tv");
    avg.alpha = 0.0;
    const auto mean = velocity_surface(problem(), avg, 101);
    for (const auto& id : {kWater, kGas}) {
        const auto kp = kink_measure(ppu, id);
        const auto ka = kink_measure(mean, id);
        EXPECT_GT(kp.kink, 0.0) << id.name();
        EXPECT_GT(ka.bend, kp.bend) << id.name();
        const double jp = locus_slope_jump(problem(), SchemeConfig::ppu(), id, 0.5);
        const double ja = locus_slope_jump(problem(), avg, id, 0.5);
        EXPECT_GT(jp, 0.0) << id.name();
        EXPECT_LT(ja, 1e-6 * jp) << id.name();
    }
}

TEST(KinkLoci, DependOnScheme)
{
    EXPECT_EQ(kink_loci(SchemeConfig::ppu(), false).size(), 2u);
    EXPECT_EQ(kink_loci(SchemeConfig::wahu_tv(), false), std::vector<LocusId>({{LocusKind::total_flux, 0}}));
    EXPECT_EQ(kink_loci(SchemeConfig::wahu_tv(), true).size(), 2u);
    EXPECT_EQ(kink_loci(SchemeConfig::ppu_hu(), true).size(), 4u);
}

TEST(NewtonPath, StartingAtSolutionHasNoLength)
{
    const auto scheme = SchemeConfig::ppu();
    const auto sol = solve_one_cell(problem(), scheme);
    const auto path = newton_path(problem(), scheme, {sol.p, sol.sw}, 0.02, 1e-10);
    EXPECT_TRUE(path.terminated);
    EXPECT_EQ(path.points.size(), 1u);
    EXPECT_THROW(newton_path(problem(), scheme, {sol.p, sol.sw}, 0.5), std::invalid_argument);
}

TEST(NewtonPath, CornerStartsReachTheSolution)
{
    for (const auto& label : {"ppu", "wahu-tv"}) {
        const auto scheme = SchemeConfig::from_label(label);
        const auto sol = solve_one_cell(problem(), scheme);
        for (const auto& start : corner_starts(problem())) {
            const auto path = newton_path(problem(), scheme, start);
            ASSERT_TRUE(path.terminated) << label;
            EXPECT_NEAR(path.points.back().p, sol.p, 1e-6) << label;
            EXPECT_NEAR(path.points.back().s, sol.sw, 1e-6) << label;
        }
    }
}

TEST(Output, ColumnarWriters)
{
    const auto field = velocity_surface(problem(), SchemeConfig::ppu(), 32);
    std::ostringstream f, l, p;
    write_field(field, f);
    write_loci(field, l);
    write_path(newton_path(problem(), SchemeConfig::ppu(), corner_starts(problem())[0]), p);
    EXPECT_EQ(f.str().rfind("p,s,total_velocity,dphi_w,dphi_g,total,capillary\n", 0), 0u);
    EXPECT_EQ(l.str().rfind("locus,p,s\n", 0), 0u);
    EXPECT_EQ(p.str().rfind("step,p,s\n", 0), 0u);
}
