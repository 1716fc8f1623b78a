#include "huflow/mesh.hpp"

#include "oracle.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace huflow;

namespace {

Grid lattice(int nx, int ny, int nz, double tilt = 0.0, double dx = 1.0, double dz = 2.0)
{
    const std::size_t n = static_cast<std::size_t>(nx) * ny * nz;
    std::vector<double> k(n, 1e-13), phi(n, 0.25);
    return build_structured_grid({nx, ny, nz, dx, 1.0, dz, tilt}, k, phi);
}

}  // namespace

TEST(Transmissibility, HarmonicAverageMatchesOracle)
{
    const auto& o = test::oracle()["transmissibility"];
    const double t = transmissibility(o["k_i"], o["k_j"], o["area"], o["distance"]);
    EXPECT_TRUE(test::close_rel(t, o["value"], 1e-14, 0.0)) << t;
}

TEST(Transmissibility, ZeroPermeabilityClosesFace)
{
    EXPECT_EQ(transmissibility(0.0, 1e-13, 1.0, 1.0), 0.0);
    EXPECT_EQ(transmissibility(1e-13, 1e-13, 2.0, 4.0), 0.5 * 1e-13);
}

TEST(StructuredGrid, CountsAndConnectivity)
{
    const Grid g = lattice(3, 2, 4);
    EXPECT_EQ(g.cell_count(), 24u);
    // (nx-1) ny nz + nx (ny-1) nz + nx ny (nz-1)
    EXPECT_EQ(g.connections().size(), static_cast<std::size_t>(2 * 2 * 4 + 3 * 1 * 4 + 3 * 2 * 3));
    for (const auto& c : g.connections()) {
        EXPECT_LT(c.i, c.j);
        EXPECT_GT(c.transmissibility, 0.0);
        EXPECT_FALSE(c.barrier);
    }
    EXPECT_DOUBLE_EQ(g.pore_volume(0), 1.0 * 1.0 * 2.0 * 0.25);
}

TEST(StructuredGrid, LatticeIndexRoundTrip)
{
    const Grid g = lattice(3, 2, 4);
    for (std::size_t c = 0; c < g.cell_count(); ++c) {
        const auto idx = g.lattice_index(c);
        EXPECT_EQ(g.cell_at(idx.x, idx.y, idx.z), c);
    }
    EXPECT_EQ(g.lattice_index(1).x, 1);
    EXPECT_EQ(g.lattice_index(3).y, 1);
    EXPECT_EQ(g.lattice_index(6).z, 1);
}

TEST(StructuredGrid, DepthsUntilted)
{
    const Grid g = lattice(2, 1, 3, 0.0, 1.0, 2.0);
    EXPECT_DOUBLE_EQ(g.depths()[g.cell_at(0, 0, 0)], 1.0);
    EXPECT_DOUBLE_EQ(g.depths()[g.cell_at(1, 0, 2)], 5.0);
    for (const auto& c : g.connections()) {
        const auto a = g.lattice_index(c.i), b = g.lattice_index(c.j);
        EXPECT_DOUBLE_EQ(c.delta_z, b.z != a.z ? -2.0 : 0.0);
    }
}

TEST(StructuredGrid, DepthsTilted)
{
    const double tilt = 30.0;
    const double th = tilt * std::numbers::pi / 180.0;
    const Grid g = lattice(3, 1, 3, tilt, 1.0, 2.0);
    for (std::size_t c = 0; c < g.cell_count(); ++c) {
        const auto idx = g.lattice_index(c);
        EXPECT_NEAR(g.depths()[c], (idx.x + 0.5) * std::sin(th) + (idx.z + 0.5) * 2.0 * std::cos(th), 1e-14);
    }
}

TEST(StructuredGrid, VerticalBoxHasExactlyLevelFaces)
{
    const Grid g = lattice(3, 1, 3, 90.0, 1.0, 2.0);
    for (const auto& c : g.connections()) {
        const auto a = g.lattice_index(c.i), b = g.lattice_index(c.j);
        if (a.z != b.z) EXPECT_EQ(c.delta_z, 0.0);
        else EXPECT_EQ(c.delta_z, -1.0);
    }
}

TEST(StructuredGrid, DeltaZIsDepthDifference)
{
    const Grid g = lattice(4, 3, 5, 45.0);
    for (const auto& c : g.connections())
        EXPECT_DOUBLE_EQ(c.delta_z, g.depths()[c.i] - g.depths()[c.j]);
}

TEST(StructuredGrid, BarrierClosesOnlyAdjacentFaces)
{
    Grid g = lattice(2, 1, 2);
    EXPECT_TRUE(g.set_barrier(g.cell_at(0, 0, 0), g.cell_at(0, 0, 1)));
    EXPECT_FALSE(g.set_barrier(g.cell_at(0, 0, 0), g.cell_at(1, 0, 1)));
    int closed = 0;
    for (const auto& c : g.connections())
        if (c.barrier) {
            ++closed;
            EXPECT_EQ(c.transmissibility, 0.0);
        }
    EXPECT_EQ(closed, 1);
}

TEST(StructuredGrid, RejectsInvalidSpecs)
{
    std::vector<double> k(4, 1e-13), phi(4, 0.2);
    EXPECT_THROW(build_structured_grid({0, 1, 4, 1, 1, 1, 0}, k, phi), std::invalid_argument);
    EXPECT_THROW(build_structured_grid({1, 1, 4, -1, 1, 1, 0}, k, phi), std::invalid_argument);
    EXPECT_THROW(build_structured_grid({1, 1, 4, 1, 1, 1, 91}, k, phi), std::invalid_argument);
    EXPECT_THROW(build_structured_grid({1, 1, 5, 1, 1, 1, 0}, k, phi), std::invalid_argument);
}

TEST(Grid, RejectsInconsistentFields)
{
    EXPECT_THROW(Grid({1.0, 1.0}, {0.2}, {1e-13, 1e-13}, {0.0, 1.0}, {}), std::invalid_argument);
    EXPECT_THROW(Grid({1.0, 1.0}, {0.2, 0.2}, {1e-13, 1e-13}, {0.0, 1.0}, {{0, 5, 1.0, 0.0, false}}),
                 std::invalid_argument);
}

TEST(Grid, WriteGridListsCellsAndConnections)
{
    const Grid g = lattice(2, 1, 1);
    std::ostringstream os;
    write_grid(g, os);
    const std::string s = os.str();
    EXPECT_NE(s.find("cell,volume,porosity,permeability,depth"), std::string::npos);
    EXPECT_NE(s.find("i,j,transmissibility,delta_z,barrier"), std::string::npos);
}
