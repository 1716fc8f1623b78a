#include "huflow/mesh.hpp"

#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>

namespace huflow {

Grid::Grid(std::vector<double> volumes, std::vector<double> porosities, std::vector<double> permeabilities,
           std::vector<double> depths, std::vector<Connection> connections)
    : volumes_(std::move(volumes)),
      porosities_(std::move(porosities)),
      permeabilities_(std::move(permeabilities)),
      depths_(std::move(depths)),
      connections_(std::move(connections)),
      nx_(static_cast<int>(volumes_.size()))
{
    validate();
}

void Grid::validate() const
{
    const std::size_t n = volumes_.size();
    if (porosities_.size() != n || permeabilities_.size() != n || depths_.size() != n)
        throw std::invalid_argument("grid: per-cell field length mismatch");
    for (std::size_t c = 0; c < n; ++c) {
        if (!(volumes_[c] > 0.0)) throw std::invalid_argument("grid: non-positive cell volume");
        if (!(porosities_[c] > 0.0 && porosities_[c] <= 1.0))
            throw std::invalid_argument("grid: porosity outside (0, 1]");
        if (!(permeabilities_[c] > 0.0)) throw std::invalid_argument("grid: non-positive permeability");
    }
    std::set<std::pair<int, int>> seen;
    for (const auto& conn : connections_) {
        if (conn.i == conn.j || conn.i < 0 || conn.j < 0 || static_cast<std::size_t>(conn.i) >= n ||
            static_cast<std::size_t>(conn.j) >= n)
            throw std::invalid_argument("grid: connection references invalid cells");
        if (!seen.emplace(std::min(conn.i, conn.j), std::max(conn.i, conn.j)).second)
            throw std::invalid_argument("grid: duplicate connection");
        if (conn.transmissibility < 0.0) throw std::invalid_argument("grid: negative transmissibility");
        if (conn.barrier != (conn.transmissibility == 0.0))
            throw std::invalid_argument("grid: barrier flag must coincide with zero transmissibility");
    }
}

void Grid::set_lattice(int nx, int ny, int nz)
{
    if (static_cast<std::size_t>(nx) * ny * nz != cell_count())
        throw std::invalid_argument("grid: lattice dimensions do not match cell count");
    nx_ = nx;
    ny_ = ny;
    nz_ = nz;
}

CellIndex Grid::lattice_index(std::size_t cell) const
{
    const int c = static_cast<int>(cell);
    return {c % nx_, (c / nx_) % ny_, c / (nx_ * ny_)};
}

std::size_t Grid::cell_at(int x, int y, int z) const
{
    return static_cast<std::size_t>(x) + static_cast<std::size_t>(nx_) * (y + static_cast<std::size_t>(ny_) * z);
}

bool Grid::set_barrier(std::size_t a, std::size_t b)
{
    for (auto& conn : connections_) {
        const auto ci = static_cast<std::size_t>(conn.i);
        const auto cj = static_cast<std::size_t>(conn.j);
        if ((ci == a && cj == b) || (ci == b && cj == a)) {
            conn.barrier = true;
            conn.transmissibility = 0.0;
            return true;
        }
    }
    return false;
}

double transmissibility(double k_i, double k_j, double face_area, double distance)
{
    if (!(face_area > 0.0) || !(distance > 0.0))
        throw std::invalid_argument("transmissibility: face area and distance must be positive");
    if (k_i <= 0.0 || k_j <= 0.0) return 0.0;
    return face_area / distance * (2.0 * k_i * k_j / (k_i + k_j));
}

Grid build_structured_grid(const StructuredGridSpec& spec, std::span<const double> permeability,
                           std::span<const double> porosity)
{
    if (spec.nx < 1 || spec.ny < 1 || spec.nz < 1)
        throw std::invalid_argument("build_structured_grid: cell counts must be >= 1");
    if (!(spec.dx > 0.0) || !(spec.dy > 0.0) || !(spec.dz > 0.0))
        throw std::invalid_argument("build_structured_grid: cell sizes must be positive");
    if (!(spec.tilt_deg >= 0.0 && spec.tilt_deg <= 90.0))
        throw std::invalid_argument("build_structured_grid: tilt must lie in [0, 90] degrees");

    const std::size_t n = static_cast<std::size_t>(spec.nx) * spec.ny * spec.nz;
    if (permeability.size() != n || porosity.size() != n)
        throw std::invalid_argument("build_structured_grid: field length " + std::to_string(permeability.size()) +
                                    "/" + std::to_string(porosity.size()) + " does not match " +
                                    std::to_string(n) + " cells");

    // Exact at 90 degrees so horizontal faces of a vertical box carry no
    // roundoff elevation difference.
    const double theta = spec.tilt_deg * std::numbers::pi / 180.0;
    const double sin_t = spec.tilt_deg == 90.0 ? 1.0 : std::sin(theta);
    const double cos_t = spec.tilt_deg == 90.0 ? 0.0 : std::cos(theta);
    const double volume = spec.dx * spec.dy * spec.dz;

    auto index = [&](int x, int y, int z) {
        return static_cast<std::size_t>(x) + static_cast<std::size_t>(spec.nx) * (y + static_cast<std::size_t>(spec.ny) * z);
    };

    std::vector<double> depths(n);
    for (int z = 0; z < spec.nz; ++z)
        for (int y = 0; y < spec.ny; ++y)
            for (int x = 0; x < spec.nx; ++x) {
                const double xc = (x + 0.5) * spec.dx;
                const double zc = (z + 0.5) * spec.dz;
                depths[index(x, y, z)] = xc * sin_t + zc * cos_t;
            }

    std::vector<Connection> connections;
    connections.reserve(3 * n);
    auto connect = [&](std::size_t a, std::size_t b, double area, double distance) {
        const double t = transmissibility(permeability[a], permeability[b], area, distance);
        connections.push_back({static_cast<int>(a), static_cast<int>(b), t, depths[a] - depths[b], t == 0.0});
    };
    for (int z = 0; z < spec.nz; ++z)
        for (int y = 0; y < spec.ny; ++y)
            for (int x = 0; x < spec.nx; ++x) {
                const std::size_t c = index(x, y, z);
                if (x + 1 < spec.nx) connect(c, index(x + 1, y, z), spec.dy * spec.dz, spec.dx);
                if (y + 1 < spec.ny) connect(c, index(x, y + 1, z), spec.dx * spec.dz, spec.dy);
                if (z + 1 < spec.nz) connect(c, index(x, y, z + 1), spec.dx * spec.dy, spec.dz);
            }

    std::vector<double> perm(permeability.begin(), permeability.end());
    std::vector<double> phi(porosity.begin(), porosity.end());
    Grid grid(std::vector<double>(n, volume), std::move(phi), std::move(perm), std::move(depths),
              std::move(connections));
    grid.set_lattice(spec.nx, spec.ny, spec.nz);
    return grid;
}

void write_grid(const Grid& grid, std::ostream& out)
{
    out << std::setprecision(17);
    out << "# cells\ncell,volume,porosity,permeability,depth\n";
    for (std::size_t c = 0; c < grid.cell_count(); ++c)
        out << c << ',' << grid.volumes()[c] << ',' << grid.porosities()[c] << ',' << grid.permeabilities()[c]
            << ',' << grid.depths()[c] << '\n';
    out << "# connections\ni,j,transmissibility,delta_z,barrier\n";
    for (const auto& conn : grid.connections())
        out << conn.i << ',' << conn.j << ',' << conn.transmissibility << ',' << conn.delta_z << ','
            << (conn.barrier ? 1 : 0) << '\n';
}

}  // namespace huflow
