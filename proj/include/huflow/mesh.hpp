#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace huflow {

/// Two-point connection between cells i and j. delta_z = z_i - z_j with depth
/// positive downwards. Barrier connections carry zero transmissibility and
/// are skipped by the flux assembly.
struct Connection {
    int i = 0;
    int j = 0;
    double transmissibility = 0.0;  // m^3
    double delta_z = 0.0;           // m
    bool barrier = false;
};

/// Logical (lattice) position of a cell in a structured grid.
struct CellIndex {
    int x = 0;
    int y = 0;
    int z = 0;
};

class Grid {
public:
    Grid() = default;
    Grid(std::vector<double> volumes, std::vector<double> porosities, std::vector<double> permeabilities,
         std::vector<double> depths, std::vector<Connection> connections);

    std::size_t cell_count() const { return volumes_.size(); }
    std::span<const double> volumes() const { return volumes_; }
    std::span<const double> porosities() const { return porosities_; }
    std::span<const double> permeabilities() const { return permeabilities_; }
    std::span<const double> depths() const { return depths_; }
    std::span<const Connection> connections() const { return connections_; }

    double pore_volume(std::size_t cell) const { return volumes_[cell] * porosities_[cell]; }

    // Structured-lattice metadata; nx*ny*nz == cell_count() for grids built by
    // build_structured_grid, all ones otherwise.
    int nx() const { return nx_; }
    int ny() const { return ny_; }
    int nz() const { return nz_; }
    CellIndex lattice_index(std::size_t cell) const;
    std::size_t cell_at(int x, int y, int z) const;

    /// Marks the connection between lattice-adjacent cells a and b as a
    /// barrier (T = 0). Returns false if no such connection exists.
    bool set_barrier(std::size_t a, std::size_t b);

    void set_lattice(int nx, int ny, int nz);

private:
    void validate() const;

    std::vector<double> volumes_;
    std::vector<double> porosities_;
    std::vector<double> permeabilities_;
    std::vector<double> depths_;
    std::vector<Connection> connections_;
    int nx_ = 1;
    int ny_ = 1;
    int nz_ = 1;
};

struct StructuredGridSpec {
    int nx = 1, ny = 1, nz = 1;
    double dx = 1.0, dy = 1.0, dz = 1.0;  // m
    double tilt_deg = 0.0;
};

/// Cartesian lattice with face connections between axis neighbours. Cell
/// fields are ordered x fastest, then y, then z (z index 0 is the lattice
/// top). Depths come from rotating the lattice about the y axis by tilt_deg:
/// depth = x sin(theta) + z cos(theta).
Grid build_structured_grid(const StructuredGridSpec& spec, std::span<const double> permeability,
                           std::span<const double> porosity);

/// TPFA transmissibility for two cells with equal half-distances:
/// T = (A / distance) * 2 k_i k_j / (k_i + k_j). Zero if either cell has k = 0.
double transmissibility(double k_i, double k_j, double face_area, double distance);

/// Columnar text dump: a cell table followed by a connection table.
void write_grid(const Grid& grid, std::ostream& out);

}  // namespace huflow
