#pragma once

#include <cstddef>

namespace dsea::md {

/// Lennard-Jones fluid in reduced units (m = k_B = 1).
struct SimParams {
    double sigma = 1.0;
    double epsilon = 1.0;
    double cutoff = 2.5;          ///< r_c in sigma
    double dt = 1.8e-3;           ///< reduced timestep
    double temperature = 1.5;     ///< T_target
    double density = 0.5;         ///< rho
    std::size_t lattice_cells = 5;  ///< N_i, fcc unit cells per box edge
    bool thermostat = true;
    /// Multiplies the pair force prefactor. 1 except for fault-injection runs.
    double force_scale = 1.0;

    /// Energy shift that makes the pair potential vanish at r_c:
    /// (sigma/r_c)^6 - (sigma/r_c)^12.
    double u_shift() const noexcept;

    void validate() const;
};

/// Cubic box cut into N_xyz^3 cells; each slice is one cell thick along x.
struct Geometry {
    double box_length = 0;         ///< b
    std::size_t molecules = 0;     ///< N
    std::size_t cells_per_edge = 0;  ///< N_xyz == number of slices
    double cell_length = 0;        ///< l = b / N_xyz >= r_c

    double volume() const noexcept { return box_length * box_length * box_length; }
    std::size_t num_slices() const noexcept { return cells_per_edge; }
    std::size_t cells_per_slice() const noexcept { return cells_per_edge * cells_per_edge; }
};

struct CellGrid {
    std::size_t cells_per_edge = 0;
    double cell_length = 0;
};

/// N_xyz = floor(b / r_c), l = b / N_xyz.
CellGrid cell_grid(double box_length, double cutoff);

/// b = N_i * (4/rho)^(1/3).
double box_length(std::size_t lattice_cells, double density);

/// Full geometry; rejects N_xyz < 3 (first and last slice would interact).
Geometry build_domain(const SimParams& params);

} // namespace dsea::md
