#pragma once

#include "dsea/md/params.hpp"
#include "dsea/md/slice_data.hpp"

#include <cstdint>
#include <vector>

namespace dsea::md {

/// fcc sites of an N_i^3 block of unit cells with edge `lattice_constant`,
/// four per cell: (0,0,0), (1/2,1/2,0), (1/2,0,1/2), (0,1/2,1/2).
std::vector<Vec3> fcc_positions(std::size_t lattice_cells, double lattice_constant);

/// Initial state: molecules on fcc sites, Maxwell-Boltzmann velocities at
/// T_target with zero net momentum (rescaled to T_target exactly), zero
/// forces, binned into N_xyz slices. Deterministic for a given seed.
std::vector<SliceData> generate_fcc(const SimParams& params, const Geometry& geometry, std::uint64_t seed);

} // namespace dsea::md
