#pragma once

#include "dsea/md/params.hpp"
#include "dsea/md/slice_data.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace dsea::oracle {

inline constexpr std::size_t kMaxBruteForceMolecules = 10'000;

struct BruteForceResult {
    std::vector<md::Vec3> forces;  ///< same order as the input molecules
    double potential = 0;
    double virial = 0;
};

/// O(N^2) sum over ordered pairs with the same pair expressions and boundary
/// distance rules as the cell-list path (plain x, minimum image in y and z),
/// but no cells. Refuses N above kMaxBruteForceMolecules.
BruteForceResult brute_forces(std::span<const md::Molecule> molecules, const md::Geometry& geometry,
                              const md::SimParams& params);

/// Concatenates the MolLists of all slices in slice order.
std::vector<md::Molecule> gather(const std::vector<md::SliceData>& slices);

} // namespace dsea::oracle
