#pragma once

#include "dsea/md/params.hpp"
#include "dsea/md/vec3.hpp"
#include "dsea/stream/slice.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace dsea::md {

struct Molecule {
    Vec3 r;
    Vec3 v;
    Vec3 force_new;
    Vec3 force_old;

    friend bool operator==(const Molecule&, const Molecule&) = default;
};

/// One x-slice: MolList, CellNM and CellList. Cells are numbered
/// cy * N_xyz + cz. `cell_start` is derived from `cell_counts` and is not
/// part of the wire format.
struct SliceData {
    std::uint64_t index = 0;  ///< 1-based slice index
    std::uint64_t cells_per_edge = 0;
    std::vector<Molecule> molecules;
    std::vector<std::uint32_t> cell_counts;  ///< CellNM
    std::vector<std::uint32_t> cell_list;    ///< CellList, concatenated per cell
    std::vector<std::uint32_t> cell_start;   ///< size cells + 1

    std::size_t cell_count() const noexcept { return cells_per_edge * cells_per_edge; }

    /// Molecule indices (into `molecules`) of one cell.
    std::span<const std::uint32_t> cell(std::size_t c) const {
        return std::span(cell_list).subspan(cell_start[c], cell_start[c + 1] - cell_start[c]);
    }

    friend bool operator==(const SliceData& a, const SliceData& b) {
        return a.index == b.index && a.cells_per_edge == b.cells_per_edge && a.molecules == b.molecules &&
               a.cell_counts == b.cell_counts && a.cell_list == b.cell_list;
    }
};

/// 1-based slice owning x; x is clamped into [0, b].
std::size_t slice_of(double x, const Geometry& geometry);

/// Cell index (cy * N_xyz + cz) inside a slice for a position with y, z in [0, b).
std::size_t cell_of(const Vec3& r, const Geometry& geometry);

/// Stable counting sort of the molecules by cell: MolList ends up in
/// cell-major order with insertion order kept inside each cell, CellList is
/// the identity and CellNM the per-cell counts.
void bin_molecules(SliceData& slice, const Geometry& geometry);

SliceData make_slice(std::uint64_t index, std::vector<Molecule> molecules, const Geometry& geometry);

/// Throws FormatError if counts, indices or cell membership are inconsistent.
void check_slice(const SliceData& slice, const Geometry& geometry);

inline constexpr std::uint8_t kSliceFormatVersion = 1;

/// Little-endian wire/file format:
///   u8 version
///   u64 slice_index, u64 N_xyz, u64 molecule_count
///   molecule_count x 12 f64 (r, v, F_new, F_old)
///   N_xyz^2 x u32 CellNM
///   sum(CellNM) x u32 CellList
stream::Payload encode_slice(const SliceData& slice);
SliceData decode_slice(std::span<const std::byte> bytes);

/// Raw molecule records (12 little-endian f64 each) used while contributions
/// to an output slice are still being accumulated.
void append_molecules(stream::Payload& out, std::span<const Molecule> molecules);
std::vector<Molecule> read_molecules(std::span<const std::byte> bytes);

} // namespace dsea::md
