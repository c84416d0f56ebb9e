#pragma once

#include "dsea/md/params.hpp"
#include "dsea/md/slice_data.hpp"

#include <cstddef>

namespace dsea::md {

/// Per-step accumulators for one slice (or, summed, for the domain).
struct ThermoSample {
    double potential = 0;  ///< U
    double virial = 0;     ///< V_acc: sum over ordered pairs of (2 (s/r)^12 - (s/r)^6) / 2
    double kinetic = 0;    ///< KE after the velocity update, before thermostat scaling
    std::size_t molecules = 0;

    ThermoSample& operator+=(const ThermoSample& o) noexcept {
        potential += o.potential;
        virial += o.virial;
        kinetic += o.kinetic;
        molecules += o.molecules;
        return *this;
    }
};

/// Truncated-shifted Lennard-Jones forces on every molecule of `centre`.
///
/// Moves F_new to F_old and recomputes F_new from all neighbours within r_c
/// in the 27 surrounding cells: x-neighbours come from `left`/`right` (null at
/// the mirror walls), y/z wrap periodically with minimum-image distances.
/// Each ordered pair adds its half of U and V_acc. Summation order is fixed:
/// cells of `centre` in order, then neighbour cells dx, dy, dz = -1..1, then
/// CellList order. Returns U and V_acc for the centre molecules (kinetic and
/// molecules are left for the caller).
ThermoSample compute_forces(SliceData& centre, const SliceData* left, const SliceData* right,
                            const Geometry& geometry, const SimParams& params);

} // namespace dsea::md
