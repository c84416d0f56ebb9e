#pragma once

#include "dsea/md/forces.hpp"
#include "dsea/md/params.hpp"
#include "dsea/md/slice_data.hpp"

#include <vector>

namespace dsea::md {

/// v += (F_new + F_old) * 0.5 * dt
void update_velocities(SliceData& slice, double dt);

/// Sum of v^2 / 2 (m = 1).
double kinetic_energy(const SliceData& slice);

/// T = 2 KE / (3 N), k_B = 1.
double kinetic_temperature(double kinetic, std::size_t molecules);

/// Isokinetic rescale factor sqrt(T_target / T_measured). Throws PhysicsError
/// when the sample has no kinetic energy.
double thermostat_scale(const ThermoSample& sample, double target_temperature);

/// Destination lists for molecules leaving the central slice. `left`/`right`
/// may be null at the walls.
struct MigrationTargets {
    std::vector<Molecule>* left = nullptr;
    std::vector<Molecule>* centre = nullptr;
    std::vector<Molecule>* right = nullptr;
};

struct MigrationCounts {
    std::size_t left = 0;
    std::size_t centre = 0;
    std::size_t right = 0;
};

/// Scales v by `lambda`, advances r += v dt + F_new dt^2 / 2, wraps y/z into
/// [0, b), reflects x at the mirror walls (x folded back, v_x negated) and
/// appends each molecule to the slice owning its new x. Molecules are visited
/// in cell order. Throws PhysicsError if a molecule would skip a slice.
MigrationCounts integrate_positions_and_migrate(const SliceData& centre, const Geometry& geometry, double dt,
                                                double lambda, const MigrationTargets& targets);

/// Mirror and periodic boundary rules applied to one molecule in place.
void apply_boundaries(Molecule& molecule, const Geometry& geometry);

} // namespace dsea::md
