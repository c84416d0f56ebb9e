#include "dsea/md/forces.hpp"

#include "dsea/common/error.hpp"

#include <cmath>

#include <fmt/format.h>

namespace dsea::md {

namespace {

std::size_t wrap(std::size_t c, int delta, std::size_t n) {
    return (c + n + static_cast<std::size_t>(delta + 1) - 1) % n;
}

} // namespace

ThermoSample compute_forces(SliceData& centre, const SliceData* left, const SliceData* right,
                            const Geometry& g, const SimParams& p) {
    const std::size_t n = g.cells_per_edge;
    const double b = g.box_length;
    const double rc2 = p.cutoff * p.cutoff;
    const double sigma2 = p.sigma * p.sigma;
    const double shift = p.u_shift();
    const double prefactor = 24.0 * p.epsilon * p.force_scale;
    const double four_eps = 4.0 * p.epsilon;
    const SliceData* sources[3] = {left, &centre, right};

    ThermoSample out;
    for (auto& m : centre.molecules) {
        m.force_old = m.force_new;
        m.force_new = {};
    }

    for (std::size_t cy = 0; cy < n; ++cy) {
        for (std::size_t cz = 0; cz < n; ++cz) {
            for (const auto i : centre.cell(cy * n + cz)) {
                Molecule& mi = centre.molecules[i];
                Vec3 force;
                for (int dx = 0; dx < 3; ++dx) {
                    const SliceData* src = sources[dx];
                    if (src == nullptr) continue;
                    for (int dy = -1; dy <= 1; ++dy) {
                        const std::size_t ny = wrap(cy, dy, n);
                        for (int dz = -1; dz <= 1; ++dz) {
                            const std::size_t nz = wrap(cz, dz, n);
                            for (const auto j : src->cell(ny * n + nz)) {
                                if (src == &centre && j == i) continue;
                                const Molecule& mj = src->molecules[j];
                                Vec3 d = mi.r - mj.r;
                                d.y -= b * std::round(d.y / b);
                                d.z -= b * std::round(d.z / b);
                                const double r2 = dot(d, d);
                                if (r2 > rc2) continue;
                                if (r2 < 1e-12)
                                    throw PhysicsError(fmt::format(
                                        "overlapping molecules: slice {} molecule {} and slice {} molecule {}",
                                        centre.index, i, src->index, j));
                                const double sr2 = sigma2 / r2;
                                const double sr6 = sr2 * sr2 * sr2;
                                const double sr12 = sr6 * sr6;
                                force += d * (prefactor * (2.0 * sr12 - sr6) / r2);
                                out.potential += four_eps * (sr12 - sr6 + shift) / 2.0;
                                out.virial += (2.0 * sr12 - sr6) / 2.0;
                            }
                        }
                    }
                }
                mi.force_new = force;
            }
        }
    }
    return out;
}

} // namespace dsea::md
