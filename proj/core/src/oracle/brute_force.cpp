#include "dsea/oracle/brute_force.hpp"

#include "dsea/common/error.hpp"

#include <cmath>

#include <fmt/format.h>

namespace dsea::oracle {

BruteForceResult brute_forces(std::span<const md::Molecule> molecules, const md::Geometry& geometry,
                              const md::SimParams& params) {
    if (molecules.size() > kMaxBruteForceMolecules)
        throw ConfigError(fmt::format("brute-force oracle refuses N = {} > {}", molecules.size(),
                                      kMaxBruteForceMolecules));
    const double b = geometry.box_length;
    const double rc2 = params.cutoff * params.cutoff;
    const double sigma2 = params.sigma * params.sigma;
    const double sr2c = sigma2 / rc2;
    const double sr6c = sr2c * sr2c * sr2c;
    const double shift = sr6c - sr6c * sr6c;

    BruteForceResult out;
    out.forces.assign(molecules.size(), {});
    for (std::size_t i = 0; i < molecules.size(); ++i) {
        md::Vec3 f;
        for (std::size_t j = 0; j < molecules.size(); ++j) {
            if (i == j) continue;
            md::Vec3 d = molecules[i].r - molecules[j].r;
            d.y -= b * std::round(d.y / b);
            d.z -= b * std::round(d.z / b);
            const double r2 = dot(d, d);
            if (r2 > rc2) continue;
            if (r2 < 1e-12) throw PhysicsError(fmt::format("overlapping molecules {} and {}", i, j));
            const double sr2 = sigma2 / r2;
            const double sr6 = sr2 * sr2 * sr2;
            const double sr12 = sr6 * sr6;
            f += d * (24.0 * params.epsilon * (2.0 * sr12 - sr6) / r2);
            out.potential += 4.0 * params.epsilon * (sr12 - sr6 + shift) / 2.0;
            out.virial += (2.0 * sr12 - sr6) / 2.0;
        }
        out.forces[i] = f;
    }
    return out;
}

std::vector<md::Molecule> gather(const std::vector<md::SliceData>& slices) {
    std::vector<md::Molecule> out;
    for (const auto& s : slices) out.insert(out.end(), s.molecules.begin(), s.molecules.end());
    return out;
}

} // namespace dsea::oracle
