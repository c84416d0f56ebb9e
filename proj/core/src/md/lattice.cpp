#include "dsea/md/lattice.hpp"

#include <cmath>
#include <random>

namespace dsea::md {

std::vector<Vec3> fcc_positions(std::size_t lattice_cells, double a) {
    static constexpr Vec3 basis[4] = {{0, 0, 0}, {0.5, 0.5, 0}, {0.5, 0, 0.5}, {0, 0.5, 0.5}};
    std::vector<Vec3> out;
    out.reserve(4 * lattice_cells * lattice_cells * lattice_cells);
    for (std::size_t ix = 0; ix < lattice_cells; ++ix)
        for (std::size_t iy = 0; iy < lattice_cells; ++iy)
            for (std::size_t iz = 0; iz < lattice_cells; ++iz)
                for (const auto& b : basis)
                    out.push_back({(static_cast<double>(ix) + b.x) * a, (static_cast<double>(iy) + b.y) * a,
                                   (static_cast<double>(iz) + b.z) * a});
    return out;
}

std::vector<SliceData> generate_fcc(const SimParams& params, const Geometry& geometry, std::uint64_t seed) {
    const double a = geometry.box_length / static_cast<double>(params.lattice_cells);
    const auto sites = fcc_positions(params.lattice_cells, a);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, std::sqrt(params.temperature));
    std::vector<Molecule> all(sites.size());
    Vec3 momentum;
    for (std::size_t i = 0; i < sites.size(); ++i) {
        all[i].r = sites[i];
        all[i].v = {gauss(rng), gauss(rng), gauss(rng)};
        momentum += all[i].v;
    }
    const Vec3 drift = momentum * (1.0 / static_cast<double>(all.size()));
    double sum_v2 = 0;
    for (auto& m : all) {
        m.v -= drift;
        sum_v2 += dot(m.v, m.v);
    }
    const double measured = sum_v2 / (3.0 * static_cast<double>(all.size()));
    const double scale = std::sqrt(params.temperature / measured);
    for (auto& m : all) m.v *= scale;

    std::vector<std::vector<Molecule>> per_slice(geometry.num_slices());
    for (const auto& m : all) per_slice[slice_of(m.r.x, geometry) - 1].push_back(m);
    std::vector<SliceData> slices;
    slices.reserve(per_slice.size());
    for (std::size_t s = 0; s < per_slice.size(); ++s)
        slices.push_back(make_slice(s + 1, std::move(per_slice[s]), geometry));
    return slices;
}

} // namespace dsea::md
