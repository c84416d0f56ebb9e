#include "dsea/md/params.hpp"

#include "dsea/common/error.hpp"

#include <cmath>

#include <fmt/format.h>

namespace dsea::md {

double SimParams::u_shift() const noexcept {
    const double sr2 = sigma * sigma / (cutoff * cutoff);
    const double sr6 = sr2 * sr2 * sr2;
    const double sr12 = sr6 * sr6;
    return sr6 - sr12;
}

void SimParams::validate() const {
    if (!(sigma > 0) || !(epsilon > 0)) throw ConfigError("sigma and epsilon must be positive");
    if (!(cutoff > 0)) throw ConfigError("cutoff radius must be positive");
    if (!(dt > 0)) throw ConfigError("timestep must be positive");
    if (!(temperature > 0)) throw ConfigError("temperature must be positive");
    if (!(density > 0)) throw ConfigError("density must be positive");
    if (lattice_cells < 1) throw ConfigError("lattice cells per edge must be at least 1 (N_i >= 1)");
}

CellGrid cell_grid(double box_length, double cutoff) {
    const auto n = static_cast<std::size_t>(std::floor(box_length / cutoff));
    if (n == 0) return {0, 0};
    return {n, box_length / static_cast<double>(n)};
}

double box_length(std::size_t lattice_cells, double density) {
    return static_cast<double>(lattice_cells) * std::cbrt(4.0 / density);
}

Geometry build_domain(const SimParams& params) {
    params.validate();
    Geometry g;
    g.box_length = box_length(params.lattice_cells, params.density);
    g.molecules = 4 * params.lattice_cells * params.lattice_cells * params.lattice_cells;
    const auto grid = cell_grid(g.box_length, params.cutoff);
    if (grid.cells_per_edge < 3)
        throw ConfigError(fmt::format("geometry infeasible: N_xyz = floor(b / r_c) = {} < 3 (b={}, r_c={}); "
                                      "increase lattice cells or lower the cutoff",
                                      grid.cells_per_edge, g.box_length, params.cutoff));
    g.cells_per_edge = grid.cells_per_edge;
    g.cell_length = grid.cell_length;
    return g;
}

} // namespace dsea::md
