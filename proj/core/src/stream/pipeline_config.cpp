#include "dsea/stream/pipeline_config.hpp"

#include "dsea/common/error.hpp"

#include <algorithm>
#include <fmt/format.h>

namespace dsea::stream {

std::size_t compute_n_max(std::size_t num_slices, std::size_t workers_per_device, StencilOrders orders) {
    const std::size_t per_device = 2 + workers_per_device * (orders.input + orders.output);
    return num_slices / per_device;
}

void check_feasible(const PipelineConfig& c, StencilOrders orders) {
    if (c.devices < 1) throw ConfigError("pipeline needs at least one device (N_GPU >= 1)");
    if (c.workers_per_device < 1) throw ConfigError("pipeline needs at least one worker per device (N_wGPU >= 1)");
    if (c.num_slices < 1) throw ConfigError("dataset has no slices (N_S >= 1)");
    if (c.slots_per_buffer < 1) throw ConfigError("buffers need at least one slot (s >= 1)");
    if (c.link_capacity < 1) throw ConfigError("link capacity must be positive");
    if (c.rails < 1) throw ConfigError("rail count must be at least 1");
    if (c.slots_per_buffer * c.num_buffers() <= c.num_slices)
        throw ConfigError(fmt::format("storage infeasible: s * N_b > N_S violated (s={}, N_b={}, N_S={})",
                                      c.slots_per_buffer, c.num_buffers(), c.num_slices));
    // A worker must hold its whole input window and its whole output window,
    // clipped to the dataset.
    const std::size_t min_slots =
        std::min(c.num_slices, std::max(orders.input_window(), orders.output_window()));
    if (c.slots_per_buffer < min_slots)
        throw ConfigError(fmt::format("buffers too small: s >= min(N_S, max(2*O_in+1, 2*O_out+1)) = {} violated (s={})",
                                      min_slots, c.slots_per_buffer));
    // A buffer between two workers of one device holds the downstream input
    // window while the upstream worker is still contributing ahead of it.
    if (c.workers_per_device > 1) {
        const std::size_t chained = std::min(c.num_slices, 2 * (orders.input + orders.output) + 1);
        if (c.slots_per_buffer < chained)
            throw ConfigError(fmt::format(
                "buffers too small for chained workers: s >= min(N_S, 2*(O_in+O_out)+1) = {} violated (s={})",
                chained, c.slots_per_buffer));
    }
    const std::size_t n_max = compute_n_max(c.num_slices, c.workers_per_device, orders);
    if (!c.allow_idle_devices && c.devices > std::max<std::size_t>(1, n_max))
        throw ConfigError(fmt::format("too many devices: N_GPU <= N_max violated (N_GPU={}, N_max={} for N_S={}, "
                                      "N_wGPU={}, O_in={}, O_out={})",
                                      c.devices, n_max, c.num_slices, c.workers_per_device, orders.input,
                                      orders.output));
}

RingTopology ring_wire(const PipelineConfig& config, StencilOrders orders) {
    check_feasible(config, orders);
    RingTopology topo;
    const std::size_t per_device = config.workers_per_device + 1;
    for (std::size_t d = 0; d < config.devices; ++d) {
        const std::size_t first = d * per_device;
        topo.devices.push_back({first, first, first + config.workers_per_device, (d + 1) % config.devices});
        for (std::size_t j = 0; j < config.workers_per_device; ++j)
            topo.workers.push_back({d, j, first + j, first + j + 1});
    }
    topo.buffer_count = config.devices * per_device;
    return topo;
}

} // namespace dsea::stream
