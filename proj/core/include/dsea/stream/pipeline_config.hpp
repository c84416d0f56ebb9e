#pragma once

#include "dsea/stream/kernel.hpp"

#include <cstddef>
#include <vector>

namespace dsea::stream {

struct PipelineConfig {
    std::size_t devices = 1;             ///< N_GPU
    std::size_t workers_per_device = 1;  ///< N_wGPU
    std::size_t num_slices = 0;          ///< N_S
    std::size_t slots_per_buffer = 0;    ///< s
    std::size_t super_cycles = 1;        ///< K
    std::size_t link_capacity = 1;       ///< slices in flight per device-to-device link
    std::size_t rails = 1;               ///< stripes per inter-device transfer
    /// Run even when N_GPU exceeds N_max; surplus devices idle part of the time.
    bool allow_idle_devices = false;

    std::size_t num_workers() const noexcept { return devices * workers_per_device; }
    std::size_t num_buffers() const noexcept { return num_workers() + devices; }
};

/// Largest device count that keeps every device busy:
/// floor(N_S / (2 + N_wGPU * (O_in + O_out))).
std::size_t compute_n_max(std::size_t num_slices, std::size_t workers_per_device, StencilOrders orders);

/// Throws ConfigError naming the first violated condition.
void check_feasible(const PipelineConfig& config, StencilOrders orders);

/// Buffer ids of the wired ring. Device d owns buffers
/// [first_buffer, first_buffer + N_wGPU]: its input buffer followed by one
/// output buffer per worker. Worker j on a device reads buffer j and writes
/// buffer j+1 (local numbering). The last buffer of device d feeds the input
/// buffer of device (d+1) mod N_GPU.
struct RingTopology {
    struct DeviceWiring {
        std::size_t first_buffer = 0;
        std::size_t input_buffer = 0;
        std::size_t output_buffer = 0;
        std::size_t next_device = 0;
    };
    struct WorkerWiring {
        std::size_t device = 0;
        std::size_t local = 0;
        std::size_t input_buffer = 0;
        std::size_t output_buffer = 0;
    };

    std::vector<DeviceWiring> devices;
    std::vector<WorkerWiring> workers;  ///< indexed by global worker ordinal
    std::size_t buffer_count = 0;
};

/// Validates the configuration and lays out the unidirectional ring.
RingTopology ring_wire(const PipelineConfig& config, StencilOrders orders);

} // namespace dsea::stream
