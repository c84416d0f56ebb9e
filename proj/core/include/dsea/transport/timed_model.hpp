#pragma once

#include "dsea/stream/pipeline_config.hpp"

#include <cstddef>
#include <limits>

namespace dsea::transport {

/// Rails used for one inter-node transfer. Defaults: a 200 Gb/s class NIC
/// sustaining ~20 GB/s for large messages.
struct RailSet {
    std::size_t rails = 1;
    double rail_bandwidth = 20e9;  ///< bytes/s per rail
    double latency = 1e-6;         ///< s per message
};

struct TimedModel {
    double compute_time_per_slice = 1e-3;  ///< t_c: one worker advancing one slice, s
    RailSet rails;
    /// Device-to-device bandwidth inside a node; also prices the distribute
    /// and combine copies of a striped transfer. Infinity disables that cost.
    double intra_device_bandwidth = 250e9;
    std::size_t devices_per_node = 1;

    void validate() const;
};

/// latency + bytes / (R * bw) + (R > 1 ? 2 * bytes / intra_bw : 0)
double predict_transfer_time(std::size_t bytes, const RailSet& rails,
                             double intra_device_bandwidth = std::numeric_limits<double>::infinity());

/// Copy between two devices of the same node.
double predict_local_transfer_time(std::size_t bytes, double intra_device_bandwidth);

struct ThroughputPrediction {
    double stage_compute_time = 0;   ///< N_wGPU * t_c
    double transfer_time = 0;        ///< slowest ring link
    double stage_period = 0;         ///< max of the two
    std::size_t active_devices = 0;  ///< min(N_GPU, max(1, N_max))
    double slices_per_second = 0;    ///< slice-steps per second over all workers
    double molecules_per_second = 0;
    bool transfer_bound = false;
    bool plateau = false;            ///< N_GPU > N_max
};

/// Steady-state throughput of the ring: every active worker advances one
/// slice per stage; a stage lasts as long as the slower of compute and the
/// slowest outgoing transfer.
ThroughputPrediction predict_throughput(const TimedModel& model, const stream::PipelineConfig& pipeline,
                                        stream::StencilOrders orders, std::size_t slice_bytes,
                                        double molecules_per_slice);

} // namespace dsea::transport
