#include "dsea/transport/timed_model.hpp"

#include "dsea/common/error.hpp"

#include <algorithm>
#include <cmath>

namespace dsea::transport {

void TimedModel::validate() const {
    if (!(compute_time_per_slice > 0)) throw ConfigError("timed model: compute time per slice must be positive");
    if (rails.rails < 1) throw ConfigError("timed model: rail count must be at least 1");
    if (!(rails.rail_bandwidth > 0)) throw ConfigError("timed model: rail bandwidth must be positive");
    if (!(rails.latency >= 0)) throw ConfigError("timed model: latency must be non-negative");
    if (!(intra_device_bandwidth > 0)) throw ConfigError("timed model: intra-device bandwidth must be positive");
    if (devices_per_node < 1) throw ConfigError("timed model: devices per node must be at least 1");
}

double predict_transfer_time(std::size_t bytes, const RailSet& rails, double intra_device_bandwidth) {
    const double b = static_cast<double>(bytes);
    const double r = static_cast<double>(rails.rails);
    double t = rails.latency + b / (r * rails.rail_bandwidth);
    if (rails.rails > 1) t += 2.0 * b / intra_device_bandwidth;
    return t;
}

double predict_local_transfer_time(std::size_t bytes, double intra_device_bandwidth) {
    return static_cast<double>(bytes) / intra_device_bandwidth;
}

ThroughputPrediction predict_throughput(const TimedModel& model, const stream::PipelineConfig& pipeline,
                                        stream::StencilOrders orders, std::size_t slice_bytes,
                                        double molecules_per_slice) {
    model.validate();
    ThroughputPrediction p;
    p.stage_compute_time = static_cast<double>(pipeline.workers_per_device) * model.compute_time_per_slice;

    const std::size_t n = pipeline.devices;
    bool crosses_node = false;
    for (std::size_t d = 0; d < n; ++d)
        if (d / model.devices_per_node != ((d + 1) % n) / model.devices_per_node) crosses_node = true;
    p.transfer_time = crosses_node ? predict_transfer_time(slice_bytes, model.rails, model.intra_device_bandwidth)
                                   : predict_local_transfer_time(slice_bytes, model.intra_device_bandwidth);

    p.stage_period = std::max(p.stage_compute_time, p.transfer_time);
    p.transfer_bound = p.transfer_time > p.stage_compute_time;

    const std::size_t n_max = stream::compute_n_max(pipeline.num_slices, pipeline.workers_per_device, orders);
    p.active_devices = std::min(n, std::max<std::size_t>(1, n_max));
    p.plateau = n > std::max<std::size_t>(1, n_max);

    p.slices_per_second =
        static_cast<double>(p.active_devices * pipeline.workers_per_device) / p.stage_period;
    p.molecules_per_second = p.slices_per_second * molecules_per_slice;
    return p;
}

} // namespace dsea::transport
