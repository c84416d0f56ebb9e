#pragma once

#include "dsea/stream/kernel.hpp"
#include "dsea/stream/pipeline_config.hpp"
#include "dsea/stream/ring_buffer.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace dsea::stream {

/// Everything a worker needs to run one kernel invocation. Built by
/// Device::begin under the device lock; executed without it.
struct WorkerJob {
    StencilContext context;
    std::size_t local_worker = 0;
    std::vector<const SliceEnvelope*> inputs;
    std::vector<Payload*> outputs;
    std::vector<std::size_t> output_slots;     ///< slot per non-null output, window order
    std::vector<bool> first_contribution;      ///< parallel to output_slots
    std::vector<std::size_t> contributed;      ///< slice indices, ascending
    std::vector<std::size_t> finalized;        ///< slice indices that become Ready, ascending
    std::vector<SliceEnvelope*> finalized_slices;
};

/// What one worker did in one commit.
struct WorkerActivity {
    std::size_t local_worker = 0;
    std::size_t processed = 0;
    std::uint64_t output_timestep = 0;
    std::vector<std::size_t> contributed;
    std::vector<std::size_t> finalized;
};

/// Worker readiness test: every existing slice of the input window around
/// `central` is Ready in `input` at `timestep`, and `output` has a Free slot
/// for every slice of the output window that would receive its first
/// contribution.
bool worker_ready(const RingBuffer& input, StencilOrders orders, std::size_t central, std::size_t num_slices,
                  std::uint64_t timestep, const RingBuffer& output);

/// State machine of one device: an input buffer, N_wGPU workers in sequence,
/// and one output buffer per worker. The device is not synchronised; the
/// scheduler serialises calls (lockstep) or guards them with a lock (threads).
class Device {
public:
    Device(std::size_t ordinal, const PipelineConfig& config, StencilOrders orders,
           std::uint64_t start_timestep);

    std::size_t ordinal() const noexcept { return ordinal_; }

    // Input role.
    bool can_admit() const;
    void admit(SliceEnvelope slice);
    std::size_t admitted() const noexcept { return admitted_; }

    // Main role.
    std::optional<WorkerJob> begin(std::size_t local_worker);
    /// Runs the kernel and the finalize hook; wraps failures in KernelError.
    void execute(WorkerJob& job, StencilKernel& kernel) const;
    WorkerActivity commit(WorkerJob& job);
    bool worker_done(std::size_t local_worker) const;
    bool workers_done() const;

    // Output role.
    bool can_send() const;
    SliceEnvelope take_send();
    std::size_t sent() const noexcept { return sent_; }
    bool finished() const noexcept { return sent_ == total_; }

    /// Is slice (index, timestep) still held in worker `local_worker`'s output buffer?
    bool output_resident(std::size_t local_worker, std::size_t index, std::uint64_t timestep) const;

    RingBuffer& buffer(std::size_t local) { return buffers_[local]; }
    const RingBuffer& buffer(std::size_t local) const { return buffers_[local]; }
    std::size_t buffer_count() const noexcept { return buffers_.size(); }

    /// Timestep the given worker expects on its input slices in its current pass.
    std::uint64_t expected_timestep(std::size_t local_worker) const;

private:
    struct WorkerState {
        std::size_t next_central = 1;
        std::size_t pass = 0;
    };

    std::uint64_t expected_timestep_for(std::size_t local_worker, std::size_t pass) const;

    std::size_t ordinal_;
    PipelineConfig config_;
    StencilOrders orders_;
    std::uint64_t start_timestep_;
    std::size_t total_;  ///< slices through this device over all super-cycles

    std::vector<RingBuffer> buffers_;  ///< [0] input, [j+1] output of worker j
    std::vector<WorkerState> workers_;

    std::size_t admitted_ = 0;
    std::size_t sent_ = 0;
};

} // namespace dsea::stream
