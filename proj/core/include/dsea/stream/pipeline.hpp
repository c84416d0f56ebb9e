#pragma once

#include "dsea/stream/kernel.hpp"
#include "dsea/stream/pipeline_config.hpp"
#include "dsea/stream/slice.hpp"
#include "dsea/stream/trace.hpp"

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

namespace dsea::stream {

enum class ExecutionMode {
    deterministic,  ///< single thread, lockstep stages, round-robin over devices
    concurrent,     ///< input/main/output threads per device
};

ExecutionMode parse_execution_mode(std::string_view text);

/// Source of the initial slices, in ascending index order.
class SliceFeed {
public:
    virtual ~SliceFeed() = default;
    virtual std::optional<SliceEnvelope> next() = 0;
};

/// Receiver of slices leaving the last worker in the last super-cycle, in
/// ascending index order.
class SliceSink {
public:
    virtual ~SliceSink() = default;
    virtual void put(SliceEnvelope slice) = 0;
};

class VectorFeed final : public SliceFeed {
public:
    explicit VectorFeed(std::vector<SliceEnvelope> slices) : slices_(std::move(slices)) {}
    std::optional<SliceEnvelope> next() override;

private:
    std::vector<SliceEnvelope> slices_;
    std::size_t next_ = 0;
};

class VectorSink final : public SliceSink {
public:
    void put(SliceEnvelope slice) override { slices.push_back(std::move(slice)); }
    std::vector<SliceEnvelope> slices;
};

struct RunReport {
    std::vector<StageEvent> trace;  ///< deterministic mode with tracing only
    std::size_t stages = 0;         ///< deterministic mode only
    double seconds = 0;             ///< wall clock of the run
};

/// A ring of devices streaming slices through N_w workers for K super-cycles.
class Pipeline {
public:
    /// Wires the ring and dry-runs the schedule; throws ConfigError (or
    /// DeadlockError) on configurations that cannot complete.
    Pipeline(PipelineConfig config, StencilKernel& kernel);

    const PipelineConfig& config() const noexcept { return config_; }
    const RingTopology& topology() const noexcept { return topology_; }

    /// Streams every slice of `feed` through K super-cycles into `sink`.
    /// Each slice leaves with its timestep advanced by K * N_w.
    RunReport run(SliceFeed& feed, SliceSink& sink, ExecutionMode mode, bool record_trace = false);

private:
    friend void check_schedulable(const PipelineConfig&, StencilOrders);
    struct Unchecked {};
    static constexpr Unchecked unchecked{};
    Pipeline(PipelineConfig config, StencilKernel& kernel, Unchecked);

    RunReport run_lockstep(SliceFeed& feed, SliceSink& sink, StencilKernel& kernel, bool record_trace);
    RunReport run_threaded(SliceFeed& feed, SliceSink& sink);

    PipelineConfig config_;
    StencilKernel& kernel_;
    RingTopology topology_;
};

/// check_feasible() plus a payload-free lockstep run of the whole schedule.
/// s * N_b > N_S is necessary but not sufficient: workers keep input and
/// output copies of a slice resident at the same time.
void check_schedulable(const PipelineConfig& config, StencilOrders orders);

/// Smallest slots-per-buffer for which `config` passes check_schedulable().
std::size_t minimum_slots(PipelineConfig config, StencilOrders orders);

struct SuperCycleResult {
    std::vector<SliceEnvelope> slices;
    RunReport report;
};

/// Convenience wrapper over Pipeline::run for in-memory datasets.
SuperCycleResult run_super_cycles(const PipelineConfig& config, StencilKernel& kernel,
                                  std::vector<SliceEnvelope> slices, ExecutionMode mode,
                                  bool record_trace = false);

} // namespace dsea::stream
