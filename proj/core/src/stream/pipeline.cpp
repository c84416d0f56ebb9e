#include "dsea/stream/pipeline.hpp"

#include "dsea/common/error.hpp"
#include "dsea/common/log.hpp"
#include "dsea/stream/device.hpp"
#include "dsea/transport/stripe.hpp"

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <exception>
#include <memory>
#include <mutex>
#include <thread>

#include <fmt/format.h>

namespace dsea::stream {

namespace {

using Clock = std::chrono::steady_clock;

/// Kernel that touches nothing; drives the schedule for feasibility checks.
class NullKernel final : public StencilKernel {
public:
    explicit NullKernel(StencilOrders orders) : orders_(orders) {}
    StencilOrders orders() const override { return orders_; }
    void process(const StencilContext&, std::span<const SliceEnvelope* const>, std::span<Payload* const>) override {}

private:
    StencilOrders orders_;
};

class DiscardSink final : public SliceSink {
public:
    void put(SliceEnvelope) override {}
};

/// Pulls the initial stream from a feed and checks its ordering contract.
class CheckedFeed {
public:
    CheckedFeed(SliceFeed& feed, std::size_t num_slices) : feed_(feed), num_slices_(num_slices) {}

    SliceEnvelope next() {
        auto slice = feed_.next();
        if (!slice)
            throw ConfigError(fmt::format("feed ended after {} of {} slices", pulled_, num_slices_));
        if (slice->index != pulled_ + 1)
            throw ConfigError(fmt::format("feed out of order: expected slice {}, got {}", pulled_ + 1, slice->index));
        if (pulled_ == 0) start_timestep_ = slice->timestep;
        else if (slice->timestep != start_timestep_)
            throw ConfigError(fmt::format("slice {} has timestep {}, expected {} like slice 1", slice->index,
                                          slice->timestep, start_timestep_));
        ++pulled_;
        return std::move(*slice);
    }

    std::size_t pulled() const noexcept { return pulled_; }
    std::uint64_t start_timestep() const noexcept { return start_timestep_; }

private:
    SliceFeed& feed_;
    std::size_t num_slices_;
    std::size_t pulled_ = 0;
    std::uint64_t start_timestep_ = 0;
};

std::vector<std::unique_ptr<transport::SliceChannel>> make_ring_channels(const PipelineConfig& c) {
    std::vector<std::unique_ptr<transport::SliceChannel>> out;
    for (std::size_t d = 0; d < c.devices; ++d) out.push_back(transport::make_channel(c.rails, c.link_capacity));
    return out;
}

double elapsed(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

} // namespace

ExecutionMode parse_execution_mode(std::string_view text) {
    if (text == "deterministic") return ExecutionMode::deterministic;
    if (text == "concurrent") return ExecutionMode::concurrent;
    throw ConfigError("unknown execution mode '" + std::string(text) + "' (deterministic|concurrent)");
}

std::optional<SliceEnvelope> VectorFeed::next() {
    if (next_ >= slices_.size()) return std::nullopt;
    return std::move(slices_[next_++]);
}

void check_schedulable(const PipelineConfig& config, StencilOrders orders) {
    check_feasible(config, orders);
    if (config.super_cycles == 0) return;
    NullKernel null_kernel(orders);
    Pipeline dry(config, null_kernel, Pipeline::unchecked);
    std::vector<SliceEnvelope> slices;
    for (std::size_t i = 1; i <= config.num_slices; ++i) slices.push_back({i, 0, {}});
    VectorFeed feed(std::move(slices));
    DiscardSink sink;
    dry.run_lockstep(feed, sink, null_kernel, false);
}

std::size_t minimum_slots(PipelineConfig config, StencilOrders orders) {
    const std::size_t limit = 2 * config.num_slices + 2 * (orders.input + orders.output) + 2;
    for (std::size_t s = 1; s <= limit; ++s) {
        config.slots_per_buffer = s;
        try {
            check_schedulable(config, orders);
            return s;
        } catch (const ConfigError&) {
        }
    }
    config.slots_per_buffer = limit;
    check_schedulable(config, orders);  // rethrows the diagnostic
    return limit;
}

Pipeline::Pipeline(PipelineConfig config, StencilKernel& kernel)
    : config_(config), kernel_(kernel), topology_(ring_wire(config, kernel.orders())) {
    check_schedulable(config_, kernel_.orders());
}

Pipeline::Pipeline(PipelineConfig config, StencilKernel& kernel, Unchecked)
    : config_(config), kernel_(kernel), topology_(ring_wire(config, kernel.orders())) {}

RunReport Pipeline::run(SliceFeed& feed, SliceSink& sink, ExecutionMode mode, bool record_trace) {
    if (config_.super_cycles == 0) {
        const auto start = Clock::now();
        CheckedFeed checked(feed, config_.num_slices);
        while (checked.pulled() < config_.num_slices) sink.put(checked.next());
        return {{}, 0, elapsed(start)};
    }
    if (mode == ExecutionMode::deterministic) return run_lockstep(feed, sink, kernel_, record_trace);
    // The constructor proved the buffers against the lockstep schedule, which
    // the threaded run cannot check for itself.
    return run_threaded(feed, sink);
}

RunReport Pipeline::run_lockstep(SliceFeed& feed, SliceSink& sink, StencilKernel& kernel, bool record_trace) {
    const auto start = Clock::now();
    const auto& c = config_;
    const std::size_t n_dev = c.devices;
    const std::size_t per_dev = c.workers_per_device;

    CheckedFeed checked(feed, c.num_slices);
    std::optional<SliceEnvelope> pending = checked.next();
    const std::uint64_t t0 = checked.start_timestep();
    const std::uint64_t final_ts = t0 + c.super_cycles * c.num_workers();

    std::vector<Device> devices;
    devices.reserve(n_dev);
    for (std::size_t d = 0; d < n_dev; ++d) devices.emplace_back(d, c, kernel.orders(), t0);
    auto channels = make_ring_channels(c);

    RunReport report;
    std::size_t delivered = 0;
    std::size_t stage = 0;
    std::vector<std::optional<WorkerActivity>> activity(n_dev * per_dev);
    std::vector<std::optional<std::size_t>> sent(n_dev), received(n_dev);

    while (delivered < c.num_slices) {
        ++stage;
        bool progress = false;
        std::fill(activity.begin(), activity.end(), std::nullopt);
        std::fill(sent.begin(), sent.end(), std::nullopt);
        std::fill(received.begin(), received.end(), std::nullopt);

        // Workers run in order on each device and see what earlier workers
        // finalised in this stage.
        for (std::size_t d = 0; d < n_dev; ++d) {
            for (std::size_t j = 0; j < per_dev; ++j) {
                auto job = devices[d].begin(j);
                if (!job) continue;
                devices[d].execute(*job, kernel);
                activity[d * per_dev + j] = devices[d].commit(*job);
                progress = true;
            }
        }

        for (std::size_t d = 0; d < n_dev; ++d) {
            auto& dev = devices[d];
            if (!dev.can_send()) continue;
            const bool leaves_ring = d == n_dev - 1 && dev.sent() >= (c.super_cycles - 1) * c.num_slices;
            if (leaves_ring) {
                auto slice = dev.take_send();
                if (slice.timestep != final_ts) throw std::logic_error("final slice has wrong timestep");
                sent[d] = slice.index;
                sink.put(std::move(slice));
                ++delivered;
                progress = true;
            } else if (channels[d]->can_accept()) {
                auto slice = dev.take_send();
                sent[d] = slice.index;
                if (!channels[d]->try_send(slice)) throw std::logic_error("ring link refused a checked send");
                progress = true;
            }
        }

        for (std::size_t d = 0; d < n_dev; ++d) {
            auto& dev = devices[d];
            if (!dev.can_admit()) continue;
            std::optional<SliceEnvelope> slice;
            if (d == 0 && dev.admitted() < c.num_slices) {
                if (!pending) pending = checked.next();
                slice = std::move(pending);
                pending.reset();
            } else {
                slice = channels[(d + n_dev - 1) % n_dev]->try_receive();
            }
            if (!slice) continue;
            received[d] = slice->index;
            dev.admit(std::move(*slice));
            progress = true;
        }

        if (record_trace) {
            for (std::size_t d = 0; d < n_dev; ++d) {
                for (std::size_t j = 0; j < per_dev; ++j) {
                    StageEvent e;
                    e.stage = stage;
                    e.device = d;
                    e.worker = d * per_dev + j;
                    if (j == 0) e.received = received[d];
                    if (j == per_dev - 1) e.sent = sent[d];
                    if (const auto& a = activity[d * per_dev + j]) {
                        e.processed = a->processed;
                        for (auto idx : a->contributed)
                            if (devices[d].output_resident(j, idx, a->output_timestep)) e.partial_out.push_back(idx);
                    }
                    report.trace.push_back(std::move(e));
                }
            }
        }

        if (!progress) {
            throw DeadlockError(fmt::format(
                "pipeline stalled at stage {} with {} of {} slices undelivered; the buffers cannot hold the "
                "stream: s * N_b > N_S is necessary but not sufficient here (s={}, N_b={}, N_S={}, N_GPU={}, "
                "N_wGPU={}); increase slots per buffer",
                stage, c.num_slices - delivered, c.num_slices, c.slots_per_buffer, c.num_buffers(), c.num_slices,
                c.devices, c.workers_per_device));
        }
    }
    report.stages = stage;
    report.seconds = elapsed(start);
    return report;
}

RunReport Pipeline::run_threaded(SliceFeed& feed, SliceSink& sink) {
    const auto start = Clock::now();
    const auto& c = config_;
    const std::size_t n_dev = c.devices;
    const std::size_t total = c.super_cycles * c.num_slices;

    CheckedFeed checked(feed, c.num_slices);
    std::optional<SliceEnvelope> first = checked.next();
    const std::uint64_t t0 = checked.start_timestep();
    const std::uint64_t final_ts = t0 + c.super_cycles * c.num_workers();

    struct DeviceSync {
        std::mutex mutex;
        std::condition_variable cv;
    };
    std::vector<Device> devices;
    devices.reserve(n_dev);
    for (std::size_t d = 0; d < n_dev; ++d) devices.emplace_back(d, c, kernel_.orders(), t0);
    std::vector<DeviceSync> sync(n_dev);
    auto channels = make_ring_channels(c);

    std::atomic<bool> abort{false};
    std::mutex error_mutex;
    std::exception_ptr error;

    auto fail = [&](std::exception_ptr e) {
        {
            std::lock_guard lock(error_mutex);
            if (!error) error = e;
        }
        abort.store(true);
        for (auto& ch : channels) ch->close();
        for (auto& s : sync) {
            std::lock_guard lock(s.mutex);
            s.cv.notify_all();
        }
    };

    auto input_role = [&](std::size_t d) {
        try {
            for (std::size_t n = 0; n < total && !abort.load(); ++n) {
                std::optional<SliceEnvelope> slice;
                if (d == 0 && n < c.num_slices) slice = n == 0 ? std::move(first) : checked.next();
                else slice = channels[(d + n_dev - 1) % n_dev]->receive();
                if (!slice) return;  // shutdown
                std::unique_lock lock(sync[d].mutex);
                sync[d].cv.wait(lock, [&] { return abort.load() || devices[d].can_admit(); });
                if (abort.load()) return;
                devices[d].admit(std::move(*slice));
                sync[d].cv.notify_all();
            }
        } catch (...) {
            fail(std::current_exception());
        }
    };

    auto main_role = [&](std::size_t d) {
        try {
            auto& dev = devices[d];
            std::unique_lock lock(sync[d].mutex);
            while (!abort.load() && !dev.workers_done()) {
                std::optional<WorkerJob> job;
                for (std::size_t j = 0; j < c.workers_per_device && !job; ++j) job = dev.begin(j);
                if (!job) {
                    sync[d].cv.wait(lock);
                    continue;
                }
                lock.unlock();
                dev.execute(*job, kernel_);
                lock.lock();
                dev.commit(*job);
                sync[d].cv.notify_all();
            }
        } catch (...) {
            fail(std::current_exception());
        }
    };

    auto output_role = [&](std::size_t d) {
        try {
            for (std::size_t n = 0; n < total; ++n) {
                SliceEnvelope slice;
                {
                    std::unique_lock lock(sync[d].mutex);
                    sync[d].cv.wait(lock, [&] { return abort.load() || devices[d].can_send(); });
                    if (abort.load()) return;
                    slice = devices[d].take_send();
                    sync[d].cv.notify_all();
                }
                if (d == n_dev - 1 && slice.timestep == final_ts) sink.put(std::move(slice));
                else if (channels[d]->send(std::move(slice)) == transport::LinkStatus::shutdown) return;
            }
        } catch (...) {
            fail(std::current_exception());
        }
    };

    {
        std::vector<std::jthread> threads;
        threads.reserve(3 * n_dev);
        for (std::size_t d = 0; d < n_dev; ++d) {
            threads.emplace_back(input_role, d);
            threads.emplace_back(main_role, d);
            threads.emplace_back(output_role, d);
        }
    }
    for (auto& ch : channels) ch->close();
    if (error) std::rethrow_exception(error);
    log::debug("threaded run finished: {} devices, {} slices x {} super-cycles", n_dev, c.num_slices,
               c.super_cycles);
    return {{}, 0, elapsed(start)};
}

SuperCycleResult run_super_cycles(const PipelineConfig& config, StencilKernel& kernel,
                                  std::vector<SliceEnvelope> slices, ExecutionMode mode, bool record_trace) {
    Pipeline pipeline(config, kernel);
    VectorFeed feed(std::move(slices));
    VectorSink sink;
    auto report = pipeline.run(feed, sink, mode, record_trace);
    return {std::move(sink.slices), std::move(report)};
}

} // namespace dsea::stream
