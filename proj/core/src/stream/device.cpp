#include "dsea/stream/device.hpp"

#include "dsea/common/error.hpp"

#include <algorithm>
#include <stdexcept>

namespace dsea::stream {

namespace {

struct Window {
    std::size_t lo;  // first existing slice
    std::size_t hi;  // last existing slice
};

Window clip(std::size_t central, std::size_t order, std::size_t num_slices) {
    const std::size_t lo = central > order ? central - order : 1;
    const std::size_t hi = std::min(central + order, num_slices);
    return {lo, hi};
}

} // namespace

bool worker_ready(const RingBuffer& input, StencilOrders orders, std::size_t central, std::size_t num_slices,
                  std::uint64_t timestep, const RingBuffer& output) {
    const auto in = clip(central, orders.input, num_slices);
    for (std::size_t i = in.lo; i <= in.hi; ++i)
        if (!input.find_ready(i, timestep)) return false;
    const auto out = clip(central, orders.output, num_slices);
    std::size_t fresh = 0;
    for (std::size_t i = out.lo; i <= out.hi; ++i)
        if (!output.find(i, timestep + 1)) ++fresh;
    return output.free_count() >= fresh;
}

Device::Device(std::size_t ordinal, const PipelineConfig& config, StencilOrders orders,
               std::uint64_t start_timestep)
    : ordinal_(ordinal),
      config_(config),
      orders_(orders),
      start_timestep_(start_timestep),
      total_(config.super_cycles * config.num_slices),
      workers_(config.workers_per_device) {
    buffers_.reserve(config.workers_per_device + 1);
    for (std::size_t b = 0; b <= config.workers_per_device; ++b) buffers_.emplace_back(config.slots_per_buffer);
}

std::uint64_t Device::expected_timestep_for(std::size_t local_worker, std::size_t pass) const {
    const std::size_t global = ordinal_ * config_.workers_per_device + local_worker;
    return start_timestep_ + static_cast<std::uint64_t>(pass * config_.num_workers() + global);
}

std::uint64_t Device::expected_timestep(std::size_t local_worker) const {
    return expected_timestep_for(local_worker, workers_[local_worker].pass);
}

bool Device::can_admit() const { return admitted_ < total_ && buffers_.front().free_count() > 0; }

void Device::admit(SliceEnvelope slice) {
    if (admitted_ >= total_) throw std::logic_error("device admitted more slices than scheduled");
    buffers_.front().acquire(std::move(slice), SlotState::Ready);
    ++admitted_;
}

bool Device::worker_done(std::size_t local_worker) const {
    return workers_[local_worker].pass >= config_.super_cycles;
}

bool Device::workers_done() const {
    for (std::size_t j = 0; j < workers_.size(); ++j)
        if (!worker_done(j)) return false;
    return true;
}

std::optional<WorkerJob> Device::begin(std::size_t local_worker) {
    if (worker_done(local_worker)) return std::nullopt;
    auto& state = workers_[local_worker];
    auto& in = buffers_[local_worker];
    auto& out = buffers_[local_worker + 1];
    const std::size_t n = config_.num_slices;
    const std::size_t c = state.next_central;
    const std::uint64_t ts = expected_timestep(local_worker);

    if (!worker_ready(in, orders_, c, n, ts, out)) return std::nullopt;

    WorkerJob job;
    job.local_worker = local_worker;
    job.context = {c, n, ts, ordinal_, ordinal_ * config_.workers_per_device + local_worker};

    job.inputs.assign(orders_.input_window(), nullptr);
    for (std::size_t k = 0; k < orders_.input_window(); ++k) {
        if (c + k < orders_.input + 1) continue;  // index below 1
        const std::size_t idx = c + k - orders_.input;
        if (idx > n) continue;
        job.inputs[k] = &in.slice(*in.find_ready(idx, ts));
    }

    job.outputs.assign(orders_.output_window(), nullptr);
    for (std::size_t k = 0; k < orders_.output_window(); ++k) {
        if (c + k < orders_.output + 1) continue;
        const std::size_t idx = c + k - orders_.output;
        if (idx > n) continue;
        std::size_t slot;
        bool first = false;
        if (auto existing = out.find(idx, ts + 1)) {
            slot = *existing;
        } else {
            slot = out.acquire(SliceEnvelope{idx, ts + 1, {}}, SlotState::Partial);
            first = true;
        }
        job.outputs[k] = &out.slice(slot).payload;
        job.output_slots.push_back(slot);
        job.first_contribution.push_back(first);
        job.contributed.push_back(idx);

        // Last contribution to idx happens at central min(idx + O_out, N_S).
        if (std::min(idx + orders_.output, n) == c) {
            job.finalized.push_back(idx);
            job.finalized_slices.push_back(&out.slice(slot));
        }
    }
    return job;
}

void Device::execute(WorkerJob& job, StencilKernel& kernel) const {
    try {
        kernel.process(job.context, job.inputs, job.outputs);
        for (auto* slice : job.finalized_slices) kernel.finalize(job.context, *slice);
    } catch (const KernelError&) {
        throw;
    } catch (const std::exception& e) {
        throw KernelError(job.context.central, job.context.device, job.context.worker, e.what());
    }
}

WorkerActivity Device::commit(WorkerJob& job) {
    const std::size_t j = job.local_worker;
    auto& state = workers_[j];
    auto& in = buffers_[j];
    auto& out = buffers_[j + 1];
    const std::size_t n = config_.num_slices;
    const std::size_t c = job.context.central;
    const std::uint64_t ts = job.context.timestep;

    for (std::size_t k = 0; k < job.output_slots.size(); ++k) {
        const std::size_t idx = job.contributed[k];
        const bool final = std::find(job.finalized.begin(), job.finalized.end(), idx) != job.finalized.end();
        if (final) out.transition(job.output_slots[k], SlotState::Ready);
        else if (!job.first_contribution[k]) out.transition(job.output_slots[k], SlotState::Partial);
    }

    // Slice c - O_in is not part of the next window; at the end of the pass
    // nothing of this generation is needed any more.
    const auto window = clip(c, orders_.input, n);
    const std::size_t release_hi = c == n ? window.hi : (c > orders_.input ? c - orders_.input : 0);
    for (std::size_t idx = window.lo; idx <= release_hi; ++idx)
        if (auto slot = in.find_ready(idx, ts)) in.release(*slot);

    WorkerActivity activity{j, c, ts + 1, job.contributed, job.finalized};
    if (c == n) {
        state.next_central = 1;
        ++state.pass;
    } else {
        ++state.next_central;
    }
    return activity;
}

bool Device::can_send() const {
    if (finished()) return false;
    const std::size_t last = workers_.size() - 1;
    const std::size_t pass = sent_ / config_.num_slices;
    const std::size_t idx = sent_ % config_.num_slices + 1;
    return buffers_.back().find_ready(idx, expected_timestep_for(last, pass) + 1).has_value();
}

SliceEnvelope Device::take_send() {
    if (!can_send()) throw std::logic_error("device has no slice ready to send");
    const std::size_t last = workers_.size() - 1;
    const std::size_t pass = sent_ / config_.num_slices;
    const std::size_t idx = sent_ % config_.num_slices + 1;
    auto slot = buffers_.back().find_ready(idx, expected_timestep_for(last, pass) + 1);
    ++sent_;
    return buffers_.back().release(*slot);
}

bool Device::output_resident(std::size_t local_worker, std::size_t index, std::uint64_t timestep) const {
    return buffers_[local_worker + 1].find(index, timestep).has_value();
}

} // namespace dsea::stream
