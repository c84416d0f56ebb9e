#pragma once

#include "dsea/stream/slice.hpp"

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string_view>

namespace dsea::stream {

enum class SlotState : std::uint8_t { Free, Partial, Ready };

std::string_view to_string(SlotState state);

/// Free->Partial, Free->Ready, Partial->Partial, Partial->Ready, Ready->Free.
bool is_legal_transition(SlotState from, SlotState to) noexcept;

/// Fixed-capacity circular slot storage for slices.
///
/// Slot states are atomics so that a reader polling `state()` from another
/// execution context observes transitions with acquire/release ordering.
/// Payload access is not synchronised here; the device that owns the buffer
/// serialises structural changes (acquire/release) under its own lock, and a
/// payload is only touched by the role that currently owns the slot.
class RingBuffer {
public:
    using TransitionObserver = std::function<void(SlotState from, SlotState to)>;

    explicit RingBuffer(std::size_t capacity);

    RingBuffer(const RingBuffer&) = delete;
    RingBuffer& operator=(const RingBuffer&) = delete;
    RingBuffer(RingBuffer&&) = default;
    RingBuffer& operator=(RingBuffer&&) = default;

    std::size_t capacity() const noexcept { return capacity_; }
    std::size_t free_count() const noexcept;
    std::size_t resident_count() const noexcept { return capacity_ - free_count(); }

    SlotState state(std::size_t slot) const noexcept;

    /// Slot holding the slice with this identity in any non-Free state.
    std::optional<std::size_t> find(std::size_t index, std::uint64_t timestep) const noexcept;
    /// Like find(), restricted to Ready slots.
    std::optional<std::size_t> find_ready(std::size_t index, std::uint64_t timestep) const noexcept;

    /// Claims the next Free slot (circular search from the last claim) and moves
    /// it to `initial` (Partial or Ready). Throws if the buffer is full.
    std::size_t acquire(SliceEnvelope slice, SlotState initial);

    /// Moves a slot along a legal transition; throws std::logic_error otherwise.
    void transition(std::size_t slot, SlotState to);

    /// Ready -> Free, handing the slice to the caller.
    SliceEnvelope release(std::size_t slot);

    SliceEnvelope& slice(std::size_t slot) { return slots_[slot].slice; }
    const SliceEnvelope& slice(std::size_t slot) const { return slots_[slot].slice; }

    void set_observer(TransitionObserver observer) { observer_ = std::move(observer); }

private:
    struct Slot {
        std::atomic<SlotState> state{SlotState::Free};
        SliceEnvelope slice;
    };

    void move_state(Slot& slot, SlotState to);

    std::size_t capacity_ = 0;
    std::unique_ptr<Slot[]> slots_;
    std::size_t cursor_ = 0;
    TransitionObserver observer_;
};

} // namespace dsea::stream
