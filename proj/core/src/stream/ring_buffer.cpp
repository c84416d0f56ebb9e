#include "dsea/stream/ring_buffer.hpp"

#include <stdexcept>
#include <string>

namespace dsea::stream {

std::string_view to_string(SlotState state) {
    switch (state) {
    case SlotState::Free: return "free";
    case SlotState::Partial: return "partial";
    case SlotState::Ready: return "ready";
    }
    return "?";
}

bool is_legal_transition(SlotState from, SlotState to) noexcept {
    switch (from) {
    case SlotState::Free: return to == SlotState::Partial || to == SlotState::Ready;
    case SlotState::Partial: return to == SlotState::Partial || to == SlotState::Ready;
    case SlotState::Ready: return to == SlotState::Free;
    }
    return false;
}

RingBuffer::RingBuffer(std::size_t capacity)
    : capacity_(capacity), slots_(std::make_unique<Slot[]>(capacity)) {
    if (capacity == 0) throw std::invalid_argument("ring buffer needs at least one slot");
}

std::size_t RingBuffer::free_count() const noexcept {
    std::size_t n = 0;
    for (std::size_t i = 0; i < capacity_; ++i)
        if (slots_[i].state.load(std::memory_order_acquire) == SlotState::Free) ++n;
    return n;
}

SlotState RingBuffer::state(std::size_t slot) const noexcept {
    return slots_[slot].state.load(std::memory_order_acquire);
}

std::optional<std::size_t> RingBuffer::find(std::size_t index, std::uint64_t timestep) const noexcept {
    for (std::size_t i = 0; i < capacity_; ++i) {
        const auto& s = slots_[i];
        if (s.state.load(std::memory_order_acquire) != SlotState::Free && s.slice.index == index &&
            s.slice.timestep == timestep)
            return i;
    }
    return std::nullopt;
}

std::optional<std::size_t> RingBuffer::find_ready(std::size_t index, std::uint64_t timestep) const noexcept {
    auto slot = find(index, timestep);
    if (slot && state(*slot) == SlotState::Ready) return slot;
    return std::nullopt;
}

std::size_t RingBuffer::acquire(SliceEnvelope slice, SlotState initial) {
    for (std::size_t n = 0; n < capacity_; ++n) {
        const std::size_t i = (cursor_ + n) % capacity_;
        if (slots_[i].state.load(std::memory_order_acquire) != SlotState::Free) continue;
        slots_[i].slice = std::move(slice);
        move_state(slots_[i], initial);
        cursor_ = (i + 1) % capacity_;
        return i;
    }
    throw std::logic_error("ring buffer full: no free slot for slice " + std::to_string(slice.index));
}

void RingBuffer::transition(std::size_t slot, SlotState to) { move_state(slots_[slot], to); }

SliceEnvelope RingBuffer::release(std::size_t slot) {
    auto& s = slots_[slot];
    SliceEnvelope out = std::move(s.slice);
    s.slice = SliceEnvelope{};
    move_state(s, SlotState::Free);
    return out;
}

void RingBuffer::move_state(Slot& slot, SlotState to) {
    const SlotState from = slot.state.load(std::memory_order_acquire);
    if (!is_legal_transition(from, to))
        throw std::logic_error("illegal slot transition " + std::string(to_string(from)) + " -> " +
                               std::string(to_string(to)));
    if (observer_) observer_(from, to);
    slot.state.store(to, std::memory_order_release);
}

} // namespace dsea::stream
