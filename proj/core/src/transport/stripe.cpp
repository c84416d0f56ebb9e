#include "dsea/transport/stripe.hpp"

#include "dsea/common/error.hpp"

#include <algorithm>
#include <stdexcept>

namespace dsea::transport {

std::vector<Payload> stripe(std::span<const std::byte> payload, std::size_t rails) {
    if (rails < 1) throw ConfigError("stripe: rail count must be at least 1");
    const std::size_t base = payload.size() / rails;
    const std::size_t extra = payload.size() % rails;
    std::vector<Payload> out;
    out.reserve(rails);
    std::size_t offset = 0;
    for (std::size_t r = 0; r < rails; ++r) {
        const std::size_t len = base + (r < extra ? 1 : 0);
        out.emplace_back(payload.begin() + static_cast<std::ptrdiff_t>(offset),
                         payload.begin() + static_cast<std::ptrdiff_t>(offset + len));
        offset += len;
    }
    return out;
}

Payload reassemble(std::span<const Payload> segments) {
    std::size_t total = 0;
    for (const auto& s : segments) total += s.size();
    Payload out;
    out.reserve(total);
    for (const auto& s : segments) out.insert(out.end(), s.begin(), s.end());
    return out;
}

StripedChannel::StripedChannel(std::size_t rails, std::size_t capacity) {
    if (rails < 1) throw ConfigError("striped channel needs at least one rail");
    rails_.reserve(rails);
    for (std::size_t r = 0; r < rails; ++r) rails_.push_back(std::make_unique<Link<Segment>>(capacity));
}

LinkStatus StripedChannel::send(SliceEnvelope&& slice) {
    auto parts = stripe(slice.payload, rails_.size());
    slice.payload.clear();
    for (std::size_t r = 0; r < rails_.size(); ++r) {
        Segment seg{slice.index, slice.timestep, std::move(parts[r])};
        if (rails_[r]->send(std::move(seg)) == LinkStatus::shutdown) return LinkStatus::shutdown;
    }
    return LinkStatus::delivered;
}

bool StripedChannel::can_accept() const {
    for (const auto& rail : rails_)
        if (rail->closed() || rail->full()) return false;
    return true;
}

bool StripedChannel::try_send(SliceEnvelope& slice) {
    // All rails are fed by this one producer, so free capacity cannot shrink
    // between the check and the pushes below.
    if (!can_accept()) return false;
    auto parts = stripe(slice.payload, rails_.size());
    for (std::size_t r = 0; r < rails_.size(); ++r) {
        Segment seg{slice.index, slice.timestep, std::move(parts[r])};
        if (!rails_[r]->try_send(seg)) throw std::logic_error("striped channel: rail filled concurrently");
    }
    slice.payload.clear();
    return true;
}

std::optional<SliceEnvelope> StripedChannel::receive() {
    std::vector<Segment> parts;
    parts.reserve(rails_.size());
    for (auto& rail : rails_) {
        auto seg = rail->receive();
        if (!seg) return std::nullopt;
        parts.push_back(std::move(*seg));
    }
    return assemble(std::move(parts));
}

std::optional<SliceEnvelope> StripedChannel::try_receive() {
    for (const auto& rail : rails_)
        if (rail->size() == 0) return std::nullopt;
    std::vector<Segment> parts;
    parts.reserve(rails_.size());
    for (auto& rail : rails_) parts.push_back(std::move(*rail->try_receive()));
    return assemble(std::move(parts));
}

void StripedChannel::close() {
    for (auto& rail : rails_) rail->close();
}

std::optional<SliceEnvelope> StripedChannel::assemble(std::vector<Segment> parts) {
    SliceEnvelope out{parts.front().index, parts.front().timestep, {}};
    std::vector<Payload> bytes;
    bytes.reserve(parts.size());
    for (auto& p : parts) {
        if (p.index != out.index || p.timestep != out.timestep)
            throw FormatError("striped channel: rails delivered segments of different slices");
        bytes.push_back(std::move(p.bytes));
    }
    out.payload = reassemble(bytes);
    return out;
}

std::unique_ptr<SliceChannel> make_channel(std::size_t rails, std::size_t capacity) {
    if (rails <= 1) return std::make_unique<DirectChannel>(capacity);
    return std::make_unique<StripedChannel>(rails, capacity);
}

} // namespace dsea::transport
