#pragma once

#include "dsea/stream/slice.hpp"
#include "dsea/transport/link.hpp"

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace dsea::transport {

using stream::Payload;
using stream::SliceEnvelope;

/// Splits `payload` into `rails` contiguous segments whose sizes differ by at
/// most one byte; the first `size % rails` segments carry the extra byte.
std::vector<Payload> stripe(std::span<const std::byte> payload, std::size_t rails);

/// Concatenates segments in order.
Payload reassemble(std::span<const Payload> segments);

/// Transfer path between two devices carrying whole slices.
class SliceChannel {
public:
    virtual ~SliceChannel() = default;

    virtual LinkStatus send(SliceEnvelope&& slice) = 0;
    /// Non-blocking; on failure the slice stays with the caller.
    virtual bool try_send(SliceEnvelope& slice) = 0;
    virtual std::optional<SliceEnvelope> receive() = 0;
    virtual std::optional<SliceEnvelope> try_receive() = 0;
    /// True if try_send would succeed now (single-producer view).
    virtual bool can_accept() const = 0;
    virtual void close() = 0;
};

/// Single link carrying the envelope as is.
class DirectChannel final : public SliceChannel {
public:
    explicit DirectChannel(std::size_t capacity) : link_(capacity) {}

    LinkStatus send(SliceEnvelope&& slice) override { return link_.send(std::move(slice)); }
    bool try_send(SliceEnvelope& slice) override { return link_.try_send(slice); }
    std::optional<SliceEnvelope> receive() override { return link_.receive(); }
    std::optional<SliceEnvelope> try_receive() override { return link_.try_receive(); }
    bool can_accept() const override { return !link_.closed() && !link_.full(); }
    void close() override { link_.close(); }

private:
    Link<SliceEnvelope> link_;
};

/// Stripes each payload across R rail links and reassembles on receipt.
/// Slice identity travels with every segment; the receiver checks that all
/// rails agree.
class StripedChannel final : public SliceChannel {
public:
    StripedChannel(std::size_t rails, std::size_t capacity);

    std::size_t rails() const noexcept { return rails_.size(); }

    LinkStatus send(SliceEnvelope&& slice) override;
    bool try_send(SliceEnvelope& slice) override;
    std::optional<SliceEnvelope> receive() override;
    std::optional<SliceEnvelope> try_receive() override;
    bool can_accept() const override;
    void close() override;

private:
    struct Segment {
        std::size_t index = 0;
        std::uint64_t timestep = 0;
        Payload bytes;
    };

    std::optional<SliceEnvelope> assemble(std::vector<Segment> parts);

    std::vector<std::unique_ptr<Link<Segment>>> rails_;
};

std::unique_ptr<SliceChannel> make_channel(std::size_t rails, std::size_t capacity);

} // namespace dsea::transport
