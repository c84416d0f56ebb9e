#include "dsea/transport/stripe.hpp"

#include <benchmark/benchmark.h>

#include <thread>

using namespace dsea;

namespace {

void BM_StripeReassemble(benchmark::State& state) {
    const auto bytes = static_cast<std::size_t>(state.range(0));
    const auto rails = static_cast<std::size_t>(state.range(1));
    stream::Payload payload(bytes, std::byte{0x5a});
    for (auto _ : state) {
        auto parts = transport::stripe(payload, rails);
        auto whole = transport::reassemble(parts);
        benchmark::DoNotOptimize(whole.data());
    }
    state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(bytes));
}
BENCHMARK(BM_StripeReassemble)->ArgsProduct({{1 << 12, 1 << 20, 1 << 24}, {1, 2, 4}});

// One producer and one consumer thread moving slices through a channel.
void BM_ChannelThroughput(benchmark::State& state) {
    const auto bytes = static_cast<std::size_t>(state.range(0));
    const auto rails = static_cast<std::size_t>(state.range(1));
    constexpr std::size_t kSlices = 64;
    for (auto _ : state) {
        auto channel = transport::make_channel(rails, 4);
        std::jthread consumer([&] {
            for (std::size_t i = 0; i < kSlices; ++i) benchmark::DoNotOptimize(channel->receive());
        });
        for (std::size_t i = 0; i < kSlices; ++i) channel->send({i + 1, 0, stream::Payload(bytes)});
    }
    state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(bytes * kSlices));
}
BENCHMARK(BM_ChannelThroughput)->ArgsProduct({{1 << 16, 1 << 20}, {1, 2, 4}})->UseRealTime();

} // namespace
