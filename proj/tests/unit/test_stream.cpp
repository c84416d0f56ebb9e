#include "dsea/common/error.hpp"
#include "dsea/stream/device.hpp"
#include "dsea/stream/pipeline.hpp"
#include "dsea/stream/ring_buffer.hpp"

#include <fmt/format.h>
#include <gtest/gtest.h>

#include <map>
#include <set>
#include <sstream>

using namespace dsea;
using namespace dsea::stream;

namespace {

std::vector<SliceEnvelope> make_slices(std::size_t n, std::uint64_t ts = 0) {
    std::vector<SliceEnvelope> out;
    for (std::size_t i = 1; i <= n; ++i) {
        Payload p;
        for (std::size_t b = 0; b < i + 3; ++b) p.push_back(static_cast<std::byte>((i * 31 + b) & 0xff));
        out.push_back({i, ts, std::move(p)});
    }
    return out;
}

struct Row {
    std::optional<std::size_t> received, processed, sent;
    std::vector<std::size_t> partial;
};

// Stage pattern of one device with one worker, O_in = O_out = 1.
std::vector<Row> single_worker_schedule(std::size_t n) {
    std::vector<Row> rows(n + 3);
    for (std::size_t s = 1; s <= n + 3; ++s) {
        auto& r = rows[s - 1];
        if (s <= n) r.received = s;
        if (s >= 3 && s - 2 <= n) r.processed = s - 2;
        if (s >= 4) r.sent = s - 3;
        if (s >= 3 && s - 2 <= n) {
            for (std::size_t k = s - 2; k <= std::min(s - 1, n); ++k) r.partial.push_back(k);
        }
    }
    // the last processed slice finalises itself and its left neighbour
    rows[n + 1].partial = {n};
    return rows;
}

} // namespace

TEST(ComputeNMax, Examples) {
    EXPECT_EQ(compute_n_max(100, 1, {1, 1}), 25u);
    EXPECT_EQ(compute_n_max(10, 1, {0, 0}), 5u);
    EXPECT_EQ(compute_n_max(64, 2, {1, 1}), 10u);
}

TEST(ComputeNMax, DerivedFromScheduleFootprint) {
    // Busiest stage of a single device touches `footprint` distinct slices;
    // that many devices' worth of slices is what each one needs.
    IdentityKernel kernel({1, 1});
    PipelineConfig cfg{1, 2, 64, 64};
    auto result = run_super_cycles(cfg, kernel, make_slices(64), ExecutionMode::deterministic, true);
    std::map<std::size_t, std::set<std::size_t>> busy;
    for (const auto& e : result.report.trace) {
        auto& s = busy[e.stage];
        if (e.received) s.insert(*e.received);
        if (e.sent) s.insert(*e.sent);
        if (e.processed) {
            for (std::size_t k = *e.processed - std::min<std::size_t>(*e.processed - 1, 1); k <= std::min<std::size_t>(*e.processed + 1, 64); ++k)
                s.insert(k);
        }
    }
    std::size_t footprint = 0;
    for (auto& [_, s] : busy) footprint = std::max(footprint, s.size());
    EXPECT_EQ(footprint, 6u);
    EXPECT_EQ(64 / footprint, compute_n_max(64, 2, {1, 1}));
}

TEST(SlotState, LegalTransitions) {
    using S = SlotState;
    EXPECT_TRUE(is_legal_transition(S::Free, S::Partial));
    EXPECT_TRUE(is_legal_transition(S::Free, S::Ready));
    EXPECT_TRUE(is_legal_transition(S::Partial, S::Partial));
    EXPECT_TRUE(is_legal_transition(S::Partial, S::Ready));
    EXPECT_TRUE(is_legal_transition(S::Ready, S::Free));
    EXPECT_FALSE(is_legal_transition(S::Free, S::Free));
    EXPECT_FALSE(is_legal_transition(S::Partial, S::Free));
    EXPECT_FALSE(is_legal_transition(S::Ready, S::Partial));
    EXPECT_FALSE(is_legal_transition(S::Ready, S::Ready));
}

TEST(RingBuffer, AcquireReleaseAndCapacity) {
    RingBuffer buf(2);
    EXPECT_EQ(buf.free_count(), 2u);
    auto a = buf.acquire({1, 0, {}}, SlotState::Ready);
    auto b = buf.acquire({2, 0, {}}, SlotState::Partial);
    EXPECT_NE(a, b);
    EXPECT_THROW(buf.acquire({3, 0, {}}, SlotState::Ready), std::logic_error);
    EXPECT_EQ(buf.find(2, 0), b);
    EXPECT_FALSE(buf.find_ready(2, 0));
    EXPECT_THROW(buf.release(b), std::logic_error);
    buf.transition(b, SlotState::Ready);
    EXPECT_EQ(buf.release(a).index, 1u);
    EXPECT_EQ(buf.free_count(), 1u);
    EXPECT_THROW(buf.transition(a, SlotState::Free), std::logic_error);
    EXPECT_THROW(buf.transition(b, SlotState::Partial), std::logic_error);
}

TEST(WorkerReady, Examples) {
    RingBuffer in(4), out(4);
    in.acquire({1, 0, {}}, SlotState::Ready);
    EXPECT_FALSE(worker_ready(in, {1, 1}, 1, 8, 0, out));
    in.acquire({2, 0, {}}, SlotState::Ready);
    EXPECT_TRUE(worker_ready(in, {1, 1}, 1, 8, 0, out));

    RingBuffer in0(1), out0(1);
    in0.acquire({5, 0, {}}, SlotState::Ready);
    EXPECT_TRUE(worker_ready(in0, {0, 0}, 5, 8, 0, out0));
    out0.acquire({9, 1, {}}, SlotState::Partial);
    EXPECT_FALSE(worker_ready(in0, {0, 0}, 5, 8, 0, out0));
}

TEST(RingWire, BufferCounts) {
    EXPECT_EQ(ring_wire({1, 1, 8, 8}, {1, 1}).buffer_count, 2u);
    EXPECT_EQ(ring_wire({8, 2, 1000, 1000}, {1, 1}).buffer_count, 24u);
    EXPECT_THROW(ring_wire({0, 1, 8, 8}, {1, 1}), ConfigError);
}

TEST(RingWire, RingClosesOnFirstDevice) {
    auto t = ring_wire({3, 2, 60, 60}, {1, 1});
    ASSERT_EQ(t.devices.size(), 3u);
    EXPECT_EQ(t.devices[0].next_device, 1u);
    EXPECT_EQ(t.devices[2].next_device, 0u);
    EXPECT_EQ(t.workers.size(), 6u);
    EXPECT_EQ(t.workers[1].input_buffer, t.workers[0].output_buffer);
}

TEST(Feasibility, RejectsInsufficientStorage) {
    EXPECT_THROW(check_feasible({1, 1, 8, 4}, {1, 1}), ConfigError);  // 4*2 == 8
    EXPECT_NO_THROW(check_feasible({1, 1, 8, 5}, {1, 1}));
}

TEST(Feasibility, RejectsTooManyDevices) {
    EXPECT_NO_THROW(check_feasible({25, 1, 100, 100}, {1, 1}));
    EXPECT_THROW(check_feasible({26, 1, 100, 100}, {1, 1}), ConfigError);
    PipelineConfig idle{26, 1, 100, 100};
    idle.allow_idle_devices = true;
    EXPECT_NO_THROW(check_feasible(idle, {1, 1}));
}

TEST(Feasibility, DiagnosticNamesCondition) {
    try {
        check_feasible({1, 1, 8, 4}, {1, 1});
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("s * N_b"), std::string::npos) << e.what();
    }
}

class SingleWorkerSchedule : public ::testing::TestWithParam<std::size_t> {};

TEST_P(SingleWorkerSchedule, TraceMatchesRowForRow) {
    const auto n = GetParam();
    IdentityKernel kernel({1, 1});
    auto result = run_super_cycles({1, 1, n, n}, kernel, make_slices(n), ExecutionMode::deterministic, true);
    const auto expected = single_worker_schedule(n);
    ASSERT_EQ(result.report.trace.size(), expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) {
        const auto& e = result.report.trace[i];
        SCOPED_TRACE("stage " + std::to_string(i + 1));
        EXPECT_EQ(e.stage, i + 1);
        EXPECT_EQ(e.received, expected[i].received);
        EXPECT_EQ(e.processed, expected[i].processed);
        EXPECT_EQ(e.sent, expected[i].sent);
        EXPECT_EQ(e.partial_out, expected[i].partial);
    }
}

INSTANTIATE_TEST_SUITE_P(SliceCounts, SingleWorkerSchedule, ::testing::Values(4u, 5u, 6u, 8u, 13u, 32u));

TEST(RunStage, StageFourRow) {
    IdentityKernel kernel({1, 1});
    auto r = run_super_cycles({1, 1, 8, 8}, kernel, make_slices(8), ExecutionMode::deterministic, true);
    const auto& e = r.report.trace.at(3);
    EXPECT_EQ(e.received, 4u);
    EXPECT_EQ(e.processed, 2u);
    EXPECT_EQ(e.partial_out, (std::vector<std::size_t>{2, 3}));
    EXPECT_EQ(e.sent, 1u);
    const auto& last = r.report.trace.back();
    EXPECT_EQ(last.stage, 11u);
    EXPECT_FALSE(last.received);
    EXPECT_FALSE(last.processed);
    EXPECT_EQ(last.sent, 8u);
}

TEST(RunStage, SingleSliceZeroOrder) {
    IdentityKernel kernel({0, 0});
    auto r = run_super_cycles({1, 1, 1, 1}, kernel, make_slices(1), ExecutionMode::deterministic, true);
    ASSERT_EQ(r.slices.size(), 1u);
    EXPECT_EQ(r.slices[0].timestep, 1u);
    // received in stage 1, then one stage processes, finalises and sends it
    ASSERT_EQ(r.report.trace.size(), 2u);
    EXPECT_EQ(r.report.trace[0].received, 1u);
    EXPECT_FALSE(r.report.trace[0].processed);
    EXPECT_EQ(r.report.trace[1].processed, 1u);
    EXPECT_EQ(r.report.trace[1].sent, 1u);
}

TEST(Trace, FormatParseRoundTrip) {
    StageEvent e{4, 0, 0, 4, 2, 1, {2, 3}};
    EXPECT_EQ(format_event(e), "4\t0\t0\t4\t2\t1\t2,3");
    EXPECT_EQ(parse_event(format_event(e)), e);
    StageEvent idle{1, 0, 0, 1, std::nullopt, std::nullopt, {}};
    EXPECT_EQ(format_event(idle), "1\t0\t0\t1\t-\t-\t-");
    EXPECT_EQ(parse_event(format_event(idle)), idle);

    std::stringstream ss;
    std::vector<StageEvent> events{e, idle};
    write_trace(ss, events);
    EXPECT_EQ(read_trace(ss), events);
}

struct PipelineCase {
    std::size_t devices, workers, slices, slots, cycles;
    StencilOrders orders;
};

class IdentityPipeline : public ::testing::TestWithParam<PipelineCase> {};

TEST_P(IdentityPipeline, PayloadsUnchangedTimestepAdvanced) {
    const auto c = GetParam();
    IdentityKernel kernel(c.orders);
    PipelineConfig cfg{c.devices, c.workers, c.slices, c.slots, c.cycles};
    cfg.allow_idle_devices = true;
    const auto input = make_slices(c.slices, 7);
    for (auto mode : {ExecutionMode::deterministic, ExecutionMode::concurrent}) {
        auto r = run_super_cycles(cfg, kernel, input, mode);
        ASSERT_EQ(r.slices.size(), input.size());
        for (std::size_t i = 0; i < input.size(); ++i) {
            EXPECT_EQ(r.slices[i].index, i + 1);
            EXPECT_EQ(r.slices[i].timestep, 7 + c.cycles * cfg.num_workers());
            EXPECT_EQ(r.slices[i].payload, input[i].payload);
        }
    }
}

INSTANTIATE_TEST_SUITE_P(
    Configs, IdentityPipeline,
    ::testing::Values(PipelineCase{1, 1, 8, 8, 1, {1, 1}}, PipelineCase{1, 1, 8, 5, 3, {1, 1}},
                      PipelineCase{2, 1, 12, 4, 2, {1, 1}}, PipelineCase{2, 2, 4, 4, 5, {1, 1}},
                      PipelineCase{3, 2, 30, 5, 2, {1, 1}}, PipelineCase{1, 3, 10, 7, 1, {2, 1}},
                      PipelineCase{4, 1, 10, 2, 1, {0, 0}}, PipelineCase{2, 1, 9, 5, 1, {1, 2}},
                      PipelineCase{1, 1, 1, 1, 2, {0, 0}}, PipelineCase{2, 2, 3, 3, 1, {1, 1}}));

TEST(Pipeline, ZeroSuperCyclesForwardsInput) {
    IdentityKernel kernel({1, 1});
    PipelineConfig cfg{1, 1, 6, 6, 0};
    auto input = make_slices(6);
    auto r = run_super_cycles(cfg, kernel, input, ExecutionMode::deterministic);
    ASSERT_EQ(r.slices.size(), 6u);
    for (std::size_t i = 0; i < 6; ++i) {
        EXPECT_EQ(r.slices[i].timestep, 0u);
        EXPECT_EQ(r.slices[i].payload, input[i].payload);
    }
}

TEST(Pipeline, SlotTransitionsAreLegal) {
    // RingBuffer throws on an illegal move, so a completed run of a busy
    // configuration shows every observed transition was legal.
    IdentityKernel kernel({1, 1});
    PipelineConfig cfg{2, 2, 20, 5, 3};
    EXPECT_NO_THROW(run_super_cycles(cfg, kernel, make_slices(20), ExecutionMode::deterministic));
    EXPECT_NO_THROW(run_super_cycles(cfg, kernel, make_slices(20), ExecutionMode::concurrent));
}

TEST(Pipeline, RejectsOutOfOrderFeed) {
    IdentityKernel kernel({1, 1});
    auto s = make_slices(4);
    std::swap(s[1], s[2]);
    EXPECT_THROW(run_super_cycles({1, 1, 4, 4}, kernel, s, ExecutionMode::deterministic), ConfigError);
}

namespace {

class FailingKernel final : public StencilKernel {
public:
    StencilOrders orders() const override { return {1, 1}; }
    void process(const StencilContext& ctx, std::span<const SliceEnvelope* const> inputs,
                 std::span<Payload* const> outputs) override {
        if (ctx.central == 3 && ctx.worker == 1) throw std::runtime_error("boom");
        *outputs[1] = inputs[1]->payload;
    }
};

// Records the global timestep order in which slices are processed.
class OrderKernel final : public StencilKernel {
public:
    StencilOrders orders() const override { return {1, 1}; }
    void process(const StencilContext& ctx, std::span<const SliceEnvelope* const> inputs,
                 std::span<Payload* const> outputs) override {
        auto p = inputs[1]->payload;
        p.push_back(static_cast<std::byte>(ctx.worker));
        *outputs[1] = std::move(p);
    }
};

} // namespace

TEST(Pipeline, KernelErrorCarriesSliceAndWorker) {
    FailingKernel kernel;
    for (auto mode : {ExecutionMode::deterministic, ExecutionMode::concurrent}) {
        try {
            run_super_cycles({1, 2, 6, 6}, kernel, make_slices(6), mode);
            FAIL() << "expected KernelError";
        } catch (const KernelError& e) {
            EXPECT_EQ(e.slice(), 3u);
            EXPECT_EQ(e.worker(), 1u);
        }
    }
}

TEST(Pipeline, EveryWorkerProcessesEverySliceOnceInOrder) {
    OrderKernel kernel;
    PipelineConfig cfg{2, 2, 12, 5, 2};
    auto r = run_super_cycles(cfg, kernel, make_slices(12), ExecutionMode::concurrent);
    for (const auto& s : r.slices) {
        ASSERT_EQ(s.payload.size(), s.index + 3 + 8);
        for (std::size_t k = 0; k < 8; ++k)
            EXPECT_EQ(static_cast<std::size_t>(s.payload[s.index + 3 + k]), k % 4);
    }
}

TEST(Feasibility, ChainedWorkersNeedBothWindows) {
    EXPECT_THROW(check_feasible({1, 2, 10, 4}, {1, 1}), ConfigError);
    EXPECT_NO_THROW(check_feasible({1, 2, 10, 5}, {1, 1}));
    // clipped to the dataset
    PipelineConfig small{2, 2, 4, 4};
    small.allow_idle_devices = true;
    EXPECT_NO_THROW(check_feasible(small, {1, 1}));
}

TEST(Feasibility, StallingConfigurationRejectedBeforeExecution) {
    // s * N_b = 12 > 10, but input and output copies of a slice coexist
    IdentityKernel kernel({1, 1});
    PipelineConfig cfg{2, 1, 10, 3, 2};
    EXPECT_NO_THROW(check_feasible(cfg, {1, 1}));
    EXPECT_THROW(Pipeline(cfg, kernel), DeadlockError);
    EXPECT_THROW(check_schedulable(cfg, {1, 1}), ConfigError);
    const auto s = minimum_slots(cfg, {1, 1});
    EXPECT_GT(s, 3u);
    cfg.slots_per_buffer = s;
    EXPECT_NO_THROW(Pipeline(cfg, kernel));
}

TEST(Feasibility, AcceptedConfigurationsComplete) {
    std::size_t accepted = 0;
    for (std::size_t d = 1; d <= 3; ++d)
        for (std::size_t w = 1; w <= 3; ++w)
            for (std::size_t oi = 0; oi <= 2; ++oi)
                for (std::size_t oo = 0; oo <= 2; ++oo)
                    for (std::size_t n : {1u, 2u, 5u, 9u, 16u}) {
                        PipelineConfig cfg{d, w, n, 1, 3};
                        cfg.allow_idle_devices = true;
                        const auto s_min = minimum_slots(cfg, {oi, oo});
                        for (std::size_t s = s_min; s <= s_min + 2; ++s) {
                            cfg.slots_per_buffer = s;
                            SCOPED_TRACE(fmt::format("d={} w={} O=({},{}) N_S={} s={}", d, w, oi, oo, n, s));
                            IdentityKernel kernel({oi, oo});
                            const auto input = make_slices(n);
                            for (auto mode : {ExecutionMode::deterministic, ExecutionMode::concurrent}) {
                                auto r = run_super_cycles(cfg, kernel, input, mode);
                                ASSERT_EQ(r.slices.size(), n);
                                for (std::size_t i = 0; i < n; ++i) {
                                    EXPECT_EQ(r.slices[i].index, i + 1);
                                    EXPECT_EQ(r.slices[i].timestep, 3 * cfg.num_workers());
                                }
                            }
                            ++accepted;
                        }
                    }
    EXPECT_GT(accepted, 1000u);
}
