#pragma once

#include "dsea/stream/slice.hpp"

#include <cstddef>
#include <cstdint>
#include <span>

namespace dsea::stream {

/// Number of neighbour slices read (input) and written (output) on each side
/// of the central slice.
struct StencilOrders {
    std::size_t input = 0;
    std::size_t output = 0;

    std::size_t input_window() const noexcept { return 2 * input + 1; }
    std::size_t output_window() const noexcept { return 2 * output + 1; }
};

struct StencilContext {
    std::size_t central = 0;      ///< 1-based slice index being processed
    std::size_t num_slices = 0;   ///< N_S
    std::uint64_t timestep = 0;   ///< timestep of the input slices
    std::size_t device = 0;
    std::size_t worker = 0;       ///< global worker ordinal in [0, N_w)
};

/// Application stencil. One call to process() advances the central slice by
/// one timestep.
///
/// `inputs` has input_window() entries for slices central-O_in .. central+O_in;
/// entries outside [1, N_S] are null. `outputs` has output_window() entries
/// for central-O_out .. central+O_out; entries outside [1, N_S] are null. An
/// output payload is empty on the first contribution to that slice and the
/// kernel accumulates into it.
///
/// Implementations must be safe to call concurrently for distinct windows.
class StencilKernel {
public:
    virtual ~StencilKernel() = default;

    virtual StencilOrders orders() const = 0;

    virtual void process(const StencilContext& ctx, std::span<const SliceEnvelope* const> inputs,
                         std::span<Payload* const> outputs) = 0;

    /// Called once when an output slice receives its last contribution.
    /// `slice.timestep` already holds the advanced timestep.
    virtual void finalize(const StencilContext& ctx, SliceEnvelope& slice) {
        (void)ctx;
        (void)slice;
    }
};

/// Copies the central payload to the central output; neighbour outputs are
/// touched but left empty. Useful as a framework-only workload.
class IdentityKernel final : public StencilKernel {
public:
    explicit IdentityKernel(StencilOrders orders = {}) : orders_(orders) {}

    StencilOrders orders() const override { return orders_; }
    void process(const StencilContext& ctx, std::span<const SliceEnvelope* const> inputs,
                 std::span<Payload* const> outputs) override;

private:
    StencilOrders orders_;
};

} // namespace dsea::stream
