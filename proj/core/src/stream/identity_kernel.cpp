#include "dsea/stream/kernel.hpp"

namespace dsea::stream {

void IdentityKernel::process(const StencilContext&, std::span<const SliceEnvelope* const> inputs,
                             std::span<Payload* const> outputs) {
    const auto& centre = *inputs[orders_.input];
    *outputs[orders_.output] = centre.payload;
}

} // namespace dsea::stream
