#pragma once

#include "dsea/md/forces.hpp"

#include <cstdint>
#include <map>
#include <mutex>
#include <vector>

namespace dsea::md {

/// p = rho T + 24 V_acc / (3 volume), with rho = N / volume and T = 2 KE / (3 N).
/// V_acc omits the factor 24 of the pair virial r . F, hence the 24 here.
double pressure(const ThermoSample& sample, double volume);

/// Collects per-slice samples keyed by step. Safe to call from several workers.
class ThermoRecorder {
public:
    struct SliceSample {
        std::size_t slice = 0;
        ThermoSample sample;
    };

    void record(std::uint64_t step, std::size_t slice, const ThermoSample& sample);

    /// Steps with at least one sample, ascending.
    std::vector<std::uint64_t> steps() const;

    /// Samples of one step, ascending slice order.
    std::vector<SliceSample> slices(std::uint64_t step) const;

    /// Domain sum of one step, accumulated in ascending slice order.
    ThermoSample total(std::uint64_t step) const;

    void clear();

private:
    mutable std::mutex mutex_;
    std::map<std::uint64_t, std::map<std::size_t, ThermoSample>> samples_;
};

} // namespace dsea::md
