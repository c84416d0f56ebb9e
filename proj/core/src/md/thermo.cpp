#include "dsea/md/thermo.hpp"

#include <stdexcept>

namespace dsea::md {

double pressure(const ThermoSample& s, double volume) {
    return 2.0 * s.kinetic / (3.0 * volume) + 24.0 * s.virial / (3.0 * volume);
}

void ThermoRecorder::record(std::uint64_t step, std::size_t slice, const ThermoSample& sample) {
    std::lock_guard lock(mutex_);
    auto [it, inserted] = samples_[step].emplace(slice, sample);
    if (!inserted) throw std::logic_error("thermo sample recorded twice for the same step and slice");
}

std::vector<std::uint64_t> ThermoRecorder::steps() const {
    std::lock_guard lock(mutex_);
    std::vector<std::uint64_t> out;
    for (const auto& [step, _] : samples_) out.push_back(step);
    return out;
}

std::vector<ThermoRecorder::SliceSample> ThermoRecorder::slices(std::uint64_t step) const {
    std::lock_guard lock(mutex_);
    std::vector<SliceSample> out;
    if (auto it = samples_.find(step); it != samples_.end())
        for (const auto& [slice, sample] : it->second) out.push_back({slice, sample});
    return out;
}

ThermoSample ThermoRecorder::total(std::uint64_t step) const {
    ThermoSample sum;
    for (const auto& s : slices(step)) sum += s.sample;
    return sum;
}

void ThermoRecorder::clear() {
    std::lock_guard lock(mutex_);
    samples_.clear();
}

} // namespace dsea::md
