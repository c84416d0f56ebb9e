#include "dsea/cli/settings.hpp"

#include "dsea/common/error.hpp"

#include <array>
#include <string>

namespace dsea::cli {

namespace {

constexpr std::array kKeys = {
    "seed", "devices", "workers_per_device", "slots", "rails", "super_cycles", "link_capacity",
    "allow_idle_devices", "mode", "thermostat", "out", "dataset", "trace", "fault_force_scale",
    "sigma", "epsilon", "cutoff", "dt", "temperature", "density", "lattice_cells",
    "compute_time_per_slice", "rail_bandwidth", "rail_latency", "intra_device_bandwidth", "devices_per_node",
    "bench_slices", "bench_slice_bytes", "validate_steps",
};

std::size_t get_count(const KeyValueConfig& c, std::string_view key, std::size_t fallback) {
    return static_cast<std::size_t>(c.get_u64(key, fallback));
}

std::optional<std::filesystem::path> get_path(const KeyValueConfig& c, std::string_view key) {
    auto v = c.get(key);
    if (!v || v->empty()) return std::nullopt;
    return std::filesystem::path(*v);
}

} // namespace

RunMode parse_run_mode(std::string_view text) {
    if (text == "deterministic") return RunMode::deterministic;
    if (text == "concurrent") return RunMode::concurrent;
    if (text == "timed-model" || text == "timed_model") return RunMode::timed_model;
    throw ConfigError("unknown mode '" + std::string(text) + "' (deterministic, concurrent, timed-model)");
}

std::string_view to_string(RunMode mode) {
    switch (mode) {
    case RunMode::deterministic: return "deterministic";
    case RunMode::concurrent: return "concurrent";
    case RunMode::timed_model: return "timed-model";
    }
    return "?";
}

bool is_known_key(std::string_view key) {
    for (const auto* k : kKeys)
        if (key == k) return true;
    return false;
}

void apply_physics(const KeyValueConfig& c, md::SimParams& p) {
    p.sigma = c.get_double("sigma", p.sigma);
    p.epsilon = c.get_double("epsilon", p.epsilon);
    p.cutoff = c.get_double("cutoff", p.cutoff);
    p.dt = c.get_double("dt", p.dt);
    p.temperature = c.get_double("temperature", p.temperature);
    p.density = c.get_double("density", p.density);
    p.lattice_cells = get_count(c, "lattice_cells", p.lattice_cells);
    p.thermostat = c.get_bool("thermostat", p.thermostat);
    p.force_scale = c.get_double("fault_force_scale", p.force_scale);
}

Settings resolve_settings(const KeyValueConfig& file, const KeyValueConfig& overrides) {
    KeyValueConfig c = file;
    for (const auto& [k, v] : overrides.entries()) c.set(k, v);
    for (const auto& [k, _] : c.entries()) {
        if (!is_known_key(k)) throw ConfigError("unknown configuration key '" + k + "'");
    }

    Settings s;
    s.source = c;
    if (c.contains("seed")) s.seed = c.get_u64("seed", 0);
    apply_physics(c, s.params);

    s.devices = get_count(c, "devices", s.devices);
    s.workers_per_device = get_count(c, "workers_per_device", s.workers_per_device);
    if (c.contains("slots")) s.slots = get_count(c, "slots", 0);
    s.rails = get_count(c, "rails", s.rails);
    s.super_cycles = get_count(c, "super_cycles", s.super_cycles);
    s.link_capacity = get_count(c, "link_capacity", s.link_capacity);
    s.allow_idle_devices = c.get_bool("allow_idle_devices", s.allow_idle_devices);
    s.mode = parse_run_mode(c.get_string("mode", "deterministic"));

    s.out = get_path(c, "out");
    s.dataset = get_path(c, "dataset");
    s.trace = get_path(c, "trace");

    s.timed.compute_time_per_slice = c.get_double("compute_time_per_slice", s.timed.compute_time_per_slice);
    s.timed.rails.rails = s.rails;
    s.timed.rails.rail_bandwidth = c.get_double("rail_bandwidth", s.timed.rails.rail_bandwidth);
    s.timed.rails.latency = c.get_double("rail_latency", s.timed.rails.latency);
    s.timed.intra_device_bandwidth = c.get_double("intra_device_bandwidth", s.timed.intra_device_bandwidth);
    s.timed.devices_per_node = get_count(c, "devices_per_node", s.timed.devices_per_node);
    if (c.contains("bench_slices")) s.bench_slices = get_count(c, "bench_slices", 0);
    if (c.contains("bench_slice_bytes")) s.bench_slice_bytes = get_count(c, "bench_slice_bytes", 0);
    s.validate_steps = get_count(c, "validate_steps", s.validate_steps);

    if (s.devices == 0) throw ConfigError("devices must be at least 1");
    if (s.workers_per_device == 0) throw ConfigError("workers_per_device must be at least 1");
    if (s.rails == 0) throw ConfigError("rails must be at least 1");
    s.timed.validate();
    return s;
}

} // namespace dsea::cli
