#pragma once

#include "dsea/common/config_file.hpp"
#include "dsea/md/params.hpp"
#include "dsea/transport/timed_model.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace dsea::cli {

enum class RunMode { deterministic, concurrent, timed_model };

RunMode parse_run_mode(std::string_view text);
std::string_view to_string(RunMode mode);

/// Every setting of every subcommand. Config-file keys use the flag names
/// with '_' for '-' (e.g. `workers_per_device = 2`).
struct Settings {
    std::optional<std::uint64_t> seed;
    md::SimParams params;

    std::size_t devices = 1;
    std::size_t workers_per_device = 1;
    std::optional<std::size_t> slots;  ///< default: smallest schedulable
    std::size_t rails = 1;
    std::size_t super_cycles = 1;
    std::size_t link_capacity = 1;
    bool allow_idle_devices = false;
    RunMode mode = RunMode::deterministic;

    std::optional<std::filesystem::path> out;
    std::optional<std::filesystem::path> dataset;
    std::optional<std::filesystem::path> trace;

    transport::TimedModel timed;
    std::optional<std::size_t> bench_slices;      ///< timed-model N_S override
    std::optional<std::size_t> bench_slice_bytes; ///< timed-model slice size override

    std::size_t validate_steps = 200;

    /// The merged key/value view the settings were built from.
    KeyValueConfig source;
};

/// Keys accepted in a configuration file.
bool is_known_key(std::string_view key);

/// Builds settings from `file` (may be empty) with `overrides` applied on
/// top; throws ConfigError on unknown keys or malformed values.
Settings resolve_settings(const KeyValueConfig& file, const KeyValueConfig& overrides);

/// Applies the physics keys present in `config` to `params`.
void apply_physics(const KeyValueConfig& config, md::SimParams& params);

} // namespace dsea::cli
