#pragma once

#include "dsea/cli/settings.hpp"

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace dsea::cli {

inline constexpr const char* kThermoFile = "thermo.csv";
inline constexpr const char* kProfileFile = "profile.csv";
inline constexpr const char* kBenchFile = "bench.csv";

inline constexpr const char* kThermoHeader = "step,U_per_N,KE_per_N,T,p";
inline constexpr const char* kProfileHeader = "step,slice,molecules,U_per_N,T,p";
inline constexpr const char* kBenchHeader =
    "devices,workers_per_device,rails,mode,slices,molecules,seconds_per_super_cycle,molecules_per_second";

/// Molecules processed by all workers in one super-cycle divided by its duration: N * N_w / T.
double bench_metric(std::size_t molecules, std::size_t workers, double seconds_per_super_cycle);

struct BenchRow {
    std::size_t devices = 0;
    std::size_t workers_per_device = 0;
    std::size_t rails = 0;
    RunMode mode = RunMode::timed_model;
    std::size_t slices = 0;
    std::size_t molecules = 0;
    double seconds_per_super_cycle = 0;
    double molecules_per_second = 0;
};

std::string format_bench_row(const BenchRow& row);

/// Devices 1..settings.devices; one timed-model row per device count, plus a
/// wall-clock row in the selected execution mode unless mode is timed-model.
std::vector<BenchRow> bench_sweep(const Settings& settings);

/// Each command writes its report to `out` and returns the process exit code.
/// Errors are thrown as dsea::Error.
int cmd_init(const Settings& settings, std::ostream& out);
int cmd_run(const Settings& settings, std::ostream& out);
int cmd_bench(const Settings& settings, std::ostream& out);
int cmd_validate(const Settings& settings, std::ostream& out);

/// Parses the command line and dispatches; reports errors on `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace dsea::cli
