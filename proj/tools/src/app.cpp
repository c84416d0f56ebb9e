#include "dsea/cli/commands.hpp"

#include "dsea/common/error.hpp"

#include <CLI11.hpp>

#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace dsea::cli {

namespace {

/// Flag values as given on the command line; absent flags stay unset so the
/// configuration file can supply them.
struct FlagValues {
    std::string config;
    std::map<std::string, std::string> values;
    bool allow_idle = false;
};

void add_common_flags(CLI::App& cmd, FlagValues& f) {
    cmd.add_option("--config", f.config, "key = value configuration file; flags win on conflict");
    auto value = [&](const char* flag, const char* key, const char* help) {
        return cmd.add_option_function<std::string>(flag, [&f, key](const std::string& v) { f.values[key] = v; },
                                                    help);
    };
    value("--seed", "seed", "RNG seed (required for init)");
    value("--devices", "devices", "ring devices N_GPU (bench: sweep 1..N)");
    value("--workers-per-device", "workers_per_device", "workers per device N_wGPU");
    value("--slots", "slots", "slots per ring buffer (default: smallest schedulable)");
    value("--rails", "rails", "network rails per inter-device transfer");
    value("--super-cycles", "super_cycles", "super-cycles K");
    value("--mode", "mode", "deterministic, concurrent or timed-model")
        ->check(CLI::IsMember({"deterministic", "concurrent", "timed-model"}));
    value("--thermostat", "thermostat", "on or off")->check(CLI::IsMember({"on", "off"}));
    value("--out", "out", "output directory");
    value("--dataset", "dataset", "input dataset directory (run)");
    value("--trace", "trace", "write the stage trace to this file (run, deterministic mode)");
    value("--fault-force-scale", "fault_force_scale", "scale pair forces (fault injection)")->group("");
    cmd.add_flag("--allow-idle-devices", f.allow_idle, "run with more devices than there are slices to keep busy");
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Slice-streaming stencil framework with a Lennard-Jones molecular dynamics kernel", "dsea"};
    app.require_subcommand(1);

    FlagValues flags;
    std::function<int(const Settings&, std::ostream&)> command;
    const std::vector<std::tuple<const char*, const char*, int (*)(const Settings&, std::ostream&)>> commands = {
        {"init", "generate the fcc initial state and store it as a dataset", cmd_init},
        {"run", "advance a dataset by K super-cycles and record thermodynamics", cmd_run},
        {"bench", "sweep device counts and report molecules per second", cmd_bench},
        {"validate", "run the oracle, streaming, conservation and thermostat suites", cmd_validate},
    };
    for (const auto& [name, help, fn] : commands) {
        auto* sub = app.add_subcommand(name, help);
        add_common_flags(*sub, flags);
        sub->callback([&command, fn = fn] { command = fn; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        KeyValueConfig file;
        if (!flags.config.empty()) file = KeyValueConfig::load(flags.config);
        KeyValueConfig overrides;
        for (const auto& [k, v] : flags.values) overrides.set(k, v);
        if (flags.allow_idle) overrides.set("allow_idle_devices", "true");
        return command(resolve_settings(file, overrides), out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
}

} // namespace dsea::cli
