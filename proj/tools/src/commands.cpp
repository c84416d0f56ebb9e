#include "dsea/cli/commands.hpp"

#include "dsea/common/error.hpp"
#include "dsea/common/log.hpp"
#include "dsea/io/dataset.hpp"
#include "dsea/md/forces.hpp"
#include "dsea/md/integrate.hpp"
#include "dsea/md/lattice.hpp"
#include "dsea/md/md_kernel.hpp"
#include "dsea/md/thermo.hpp"
#include "dsea/oracle/brute_force.hpp"
#include "dsea/oracle/reference.hpp"
#include "dsea/stream/pipeline.hpp"
#include "dsea/transport/timed_model.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>

namespace dsea::cli {

namespace fs = std::filesystem;

namespace {

constexpr stream::StencilOrders kMdOrders{1, 1};

template <typename T>
const T& require(const std::optional<T>& value, const char* flag, const char* command) {
    if (!value) throw ConfigError(fmt::format("{} requires {}", command, flag));
    return *value;
}

stream::ExecutionMode execution_mode(RunMode mode) {
    switch (mode) {
    case RunMode::deterministic: return stream::ExecutionMode::deterministic;
    case RunMode::concurrent: return stream::ExecutionMode::concurrent;
    case RunMode::timed_model: break;
    }
    throw ConfigError("--mode timed-model is only valid for bench");
}

stream::PipelineConfig pipeline_config(const Settings& s, std::size_t devices, std::size_t num_slices) {
    stream::PipelineConfig cfg;
    cfg.devices = devices;
    cfg.workers_per_device = s.workers_per_device;
    cfg.num_slices = num_slices;
    cfg.super_cycles = s.super_cycles;
    cfg.link_capacity = s.link_capacity;
    cfg.rails = s.rails;
    cfg.allow_idle_devices = s.allow_idle_devices;
    cfg.slots_per_buffer = s.slots ? *s.slots : stream::minimum_slots(cfg, kMdOrders);
    return cfg;
}

void print_geometry(std::ostream& out, const md::Geometry& g) {
    fmt::print(out, "molecules {}, box length {:.6g}, slices {}, cell length {:.6g}\n", g.molecules, g.box_length,
               g.num_slices(), g.cell_length);
}

bool same_geometry(const md::Geometry& a, const md::Geometry& b) {
    return a.molecules == b.molecules && a.cells_per_edge == b.cells_per_edge && a.box_length == b.box_length;
}

void write_thermo(const fs::path& dir, const md::ThermoRecorder& rec, const md::Geometry& g) {
    std::ofstream thermo(dir / kThermoFile);
    std::ofstream profile(dir / kProfileFile);
    if (!thermo || !profile) throw IoError("cannot write thermodynamics to " + dir.string());
    thermo << kThermoHeader << '\n';
    profile << kProfileHeader << '\n';
    const double slice_volume = g.volume() / static_cast<double>(g.num_slices());
    auto per = [](double x, std::size_t n) { return n == 0 ? 0.0 : x / static_cast<double>(n); };
    for (auto step : rec.steps()) {
        const auto t = rec.total(step);
        fmt::print(thermo, "{},{},{},{},{}\n", step, per(t.potential, t.molecules), per(t.kinetic, t.molecules),
                   t.molecules == 0 ? 0.0 : md::kinetic_temperature(t.kinetic, t.molecules),
                   md::pressure(t, g.volume()));
        for (const auto& s : rec.slices(step)) {
            const auto& x = s.sample;
            fmt::print(profile, "{},{},{},{},{},{}\n", step, s.slice, x.molecules, per(x.potential, x.molecules),
                       x.molecules == 0 ? 0.0 : md::kinetic_temperature(x.kinetic, x.molecules),
                       md::pressure(x, slice_volume));
        }
    }
}

double mean_encoded_bytes(const std::vector<stream::SliceEnvelope>& slices) {
    if (slices.empty()) return 0;
    double total = 0;
    for (const auto& s : slices) total += static_cast<double>(s.payload.size());
    return total / static_cast<double>(slices.size());
}

} // namespace

double bench_metric(std::size_t molecules, std::size_t workers, double seconds_per_super_cycle) {
    if (!(seconds_per_super_cycle > 0)) throw ConfigError("super-cycle time must be positive");
    return static_cast<double>(molecules) * static_cast<double>(workers) / seconds_per_super_cycle;
}

std::string format_bench_row(const BenchRow& r) {
    return fmt::format("{},{},{},{},{},{},{:.6e},{:.6e}", r.devices, r.workers_per_device, r.rails, to_string(r.mode),
                       r.slices, r.molecules, r.seconds_per_super_cycle, r.molecules_per_second);
}

int cmd_init(const Settings& s, std::ostream& out) {
    const auto seed = require(s.seed, "--seed", "init");
    const auto& dir = require(s.out, "--out", "init");
    s.params.validate();
    const auto manifest = io::init_dataset(dir, s.params, seed, s.devices);
    print_geometry(out, manifest.geometry);
    fmt::print(out, "wrote {} slice files and {} to {}\n", manifest.num_slices, io::kManifestFile, dir.string());
    return 0;
}

int cmd_run(const Settings& s, std::ostream& out) {
    const auto& in = require(s.dataset, "--dataset", "run");
    const auto& dir = require(s.out, "--out", "run");
    const auto mode = execution_mode(s.mode);
    if (s.trace && mode != stream::ExecutionMode::deterministic)
        throw ConfigError("--trace requires --mode deterministic");
    if (fs::exists(dir) && fs::equivalent(in, dir)) throw ConfigError("--out must differ from --dataset");

    auto manifest = io::read_manifest(in);
    auto params = manifest.params;
    apply_physics(s.source, params);
    params.validate();
    const auto geometry = md::build_domain(params);
    if (!same_geometry(geometry, manifest.geometry))
        throw ConfigError("physics settings do not match the geometry of the dataset");

    const auto cfg = pipeline_config(s, s.devices, manifest.num_slices);
    md::ThermoRecorder recorder;
    md::MdKernel kernel(geometry, params, &recorder);
    stream::Pipeline pipeline(cfg, kernel);
    log::info("run: {} devices x {} workers, s = {}, K = {}", cfg.devices, cfg.workers_per_device,
              cfg.slots_per_buffer, cfg.super_cycles);

    fs::create_directories(dir);
    io::RoundRobinLoader feed(in, manifest, s.devices, 2 * s.devices);
    io::RoundRobinStorer sink(dir, s.devices);
    const auto report = pipeline.run(feed, sink, mode, s.trace.has_value());
    manifest.slices = sink.finish();
    manifest.params = params;
    manifest.timestep += cfg.super_cycles * cfg.num_workers();
    io::write_manifest(dir, manifest);
    write_thermo(dir, recorder, geometry);

    if (s.trace) {
        std::ofstream t(*s.trace);
        if (!t) throw IoError("cannot write trace to " + s.trace->string());
        stream::write_trace(t, report.trace);
    }
    const auto steps = recorder.steps();
    fmt::print(out, "advanced {} steps in {:.3f} s (slots per buffer {}), dataset at timestep {} in {}\n",
               cfg.super_cycles * cfg.num_workers(), report.seconds, cfg.slots_per_buffer, manifest.timestep,
               dir.string());
    if (!steps.empty()) {
        const auto t = recorder.total(steps.back());
        fmt::print(out, "last step {}: U/N {:.6f}, T {:.6f}, p {:.6f}\n", steps.back(),
                   t.potential / static_cast<double>(t.molecules), md::kinetic_temperature(t.kinetic, t.molecules),
                   md::pressure(t, geometry.volume()));
    }
    return 0;
}

std::vector<BenchRow> bench_sweep(const Settings& s) {
    s.params.validate();
    const auto geometry = md::build_domain(s.params);
    const auto initial = md::to_envelopes(md::generate_fcc(s.params, geometry, s.seed.value_or(1)), 0);
    const std::size_t model_slices = s.bench_slices.value_or(geometry.num_slices());
    const double molecules_per_slice =
        static_cast<double>(geometry.molecules) / static_cast<double>(geometry.num_slices());
    const auto model_molecules = static_cast<std::size_t>(std::llround(molecules_per_slice * model_slices));
    const std::size_t slice_bytes =
        s.bench_slice_bytes.value_or(static_cast<std::size_t>(std::llround(mean_encoded_bytes(initial))));

    std::vector<BenchRow> rows;
    for (std::size_t d = 1; d <= s.devices; ++d) {
        stream::PipelineConfig model_cfg{d, s.workers_per_device, model_slices, model_slices, 1};
        model_cfg.rails = s.rails;
        model_cfg.allow_idle_devices = true;
        const auto p = transport::predict_throughput(s.timed, model_cfg, kMdOrders, slice_bytes, molecules_per_slice);
        BenchRow model{d, s.workers_per_device, s.rails, RunMode::timed_model, model_slices, model_molecules};
        model.molecules_per_second = p.molecules_per_second;
        model.seconds_per_super_cycle = static_cast<double>(model_molecules * model_cfg.num_workers()) /
                                        p.molecules_per_second;
        rows.push_back(model);

        if (s.mode == RunMode::timed_model) continue;
        Settings wall = s;
        wall.allow_idle_devices = true;
        wall.super_cycles = std::max<std::size_t>(1, s.super_cycles);
        const auto cfg = pipeline_config(wall, d, geometry.num_slices());
        md::MdKernel kernel(geometry, s.params);
        const auto result = stream::run_super_cycles(cfg, kernel, initial, execution_mode(s.mode));
        BenchRow measured{d, s.workers_per_device, s.rails, s.mode, geometry.num_slices(), geometry.molecules};
        measured.seconds_per_super_cycle = result.report.seconds / static_cast<double>(cfg.super_cycles);
        measured.molecules_per_second =
            bench_metric(geometry.molecules, cfg.num_workers(), measured.seconds_per_super_cycle);
        rows.push_back(measured);
        log::info("bench: {} devices, {:.3e} molecules/s", d, measured.molecules_per_second);
    }
    return rows;
}

int cmd_bench(const Settings& s, std::ostream& out) {
    const auto rows = bench_sweep(s);
    std::ofstream file;
    if (s.out) {
        fs::create_directories(*s.out);
        file.open(*s.out / kBenchFile);
        if (!file) throw IoError("cannot write " + (*s.out / kBenchFile).string());
        file << kBenchHeader << '\n';
    }
    out << kBenchHeader << '\n';
    for (const auto& r : rows) {
        const auto line = format_bench_row(r);
        out << line << '\n';
        if (file) file << line << '\n';
    }
    return 0;
}

namespace {

struct SuiteResult {
    enum class Status { pass, fail, skip } status = Status::pass;
    std::string invariant;
    std::string detail;
};

SuiteResult force_oracle_suite(const Settings& s) {
    SuiteResult r{SuiteResult::Status::pass, "cell-list forces, U and V_acc equal brute force within 1e-12", ""};
    const auto g = md::build_domain(s.params);
    if (g.molecules > oracle::kMaxBruteForceMolecules) {
        r.status = SuiteResult::Status::skip;
        r.detail = fmt::format("N = {} exceeds the brute-force limit of {} molecules", g.molecules,
                               oracle::kMaxBruteForceMolecules);
        return r;
    }
    // a few unperturbed steps move the molecules off the lattice
    md::SimParams clean = s.params;
    clean.force_scale = 1.0;
    auto slices = oracle::reference_trajectory(md::generate_fcc(clean, g, s.seed.value_or(1)), 10, g, clean);
    const auto bf = oracle::brute_forces(oracle::gather(slices), g, s.params);
    md::ThermoSample cell;
    for (std::size_t i = 0; i < slices.size(); ++i)
        cell += md::compute_forces(slices[i], i > 0 ? &slices[i - 1] : nullptr,
                                   i + 1 < slices.size() ? &slices[i + 1] : nullptr, g, s.params);
    double scale = 0;
    for (const auto& f : bf.forces) scale = std::max({scale, std::abs(f.x), std::abs(f.y), std::abs(f.z)});
    double worst = 0;
    std::size_t j = 0;
    for (const auto& sl : slices) {
        for (const auto& m : sl.molecules) {
            const auto& f = bf.forces[j++];
            worst = std::max({worst, std::abs(m.force_new.x - f.x) / scale, std::abs(m.force_new.y - f.y) / scale,
                              std::abs(m.force_new.z - f.z) / scale});
        }
    }
    worst = std::max(worst, std::abs(cell.potential - bf.potential) / std::abs(bf.potential));
    worst = std::max(worst, std::abs(cell.virial - bf.virial) / std::abs(bf.virial));
    r.detail = fmt::format("N = {}, max relative deviation {:.2e}", g.molecules, worst);
    if (!(worst <= 1e-12)) r.status = SuiteResult::Status::fail;
    return r;
}

SuiteResult stream_equivalence_suite(const Settings& s) {
    SuiteResult r{SuiteResult::Status::pass,
                  "streamed run equals the sequential reference (bitwise deterministic, 1e-8 concurrent)", ""};
    const auto g = md::build_domain(s.params);
    const auto initial = md::generate_fcc(s.params, g, s.seed.value_or(1));
    Settings ring = s;
    if (!s.source.contains("devices")) ring.devices = 2;
    ring.allow_idle_devices = true;
    ring.super_cycles = std::max<std::size_t>(1, s.super_cycles);
    const auto cfg = pipeline_config(ring, ring.devices, g.num_slices());
    const std::size_t steps = cfg.super_cycles * cfg.num_workers();
    const auto reference = oracle::reference_trajectory(initial, steps, g, s.params);

    md::MdKernel kernel(g, s.params);
    const auto det = md::from_envelopes(
        stream::run_super_cycles(cfg, kernel, md::to_envelopes(initial, 0), stream::ExecutionMode::deterministic)
            .slices);
    const auto conc = oracle::gather(md::from_envelopes(
        stream::run_super_cycles(cfg, kernel, md::to_envelopes(initial, 0), stream::ExecutionMode::concurrent)
            .slices));
    const auto ref = oracle::gather(reference);
    double worst = conc.size() == ref.size() ? 0.0 : INFINITY;
    for (std::size_t i = 0; i < std::min(conc.size(), ref.size()); ++i) {
        const auto d = conc[i].r - ref[i].r;
        worst = std::max(worst, std::sqrt(md::dot(d, d) / md::dot(ref[i].r, ref[i].r)));
    }
    const bool bitwise = det == reference;
    r.detail = fmt::format("{} devices x {} workers, {} steps: deterministic {}, concurrent max rel error {:.1e}",
                           cfg.devices, cfg.workers_per_device, steps, bitwise ? "bitwise equal" : "DIFFERS", worst);
    if (!bitwise || !(worst <= 1e-8)) r.status = SuiteResult::Status::fail;
    return r;
}

SuiteResult conservation_suite(const Settings& s) {
    SuiteResult r{SuiteResult::Status::pass, "total energy drift below 1e-3 and molecule count conserved", ""};
    auto p = s.params;
    p.thermostat = false;
    const auto g = md::build_domain(p);
    md::ThermoRecorder rec;
    const auto final_state =
        oracle::reference_trajectory(md::generate_fcc(p, g, s.seed.value_or(1)), s.validate_steps, g, p, &rec);
    const auto first = rec.total(0);
    const double e0 = first.potential + first.kinetic;
    double worst = 0;
    for (auto step : rec.steps()) {
        const auto t = rec.total(step);
        worst = std::max(worst, std::abs((t.potential + t.kinetic - e0) / e0));
    }
    std::size_t count = 0;
    for (const auto& sl : final_state) {
        md::check_slice(sl, g);
        count += sl.molecules.size();
    }
    r.detail = fmt::format("{} steps, max |dE/E0| {:.2e}, molecules {} of {}", s.validate_steps, worst, count,
                           g.molecules);
    if (!(worst < 1e-3) || count != g.molecules) r.status = SuiteResult::Status::fail;
    return r;
}

SuiteResult thermostat_suite(const Settings& s) {
    SuiteResult r{SuiteResult::Status::pass, "mean kinetic temperature within 1% of the target", ""};
    auto p = s.params;
    p.thermostat = true;
    const auto g = md::build_domain(p);
    md::ThermoRecorder rec;
    const std::size_t steps = std::max<std::size_t>(s.validate_steps, 2);
    oracle::reference_trajectory(md::generate_fcc(p, g, s.seed.value_or(1)), steps, g, p, &rec);
    double sum = 0;
    std::size_t n = 0;
    for (auto step : rec.steps()) {
        if (step < steps / 2) continue;
        const auto t = rec.total(step);
        sum += md::kinetic_temperature(t.kinetic, t.molecules);
        ++n;
    }
    const double mean = sum / static_cast<double>(n);
    const double rel = std::abs(mean - p.temperature) / p.temperature;
    r.detail = fmt::format("mean T {:.5f} over steps {}..{}, target {}", mean, steps / 2, steps - 1, p.temperature);
    if (!(rel < 0.01)) r.status = SuiteResult::Status::fail;
    return r;
}

} // namespace

int cmd_validate(const Settings& s, std::ostream& out) {
    s.params.validate();
    const std::pair<const char*, SuiteResult (*)(const Settings&)> suites[] = {
        {"force-oracle", force_oracle_suite},
        {"stream-equivalence", stream_equivalence_suite},
        {"conservation", conservation_suite},
        {"thermostat", thermostat_suite},
    };
    int failures = 0;
    for (const auto& [name, run] : suites) {
        SuiteResult r;
        try {
            r = run(s);
        } catch (const Error& e) {
            r = {SuiteResult::Status::fail, "suite completes without error", e.what()};
        }
        switch (r.status) {
        case SuiteResult::Status::pass: fmt::print(out, "PASS {}: {} ({})\n", name, r.invariant, r.detail); break;
        case SuiteResult::Status::skip: fmt::print(out, "SKIP {}: {}\n", name, r.detail); break;
        case SuiteResult::Status::fail:
            ++failures;
            fmt::print(out, "FAIL {}: invariant violated: {} ({})\n", name, r.invariant, r.detail);
            break;
        }
    }
    fmt::print(out, "{}\n", failures == 0 ? "validation passed" : fmt::format("{} suite(s) failed", failures));
    return failures == 0 ? 0 : 1;
}

} // namespace dsea::cli
