#include "dsea/io/manifest.hpp"

#include "dsea/common/config_file.hpp"
#include "dsea/common/error.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <zlib.h>

namespace dsea::io {

void DatasetManifest::validate() const {
    if (format_version != kManifestVersion)
        throw IoError(fmt::format("manifest format version {} unsupported", format_version));
    if (slices.size() != num_slices)
        throw IoError(fmt::format("manifest lists {} slice files for {} slices", slices.size(), num_slices));
    if (num_slices == 0) return;
    const auto& g = geometry;
    const double b = md::box_length(params.lattice_cells, params.density);
    const auto grid = md::cell_grid(b, params.cutoff);
    if (g.box_length != b || g.cells_per_edge != grid.cells_per_edge || g.cell_length != grid.cell_length ||
        g.molecules != 4 * params.lattice_cells * params.lattice_cells * params.lattice_cells)
        throw IoError("manifest geometry is inconsistent with its lattice parameters");
    if (num_slices != g.cells_per_edge)
        throw IoError(fmt::format("manifest has {} slices but N_xyz = {}", num_slices, g.cells_per_edge));
}

std::string slice_file_name(std::size_t index) { return fmt::format("slice_{:06d}.bin", index); }

std::uint32_t crc32(std::span<const std::byte> bytes) {
    uLong crc = ::crc32(0L, Z_NULL, 0);
    // zlib takes uInt lengths; feed large buffers in chunks.
    constexpr std::size_t chunk = 1u << 30;
    for (std::size_t off = 0; off < bytes.size(); off += chunk) {
        const auto len = std::min(chunk, bytes.size() - off);
        crc = ::crc32(crc, reinterpret_cast<const Bytef*>(bytes.data() + off), static_cast<uInt>(len));
    }
    return static_cast<std::uint32_t>(crc);
}

std::string format_manifest(const DatasetManifest& m) {
    std::string out = "# dsea dataset manifest\n";
    auto kv = [&](std::string_view key, const auto& value) { out += fmt::format("{} = {}\n", key, value); };
    kv("format_version", m.format_version);
    kv("num_slices", m.num_slices);
    kv("timestep", m.timestep);
    kv("seed", m.seed);
    kv("box_length", m.geometry.box_length);
    kv("molecules", m.geometry.molecules);
    kv("cells_per_edge", m.geometry.cells_per_edge);
    kv("cell_length", m.geometry.cell_length);
    kv("sigma", m.params.sigma);
    kv("epsilon", m.params.epsilon);
    kv("cutoff", m.params.cutoff);
    kv("dt", m.params.dt);
    kv("temperature", m.params.temperature);
    kv("density", m.params.density);
    kv("lattice_cells", m.params.lattice_cells);
    kv("thermostat", m.params.thermostat ? "on" : "off");
    for (const auto& s : m.slices) out += fmt::format("slice = {} {:08x}\n", s.file, s.crc32);
    return out;
}

DatasetManifest parse_manifest(const std::string& text) {
    std::string rest;
    std::vector<SliceFileEntry> slices;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        const auto eq = line.find('=');
        std::string key = eq == std::string::npos ? std::string() : line.substr(0, eq);
        key.erase(0, key.find_first_not_of(" \t"));
        key.erase(key.find_last_not_of(" \t") + 1);
        if (key == "slice") {
            std::istringstream fields(line.substr(eq + 1));
            SliceFileEntry e;
            std::string crc;
            if (!(fields >> e.file >> crc)) throw IoError("manifest: malformed slice line: " + line);
            try {
                e.crc32 = static_cast<std::uint32_t>(std::stoul(crc, nullptr, 16));
            } catch (const std::exception&) {
                throw IoError("manifest: bad checksum in line: " + line);
            }
            slices.push_back(std::move(e));
        } else {
            rest += line;
            rest += '\n';
        }
    }

    KeyValueConfig kv;
    try {
        kv = KeyValueConfig::parse(rest);
    } catch (const ConfigError& e) {
        throw IoError(std::string("manifest: ") + e.what());
    }
    auto require = [&](std::string_view key) {
        if (!kv.contains(key)) throw IoError("manifest: missing key " + std::string(key));
    };
    for (auto key : {"format_version", "num_slices", "box_length", "cells_per_edge", "cell_length", "molecules"})
        require(key);

    DatasetManifest m;
    try {
        m.format_version = static_cast<std::uint32_t>(kv.get_u64("format_version", 0));
        m.num_slices = kv.get_u64("num_slices", 0);
        m.timestep = kv.get_u64("timestep", 0);
        m.seed = kv.get_u64("seed", 0);
        m.geometry.box_length = kv.get_double("box_length", 0);
        m.geometry.molecules = kv.get_u64("molecules", 0);
        m.geometry.cells_per_edge = kv.get_u64("cells_per_edge", 0);
        m.geometry.cell_length = kv.get_double("cell_length", 0);
        m.params.sigma = kv.get_double("sigma", m.params.sigma);
        m.params.epsilon = kv.get_double("epsilon", m.params.epsilon);
        m.params.cutoff = kv.get_double("cutoff", m.params.cutoff);
        m.params.dt = kv.get_double("dt", m.params.dt);
        m.params.temperature = kv.get_double("temperature", m.params.temperature);
        m.params.density = kv.get_double("density", m.params.density);
        m.params.lattice_cells = kv.get_u64("lattice_cells", m.params.lattice_cells);
        m.params.thermostat = kv.get_bool("thermostat", m.params.thermostat);
    } catch (const ConfigError& e) {
        throw IoError(std::string("manifest: ") + e.what());
    }
    m.slices = std::move(slices);
    return m;
}

void write_manifest(const std::filesystem::path& dir, const DatasetManifest& manifest) {
    const auto path = dir / kManifestFile;
    const auto tmp = dir / (std::string(kManifestFile) + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + tmp.string());
        out << format_manifest(manifest);
        if (!out) throw IoError("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

DatasetManifest read_manifest(const std::filesystem::path& dir) {
    const auto path = dir / kManifestFile;
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open manifest " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    auto m = parse_manifest(ss.str());
    m.validate();
    return m;
}

} // namespace dsea::io
