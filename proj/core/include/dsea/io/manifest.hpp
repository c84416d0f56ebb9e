#pragma once

#include "dsea/md/params.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace dsea::io {

inline constexpr std::uint32_t kManifestVersion = 1;
inline constexpr const char* kManifestFile = "manifest.txt";

struct SliceFileEntry {
    std::string file;
    std::uint32_t crc32 = 0;

    friend bool operator==(const SliceFileEntry&, const SliceFileEntry&) = default;
};

/// Plain-text description of a stored dataset: geometry, parameters and
/// one `slice = <file> <crc32>` line per slice in index order.
struct DatasetManifest {
    std::uint32_t format_version = kManifestVersion;
    std::size_t num_slices = 0;
    std::uint64_t timestep = 0;
    std::uint64_t seed = 0;
    md::Geometry geometry;
    md::SimParams params;
    std::vector<SliceFileEntry> slices;

    /// Slice count and geometry must agree with the lattice formulas.
    void validate() const;
};

std::string slice_file_name(std::size_t index);

std::uint32_t crc32(std::span<const std::byte> bytes);

std::string format_manifest(const DatasetManifest& manifest);
DatasetManifest parse_manifest(const std::string& text);

void write_manifest(const std::filesystem::path& dir, const DatasetManifest& manifest);
DatasetManifest read_manifest(const std::filesystem::path& dir);

} // namespace dsea::io
