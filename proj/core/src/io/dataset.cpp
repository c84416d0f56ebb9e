#include "dsea/io/dataset.hpp"

#include "dsea/common/error.hpp"
#include "dsea/md/lattice.hpp"
#include "dsea/md/md_kernel.hpp"
#include "dsea/md/slice_data.hpp"

#include <fstream>

#include <fmt/format.h>

namespace dsea::io {

namespace fs = std::filesystem;

bool assign_io(std::size_t ordinal, std::size_t process, std::size_t num_processes) {
    if (num_processes == 0) throw ConfigError("I/O process count must be >= 1");
    return ordinal % num_processes == process;
}

std::vector<std::size_t> assigned_ordinals(std::size_t process, std::size_t num_processes, std::size_t num_slices) {
    if (num_processes == 0) throw ConfigError("I/O process count must be >= 1");
    std::vector<std::size_t> out;
    for (std::size_t j = process; j < num_slices; j += num_processes) out.push_back(j);
    return out;
}

namespace {

stream::Payload read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    in.seekg(0, std::ios::end);
    const auto size = static_cast<std::size_t>(in.tellg());
    in.seekg(0);
    stream::Payload bytes(size);
    in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(size));
    if (!in) throw std::runtime_error("short read on " + path.string());
    return bytes;
}

void write_file(const fs::path& path, const stream::Payload& bytes) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + tmp.string());
        out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw IoError("write failed: " + tmp.string());
    }
    fs::rename(tmp, path);
}

} // namespace

RoundRobinLoader::RoundRobinLoader(fs::path dir, DatasetManifest manifest, std::size_t num_processes,
                                   std::size_t window)
    : dir_(std::move(dir)), manifest_(std::move(manifest)), num_processes_(num_processes),
      window_(std::max<std::size_t>(window, 1)) {
    if (num_processes_ == 0) throw ConfigError("I/O process count must be >= 1");
    if (manifest_.slices.size() != manifest_.num_slices)
        throw IoError("manifest slice list does not match num_slices");
    const auto n = std::min(num_processes_, manifest_.num_slices);
    threads_.reserve(n);
    for (std::size_t p = 0; p < n; ++p)
        threads_.emplace_back([this, p](std::stop_token st) { loader(p, st); });
}

RoundRobinLoader::~RoundRobinLoader() {
    for (auto& t : threads_) t.request_stop();
    cv_.notify_all();
    threads_.clear();
}

stream::SliceEnvelope RoundRobinLoader::read_slice(std::size_t ordinal) const {
    const auto index = ordinal + 1;
    const auto& entry = manifest_.slices[ordinal];
    stream::Payload bytes;
    try {
        bytes = read_file(dir_ / entry.file);
    } catch (const std::exception& e) {
        throw IoError(fmt::format("slice {}: {}", index, e.what()));
    }
    const auto crc = crc32(bytes);
    if (crc != entry.crc32)
        throw IoError(fmt::format("slice {}: checksum mismatch (file {:08x}, manifest {:08x})", index, crc,
                                  entry.crc32));
    try {
        const auto data = md::decode_slice(bytes);
        if (data.index != index)
            throw FormatError(fmt::format("file holds slice {}", data.index));
        if (data.cells_per_edge != manifest_.geometry.cells_per_edge)
            throw FormatError("cells per edge differ from the manifest");
    } catch (const std::exception& e) {
        throw IoError(fmt::format("slice {}: corrupt file {}: {}", index, entry.file, e.what()));
    }
    return stream::SliceEnvelope{index, manifest_.timestep, std::move(bytes)};
}

void RoundRobinLoader::loader(std::size_t process, std::stop_token stop) {
    for (const auto ordinal : assigned_ordinals(process, num_processes_, manifest_.num_slices)) {
        {
            std::unique_lock lock(mu_);
            if (!cv_.wait(lock, stop, [&] { return ordinal < next_ + window_; })) return;
        }
        Loaded item;
        try {
            item.slice = read_slice(ordinal);
        } catch (...) {
            item.error = std::current_exception();
        }
        const bool failed = static_cast<bool>(item.error);
        {
            std::lock_guard lock(mu_);
            ready_.emplace(ordinal, std::move(item));
            log_.emplace_back(ordinal, process);
        }
        cv_.notify_all();
        if (failed) return;
    }
}

std::optional<stream::SliceEnvelope> RoundRobinLoader::next() {
    std::unique_lock lock(mu_);
    if (next_ >= manifest_.num_slices) return std::nullopt;
    cv_.wait(lock, [&] { return ready_.contains(next_); });
    if (auto err = ready_.at(next_).error) std::rethrow_exception(err);
    auto node = ready_.extract(next_);
    ++next_;
    lock.unlock();
    cv_.notify_all();
    return std::move(node.mapped().slice);
}

std::vector<std::pair<std::size_t, std::size_t>> RoundRobinLoader::load_log() const {
    std::lock_guard lock(mu_);
    return log_;
}

RoundRobinStorer::RoundRobinStorer(fs::path dir, std::size_t num_processes)
    : dir_(std::move(dir)), num_processes_(num_processes), queues_(num_processes) {
    if (num_processes_ == 0) throw ConfigError("I/O process count must be >= 1");
    fs::create_directories(dir_);
    threads_.reserve(num_processes_);
    for (std::size_t p = 0; p < num_processes_; ++p) threads_.emplace_back([this, p] { writer(p); });
}

RoundRobinStorer::~RoundRobinStorer() {
    try {
        finish();
    } catch (...) {
    }
}

void RoundRobinStorer::put(stream::SliceEnvelope slice) {
    if (slice.index == 0) throw IoError("slice index must be >= 1");
    {
        std::lock_guard lock(mu_);
        if (closing_) throw IoError("storer already finished");
        if (error_) std::rethrow_exception(error_);
        queues_[(slice.index - 1) % num_processes_].push_back(std::move(slice));
        ++received_;
    }
    cv_.notify_all();
}

void RoundRobinStorer::writer(std::size_t process) {
    auto& queue = queues_[process];
    for (;;) {
        stream::SliceEnvelope slice;
        {
            std::unique_lock lock(mu_);
            cv_.wait(lock, [&] { return closing_ || !queue.empty(); });
            if (queue.empty()) return;
            slice = std::move(queue.front());
            queue.erase(queue.begin());
        }
        try {
            SliceFileEntry entry{slice_file_name(slice.index), crc32(slice.payload)};
            write_file(dir_ / entry.file, slice.payload);
            std::lock_guard lock(mu_);
            written_.emplace(slice.index, std::move(entry));
        } catch (...) {
            std::lock_guard lock(mu_);
            if (!error_) error_ = std::current_exception();
        }
    }
}

std::vector<SliceFileEntry> RoundRobinStorer::finish() {
    if (!finished_) {
        {
            std::lock_guard lock(mu_);
            closing_ = true;
        }
        cv_.notify_all();
        for (auto& t : threads_) t.join();
        threads_.clear();
        finished_ = true;
    }
    if (error_) std::rethrow_exception(error_);
    std::vector<SliceFileEntry> out;
    out.reserve(written_.size());
    std::size_t expected = 1;
    for (auto& [index, entry] : written_) {
        if (index != expected++) throw IoError(fmt::format("slice {} was never stored", expected - 1));
        out.push_back(entry);
    }
    return out;
}

DatasetManifest store_dataset(const fs::path& dir, DatasetManifest manifest,
                              const std::vector<stream::SliceEnvelope>& slices, std::size_t num_processes) {
    RoundRobinStorer storer(dir, num_processes);
    for (const auto& s : slices) storer.put(s);
    manifest.slices = storer.finish();
    manifest.num_slices = manifest.slices.size();
    if (!slices.empty()) manifest.timestep = slices.front().timestep;
    write_manifest(dir, manifest);
    return manifest;
}

DatasetManifest init_dataset(const fs::path& dir, const md::SimParams& params, std::uint64_t seed,
                             std::size_t num_processes) {
    params.validate();
    DatasetManifest manifest;
    manifest.seed = seed;
    manifest.params = params;
    manifest.geometry = md::build_domain(params);
    const auto slices = md::to_envelopes(md::generate_fcc(params, manifest.geometry, seed), 0);
    return store_dataset(dir, std::move(manifest), slices, num_processes);
}

std::vector<stream::SliceEnvelope> load_dataset(const fs::path& dir, std::size_t num_processes) {
    auto manifest = read_manifest(dir);
    RoundRobinLoader loader(dir, manifest, num_processes, num_processes);
    std::vector<stream::SliceEnvelope> out;
    out.reserve(manifest.num_slices);
    while (auto s = loader.next()) out.push_back(std::move(*s));
    return out;
}

} // namespace dsea::io
