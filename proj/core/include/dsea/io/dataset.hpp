#pragma once

#include "dsea/io/manifest.hpp"
#include "dsea/stream/pipeline.hpp"

#include <condition_variable>
#include <cstddef>
#include <exception>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <thread>
#include <utility>
#include <vector>

namespace dsea::io {

/// Process `process` of `num_processes` handles slice ordinal j (0-based) iff j mod N == process.
bool assign_io(std::size_t ordinal, std::size_t process, std::size_t num_processes);

/// Ordinals owned by one process, ascending.
std::vector<std::size_t> assigned_ordinals(std::size_t process, std::size_t num_processes, std::size_t num_slices);

/// Reads slice files round-robin with one thread per I/O process and hands
/// them out in index order. At most `window` slices are held ahead of the consumer.
class RoundRobinLoader final : public stream::SliceFeed {
public:
    RoundRobinLoader(std::filesystem::path dir, DatasetManifest manifest, std::size_t num_processes,
                     std::size_t window);
    ~RoundRobinLoader() override;

    RoundRobinLoader(const RoundRobinLoader&) = delete;
    RoundRobinLoader& operator=(const RoundRobinLoader&) = delete;

    /// Throws IoError naming the slice if its file is missing, corrupt or fails the checksum.
    std::optional<stream::SliceEnvelope> next() override;

    /// (ordinal, process) in completion order.
    std::vector<std::pair<std::size_t, std::size_t>> load_log() const;

private:
    struct Loaded {
        std::optional<stream::SliceEnvelope> slice;
        std::exception_ptr error;
    };

    void loader(std::size_t process, std::stop_token stop);
    stream::SliceEnvelope read_slice(std::size_t ordinal) const;

    std::filesystem::path dir_;
    DatasetManifest manifest_;
    std::size_t num_processes_;
    std::size_t window_;

    mutable std::mutex mu_;
    std::condition_variable_any cv_;
    std::map<std::size_t, Loaded> ready_;
    std::size_t next_ = 0;
    std::vector<std::pair<std::size_t, std::size_t>> log_;
    std::vector<std::jthread> threads_;
};

/// Writes slices round-robin with one thread per I/O process.
class RoundRobinStorer final : public stream::SliceSink {
public:
    RoundRobinStorer(std::filesystem::path dir, std::size_t num_processes);
    ~RoundRobinStorer() override;

    RoundRobinStorer(const RoundRobinStorer&) = delete;
    RoundRobinStorer& operator=(const RoundRobinStorer&) = delete;

    void put(stream::SliceEnvelope slice) override;

    /// Waits for all writes; entries are ordered by slice index. Rethrows the first write error.
    std::vector<SliceFileEntry> finish();

private:
    void writer(std::size_t process);

    std::filesystem::path dir_;
    std::size_t num_processes_;
    std::size_t received_ = 0;

    std::mutex mu_;
    std::condition_variable cv_;
    std::vector<std::vector<stream::SliceEnvelope>> queues_;
    std::map<std::size_t, SliceFileEntry> written_;
    std::exception_ptr error_;
    bool closing_ = false;
    bool finished_ = false;
    std::vector<std::thread> threads_;
};

/// Writes every slice and the manifest. `manifest` supplies geometry and parameters;
/// the slice list and count are filled in.
DatasetManifest store_dataset(const std::filesystem::path& dir, DatasetManifest manifest,
                              const std::vector<stream::SliceEnvelope>& slices, std::size_t num_processes);

/// Generates the fcc initial state for `params` and `seed` and stores it at timestep 0.
DatasetManifest init_dataset(const std::filesystem::path& dir, const md::SimParams& params, std::uint64_t seed,
                             std::size_t num_processes);

std::vector<stream::SliceEnvelope> load_dataset(const std::filesystem::path& dir, std::size_t num_processes);

} // namespace dsea::io
