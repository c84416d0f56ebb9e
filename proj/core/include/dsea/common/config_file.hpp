#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace dsea {

/// Flat `key = value` text configuration. Lines starting with `#` are comments.
/// Later assignments override earlier ones.
class KeyValueConfig {
public:
    KeyValueConfig() = default;

    static KeyValueConfig parse(std::string_view text);
    static KeyValueConfig load(const std::filesystem::path& path);

    void set(std::string key, std::string value);
    bool contains(std::string_view key) const;
    std::optional<std::string> get(std::string_view key) const;

    std::string get_string(std::string_view key, std::string fallback) const;
    std::uint64_t get_u64(std::string_view key, std::uint64_t fallback) const;
    double get_double(std::string_view key, double fallback) const;
    bool get_bool(std::string_view key, bool fallback) const;

    const std::map<std::string, std::string, std::less<>>& entries() const { return entries_; }

private:
    std::map<std::string, std::string, std::less<>> entries_;
};

} // namespace dsea
