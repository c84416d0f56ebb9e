#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dsea::stream {

/// One worker's view of one stage. `received` is only set on a device's first
/// worker and `sent` only on its last. `partial_out` lists output slices this
/// worker contributed to in the stage that are still resident in its output
/// buffer when the stage ends.
struct StageEvent {
    std::size_t stage = 0;   ///< 1-based
    std::size_t device = 0;  ///< 0-based
    std::size_t worker = 0;  ///< 0-based global ordinal
    std::optional<std::size_t> received;
    std::optional<std::size_t> processed;
    std::optional<std::size_t> sent;
    std::vector<std::size_t> partial_out;

    bool operator==(const StageEvent&) const = default;
};

/// `stage<TAB>device<TAB>worker<TAB>received<TAB>processed<TAB>sent<TAB>partials`
/// with `-` for absent values and comma-separated partials.
std::string format_event(const StageEvent& event);
StageEvent parse_event(const std::string& line);

/// Writes a `#`-prefixed header line followed by one event per line.
void write_trace(std::ostream& out, std::span<const StageEvent> events);
std::vector<StageEvent> read_trace(std::istream& in);

} // namespace dsea::stream
