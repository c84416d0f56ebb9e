#include "dsea/stream/trace.hpp"

#include "dsea/common/error.hpp"

#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ranges.h>

namespace dsea::stream {

namespace {

std::string opt(const std::optional<std::size_t>& v) { return v ? std::to_string(*v) : "-"; }

std::optional<std::size_t> parse_opt(const std::string& field) {
    if (field == "-") return std::nullopt;
    try {
        return static_cast<std::size_t>(std::stoull(field));
    } catch (const std::exception&) {
        throw FormatError("trace: bad field '" + field + "'");
    }
}

} // namespace

std::string format_event(const StageEvent& e) {
    const std::string partials = e.partial_out.empty() ? "-" : fmt::format("{}", fmt::join(e.partial_out, ","));
    return fmt::format("{}\t{}\t{}\t{}\t{}\t{}\t{}", e.stage, e.device, e.worker, opt(e.received),
                       opt(e.processed), opt(e.sent), partials);
}

StageEvent parse_event(const std::string& line) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    for (std::string f; std::getline(ss, f, '\t');) fields.push_back(f);
    if (fields.size() != 7) throw FormatError("trace: expected 7 tab-separated fields: " + line);
    StageEvent e;
    e.stage = *parse_opt(fields[0]);
    e.device = *parse_opt(fields[1]);
    e.worker = *parse_opt(fields[2]);
    e.received = parse_opt(fields[3]);
    e.processed = parse_opt(fields[4]);
    e.sent = parse_opt(fields[5]);
    if (fields[6] != "-") {
        std::stringstream ps(fields[6]);
        for (std::string p; std::getline(ps, p, ',');) e.partial_out.push_back(*parse_opt(p));
    }
    return e;
}

void write_trace(std::ostream& out, std::span<const StageEvent> events) {
    out << "#stage\tdevice\tworker\treceived\tprocessed\tsent\tpartials\n";
    for (const auto& e : events) out << format_event(e) << '\n';
}

std::vector<StageEvent> read_trace(std::istream& in) {
    std::vector<StageEvent> out;
    for (std::string line; std::getline(in, line);) {
        if (line.empty() || line.front() == '#') continue;
        out.push_back(parse_event(line));
    }
    return out;
}

} // namespace dsea::stream
