#include "dsea/md/slice_data.hpp"

#include "dsea/common/error.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>

#include <fmt/format.h>

namespace dsea::md {

namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <typename T>
T to_little(T v) {
    if constexpr (std::endian::native == std::endian::big) {
        auto bytes = std::bit_cast<std::array<std::byte, sizeof(T)>>(v);
        std::reverse(bytes.begin(), bytes.end());
        return std::bit_cast<T>(bytes);
    } else {
        return v;
    }
}

class Writer {
public:
    explicit Writer(stream::Payload& out) : out_(out) {}

    template <typename T>
    void put(T v) {
        const T le = to_little(v);
        const auto* p = reinterpret_cast<const std::byte*>(&le);
        out_.insert(out_.end(), p, p + sizeof(T));
    }

    void put_f64(double v) { put(std::bit_cast<std::uint64_t>(v)); }

    void put_vec(const Vec3& v) {
        put_f64(v.x);
        put_f64(v.y);
        put_f64(v.z);
    }

    void put_molecule(const Molecule& m) {
        put_vec(m.r);
        put_vec(m.v);
        put_vec(m.force_new);
        put_vec(m.force_old);
    }

private:
    stream::Payload& out_;
};

class Reader {
public:
    explicit Reader(std::span<const std::byte> in) : in_(in) {}

    template <typename T>
    T get() {
        if (in_.size() - pos_ < sizeof(T))
            throw FormatError(fmt::format("slice data truncated at byte {} of {}", pos_, in_.size()));
        T v;
        std::memcpy(&v, in_.data() + pos_, sizeof(T));
        pos_ += sizeof(T);
        return to_little(v);
    }

    double get_f64() { return std::bit_cast<double>(get<std::uint64_t>()); }

    Vec3 get_vec() {
        Vec3 v;
        v.x = get_f64();
        v.y = get_f64();
        v.z = get_f64();
        return v;
    }

    Molecule get_molecule() {
        Molecule m;
        m.r = get_vec();
        m.v = get_vec();
        m.force_new = get_vec();
        m.force_old = get_vec();
        return m;
    }

    std::size_t remaining() const noexcept { return in_.size() - pos_; }

private:
    std::span<const std::byte> in_;
    std::size_t pos_ = 0;
};

constexpr std::size_t kMoleculeBytes = 12 * sizeof(double);

std::size_t axis_cell(double v, const Geometry& g) {
    if (!(v > 0)) return 0;
    const auto c = static_cast<std::size_t>(v / g.cell_length);
    return std::min(c, g.cells_per_edge - 1);
}

void rebuild_starts(SliceData& s) {
    s.cell_start.assign(s.cell_counts.size() + 1, 0);
    for (std::size_t c = 0; c < s.cell_counts.size(); ++c) s.cell_start[c + 1] = s.cell_start[c] + s.cell_counts[c];
}

} // namespace

std::size_t slice_of(double x, const Geometry& geometry) { return axis_cell(x, geometry) + 1; }

std::size_t cell_of(const Vec3& r, const Geometry& geometry) {
    return axis_cell(r.y, geometry) * geometry.cells_per_edge + axis_cell(r.z, geometry);
}

void bin_molecules(SliceData& slice, const Geometry& geometry) {
    slice.cells_per_edge = geometry.cells_per_edge;
    const std::size_t cells = geometry.cells_per_slice();
    std::vector<std::uint32_t> cell_id(slice.molecules.size());
    slice.cell_counts.assign(cells, 0);
    for (std::size_t i = 0; i < slice.molecules.size(); ++i) {
        cell_id[i] = static_cast<std::uint32_t>(cell_of(slice.molecules[i].r, geometry));
        ++slice.cell_counts[cell_id[i]];
    }
    rebuild_starts(slice);

    std::vector<Molecule> sorted(slice.molecules.size());
    std::vector<std::uint32_t> fill(slice.cell_start.begin(), slice.cell_start.end() - 1);
    for (std::size_t i = 0; i < slice.molecules.size(); ++i) sorted[fill[cell_id[i]]++] = slice.molecules[i];
    slice.molecules = std::move(sorted);

    slice.cell_list.resize(slice.molecules.size());
    for (std::size_t i = 0; i < slice.cell_list.size(); ++i) slice.cell_list[i] = static_cast<std::uint32_t>(i);
}

SliceData make_slice(std::uint64_t index, std::vector<Molecule> molecules, const Geometry& geometry) {
    SliceData s;
    s.index = index;
    s.molecules = std::move(molecules);
    bin_molecules(s, geometry);
    return s;
}

void check_slice(const SliceData& s, const Geometry& g) {
    if (s.cells_per_edge != g.cells_per_edge)
        throw FormatError(fmt::format("slice {}: N_xyz {} does not match geometry {}", s.index, s.cells_per_edge,
                                      g.cells_per_edge));
    if (s.cell_counts.size() != g.cells_per_slice()) throw FormatError("slice: CellNM has wrong length");
    std::size_t total = 0;
    for (auto n : s.cell_counts) total += n;
    if (total != s.molecules.size() || s.cell_list.size() != s.molecules.size())
        throw FormatError(fmt::format("slice {}: sum of CellNM {} != molecule count {}", s.index, total,
                                      s.molecules.size()));
    for (std::size_t c = 0; c < s.cell_count(); ++c) {
        for (auto i : s.cell(c)) {
            if (i >= s.molecules.size()) throw FormatError("slice: CellList index out of range");
            const auto& r = s.molecules[i].r;
            if (cell_of(r, g) != c || slice_of(r.x, g) != s.index)
                throw FormatError(fmt::format("slice {}: molecule {} at ({}, {}, {}) is binned in the wrong cell",
                                              s.index, i, r.x, r.y, r.z));
        }
    }
}

stream::Payload encode_slice(const SliceData& s) {
    stream::Payload out;
    out.reserve(1 + 3 * 8 + s.molecules.size() * kMoleculeBytes + (s.cell_counts.size() + s.cell_list.size()) * 4);
    Writer w(out);
    w.put(kSliceFormatVersion);
    w.put<std::uint64_t>(s.index);
    w.put<std::uint64_t>(s.cells_per_edge);
    w.put<std::uint64_t>(s.molecules.size());
    for (const auto& m : s.molecules) w.put_molecule(m);
    for (auto n : s.cell_counts) w.put(n);
    for (auto i : s.cell_list) w.put(i);
    return out;
}

SliceData decode_slice(std::span<const std::byte> bytes) {
    Reader r(bytes);
    const auto version = r.get<std::uint8_t>();
    if (version != kSliceFormatVersion)
        throw FormatError(fmt::format("unsupported slice format version {}", version));
    SliceData s;
    s.index = r.get<std::uint64_t>();
    s.cells_per_edge = r.get<std::uint64_t>();
    const auto count = r.get<std::uint64_t>();
    if (count > r.remaining() / kMoleculeBytes) throw FormatError("slice data: molecule count exceeds payload");
    if (s.cells_per_edge > (1u << 16)) throw FormatError("slice data: implausible cell grid");
    s.molecules.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) s.molecules.push_back(r.get_molecule());
    s.cell_counts.resize(s.cell_count());
    std::uint64_t total = 0;
    for (auto& n : s.cell_counts) {
        n = r.get<std::uint32_t>();
        total += n;
    }
    if (total != count) throw FormatError("slice data: sum of CellNM does not match molecule count");
    s.cell_list.resize(count);
    for (auto& i : s.cell_list) {
        i = r.get<std::uint32_t>();
        if (i >= count) throw FormatError("slice data: CellList index out of range");
    }
    if (r.remaining() != 0) throw FormatError("slice data: trailing bytes");
    rebuild_starts(s);
    return s;
}

void append_molecules(stream::Payload& out, std::span<const Molecule> molecules) {
    out.reserve(out.size() + molecules.size() * kMoleculeBytes);
    Writer w(out);
    for (const auto& m : molecules) w.put_molecule(m);
}

std::vector<Molecule> read_molecules(std::span<const std::byte> bytes) {
    if (bytes.size() % kMoleculeBytes != 0) throw FormatError("molecule records: size not a multiple of 96 bytes");
    Reader r(bytes);
    std::vector<Molecule> out(bytes.size() / kMoleculeBytes);
    for (auto& m : out) m = r.get_molecule();
    return out;
}

} // namespace dsea::md
