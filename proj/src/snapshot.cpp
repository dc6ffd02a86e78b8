#include "nlc/snapshot.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "nlc/errors.hpp"
#include "nlc/spectral.hpp"

namespace nlc {

namespace {

constexpr char kMagic[4] = {'N', 'L', 'C', 'F'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::string& buf, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& buf, double d) {
    std::uint64_t v;
    std::memcpy(&v, &d, 8);
    for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint32_t get_u32(const char* p) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(p[i])) << (8 * i);
    return v;
}

double get_f64(const char* p) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(p[i])) << (8 * i);
    double d;
    std::memcpy(&d, &v, 8);
    return d;
}

void append_array(std::string& buf, const RealArray& a) {
    if constexpr (std::endian::native == std::endian::little) {
        const char* p = reinterpret_cast<const char*>(a.data());
        buf.append(p, p + a.size() * 8);
    } else {
        for (std::int64_t i = 0; i < a.size(); ++i) put_f64(buf, a[i]);
    }
}

} // namespace

void write_snapshot(const FlowState& state, const std::string& path) {
    const Grid& g = state.u.grid();
    VectorField3 u = transform(state.u, Basis::Physical);
    VectorField3 n = transform(state.n, Basis::Physical);

    std::string buf;
    buf.reserve(28 + 6 * static_cast<std::size_t>(g.size()) * 8);
    buf.append(kMagic, 4);
    put_u32(buf, kVersion);
    put_u32(buf, static_cast<std::uint32_t>(g.n()));
    put_f64(buf, g.length());
    put_f64(buf, state.t);
    for (int a = 0; a < 3; ++a) append_array(buf, u.comp(a).values());
    for (int a = 0; a < 3; ++a) append_array(buf, n.comp(a).values());

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("write_snapshot: cannot open " + path);
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw DataError("write_snapshot: write failed for " + path);
}

FlowState read_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("read_snapshot: cannot open " + path);
    std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    if (buf.size() < 28)
        throw DataError("read_snapshot: " + path + ": truncated header (" +
                        std::to_string(buf.size()) + " bytes)");
    if (std::memcmp(buf.data(), kMagic, 4) != 0)
        throw DataError("read_snapshot: " + path + ": bad magic at offset 0");
    const std::uint32_t version = get_u32(buf.data() + 4);
    if (version != kVersion)
        throw DataError("read_snapshot: " + path + ": unsupported version " +
                        std::to_string(version) + " at offset 4");
    const std::uint32_t n = get_u32(buf.data() + 8);
    Grid grid(static_cast<int>(n), get_f64(buf.data() + 12));
    const double t = get_f64(buf.data() + 20);

    const std::size_t expected = 28 + 6 * static_cast<std::size_t>(grid.size()) * 8;
    if (buf.size() != expected)
        throw DataError("read_snapshot: " + path + ": N=" + std::to_string(n) +
                        " implies " + std::to_string(expected) + " bytes, file has " +
                        std::to_string(buf.size()));

    auto read_array = [&](int slot) {
        RealArray a(grid.size());
        const char* p = buf.data() + 28 + static_cast<std::size_t>(slot) * grid.size() * 8;
        if constexpr (std::endian::native == std::endian::little) {
            std::memcpy(a.data(), p, static_cast<std::size_t>(grid.size()) * 8);
        } else {
            for (std::int64_t i = 0; i < grid.size(); ++i) a[i] = get_f64(p + i * 8);
        }
        return ScalarField::physical(grid, std::move(a));
    };

    return FlowState{t, VectorField3(read_array(0), read_array(1), read_array(2)),
                     VectorField3(read_array(3), read_array(4), read_array(5))};
}

} // namespace nlc
