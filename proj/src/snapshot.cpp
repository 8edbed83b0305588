#include "nsrl/snapshot.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

#include "nsrl/errors.hpp"

namespace nsrl {

namespace {

constexpr char magic[4] = {'N', 'S', 'R', 'L'};
constexpr std::uint32_t format_version = 1;
constexpr int max_n = 4096;  // 3 * 4096^3 doubles is already 1.5 TiB

template <class T>
void write_raw(std::ofstream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
void read_raw(std::ifstream& in, T& v, const std::string& path) {
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw IoError("snapshot: truncated file " + path);
}

} // namespace

void store_snapshot(const Field& field, double time, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("snapshot: cannot open " + path + " for writing");
    const GridSpec& grid = field.grid();
    out.write(magic, 4);
    write_raw(out, format_version);
    write_raw(out, static_cast<std::uint32_t>(grid.n));
    write_raw(out, grid.domain_length);
    write_raw(out, grid.nu);
    write_raw(out, time);
    for (int c = 0; c < 3; ++c) {
        out.write(reinterpret_cast<const char*>(field.component(c).physical()),
                  static_cast<std::streamsize>(sizeof(double) * grid.point_count()));
    }
    if (!out) throw IoError("snapshot: write failed for " + path);
}

Snapshot load_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("snapshot: cannot open " + path);
    char m[4];
    in.read(m, 4);
    if (!in || std::memcmp(m, magic, 4) != 0)
        throw IoError("snapshot: bad magic in " + path + " (expected NSRL)");
    std::uint32_t version = 0, n = 0;
    read_raw(in, version, path);
    if (version != format_version)
        throw IoError("snapshot: unsupported version " + std::to_string(version) + " in " + path +
                      " (supported: " + std::to_string(format_version) + ")");
    read_raw(in, n, path);
    if (n < 8 || n > max_n || n % 2 != 0)
        throw IoError("snapshot: invalid grid size " + std::to_string(n) + " in " + path);

    GridSpec grid;
    grid.n = static_cast<int>(n);
    read_raw(in, grid.domain_length, path);
    read_raw(in, grid.nu, path);
    double time = 0.0;
    read_raw(in, time, path);
    grid.validate();

    std::array<RealBuffer, 3> comp{RealBuffer(grid.point_count()), RealBuffer(grid.point_count()),
                                   RealBuffer(grid.point_count())};
    for (int c = 0; c < 3; ++c) {
        in.read(reinterpret_cast<char*>(comp[c].data()),
                static_cast<std::streamsize>(sizeof(double) * grid.point_count()));
        if (!in) throw IoError("snapshot: truncated sample data in " + path);
    }
    return Snapshot{Field::from_physical(grid, std::move(comp[0]), std::move(comp[1]),
                                         std::move(comp[2])),
                    time};
}

} // namespace nsrl
