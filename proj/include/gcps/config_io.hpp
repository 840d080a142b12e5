#pragma once

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "gcps/lattice.hpp"

namespace gcps {

// Snapshot formats: plain text (one state per line, header comment) and
// packed 2-bit binary with a fixed-size header.

inline constexpr std::uint32_t kSnapshotMagic = 0x53504347u;  // "GCPS" little-endian
inline constexpr std::uint32_t kSnapshotVersion = 1;

inline void write_config_text(std::ostream& os, const Configuration& cfg, int N, int d) {
    os << "# gcps-config v" << kSnapshotVersion << " N=" << N << " d=" << d << "\n";
    for (auto s : cfg) os << static_cast<int>(s) << "\n";
}

inline Configuration read_config_text(std::istream& is, int& N, int& d) {
    std::string header;
    std::getline(is, header);
    int version = 0;
    if (std::sscanf(header.c_str(), "# gcps-config v%d N=%d d=%d", &version, &N, &d) != 3 ||
        version != static_cast<int>(kSnapshotVersion))
        throw std::runtime_error("read_config_text: bad header");
    Lattice lat(N, d);
    Configuration cfg;
    cfg.reserve(lat.site_count());
    int v;
    while (is >> v) {
        if (v < 0 || v > 3) throw std::runtime_error("read_config_text: state out of range");
        cfg.push_back(static_cast<std::uint8_t>(v));
    }
    if (cfg.size() != lat.site_count())
        throw std::runtime_error("read_config_text: site count mismatch");
    return cfg;
}

inline void write_config_binary(std::ostream& os, const Configuration& cfg, int N, int d) {
    std::uint32_t header[4] = {kSnapshotMagic, kSnapshotVersion,
                               static_cast<std::uint32_t>(N), static_cast<std::uint32_t>(d)};
    os.write(reinterpret_cast<const char*>(header), sizeof(header));
    std::string packed((cfg.size() + 3) / 4, '\0');
    for (std::size_t i = 0; i < cfg.size(); ++i)
        packed[i / 4] = static_cast<char>(packed[i / 4] | (cfg[i] << (2 * (i % 4))));
    os.write(packed.data(), static_cast<std::streamsize>(packed.size()));
}

inline Configuration read_config_binary(std::istream& is, int& N, int& d) {
    std::uint32_t header[4];
    is.read(reinterpret_cast<char*>(header), sizeof(header));
    if (!is || header[0] != kSnapshotMagic || header[1] != kSnapshotVersion)
        throw std::runtime_error("read_config_binary: bad header");
    N = static_cast<int>(header[2]);
    d = static_cast<int>(header[3]);
    Lattice lat(N, d);
    std::string packed((lat.site_count() + 3) / 4, '\0');
    is.read(packed.data(), static_cast<std::streamsize>(packed.size()));
    if (!is) throw std::runtime_error("read_config_binary: truncated payload");
    Configuration cfg(lat.site_count());
    for (std::size_t i = 0; i < cfg.size(); ++i)
        cfg[i] = static_cast<std::uint8_t>((static_cast<unsigned char>(packed[i / 4]) >> (2 * (i % 4))) & 3u);
    return cfg;
}

}  // namespace gcps
