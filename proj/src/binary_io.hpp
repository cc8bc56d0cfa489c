#pragma once

// Little-endian primitives shared by the binary file formats.

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>

#include "fncstance/error.hpp"

namespace fncstance::io {

template <typename UInt>
inline UInt to_little(UInt v) {
    if constexpr (std::endian::native == std::endian::big) {
        UInt r = 0;
        for (std::size_t i = 0; i < sizeof(UInt); ++i) {
            r = static_cast<UInt>((r << 8) | ((v >> (8 * i)) & 0xFF));
        }
        return r;
    } else {
        return v;
    }
}

template <typename UInt>
inline void put(std::ostream& out, UInt v) {
    v = to_little(v);
    char bytes[sizeof(UInt)];
    std::memcpy(bytes, &v, sizeof(UInt));
    out.write(bytes, sizeof(UInt));
}

inline void put_f64(std::ostream& out, double v) { put(out, std::bit_cast<std::uint64_t>(v)); }
inline void put_f32(std::ostream& out, float v) { put(out, std::bit_cast<std::uint32_t>(v)); }

inline void put_string(std::ostream& out, std::string_view s) {
    put(out, static_cast<std::uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline void read_exact(std::istream& in, char* dst, std::size_t n, std::string_view what) {
    in.read(dst, static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in.gcount()) != n) {
        throw FormatError("truncated file while reading " + std::string(what));
    }
}

template <typename UInt>
inline UInt get(std::istream& in, std::string_view what) {
    char bytes[sizeof(UInt)];
    read_exact(in, bytes, sizeof(UInt), what);
    UInt v;
    std::memcpy(&v, bytes, sizeof(UInt));
    return to_little(v);
}

inline double get_f64(std::istream& in, std::string_view what) {
    return std::bit_cast<double>(get<std::uint64_t>(in, what));
}
inline float get_f32(std::istream& in, std::string_view what) {
    return std::bit_cast<float>(get<std::uint32_t>(in, what));
}

inline std::string get_string(std::istream& in, std::string_view what,
                              std::uint32_t limit = 1u << 28) {
    const auto n = get<std::uint32_t>(in, what);
    if (n > limit) throw FormatError("implausible length for " + std::string(what));
    std::string s(n, '\0');
    read_exact(in, s.data(), n, what);
    return s;
}

inline void expect_magic(std::istream& in, std::string_view magic, const std::string& path) {
    std::string got(magic.size(), '\0');
    in.read(got.data(), static_cast<std::streamsize>(magic.size()));
    if (static_cast<std::size_t>(in.gcount()) != magic.size() || got != magic) {
        throw FormatError(path + ": bad magic, expected " + std::string(magic));
    }
}

}  // namespace fncstance::io
