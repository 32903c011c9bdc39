#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "fjlt/errors.hpp"

namespace fjlt::detail {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <typename T>
void write_le(std::ostream& out, T value) {
    std::array<char, sizeof(T)> bytes;
    std::memcpy(bytes.data(), &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big)
        for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
    out.write(bytes.data(), sizeof(T));
}

template <typename T>
T read_le(std::istream& in, const char* what) {
    std::array<char, sizeof(T)> bytes;
    if (!in.read(bytes.data(), sizeof(T)))
        throw FormatError(std::string("truncated input while reading ") + what);
    if constexpr (std::endian::native == std::endian::big)
        for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
    T value;
    std::memcpy(&value, bytes.data(), sizeof(T));
    return value;
}

inline void expect_magic(std::istream& in, const char (&magic)[5]) {
    char got[4];
    if (!in.read(got, 4) || std::memcmp(got, magic, 4) != 0)
        throw FormatError(std::string("bad magic, expected ") + magic);
}

}  // namespace fjlt::detail
