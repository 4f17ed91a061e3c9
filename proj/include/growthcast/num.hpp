#pragma once

#include <charconv>
#include <cmath>
#include <string>
#include <string_view>
#include <system_error>

#include "growthcast/common.hpp"

namespace growthcast {

// Shortest representation that round-trips; keeps serialized manifests
// byte-stable under save/load/save.
inline std::string format_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s, const std::string& where) {
    double v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw DataError(where + ": not a number: '" + std::string(s) + "'");
    return v;
}

inline long parse_long(std::string_view s, const std::string& where) {
    long v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw DataError(where + ": not an integer: '" + std::string(s) + "'");
    return v;
}

}  // namespace growthcast
