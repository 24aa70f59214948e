#pragma once

#include <cmath>
#include <cstdio>
#include <string>

namespace qpd {

// Shortest-round-trip style formatting used by every writer, so output
// bytes do not depend on stream state or locale.
inline std::string fmt_g(double v, int precision = 12) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    return buf;
}

inline std::string fmt_f(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

} // namespace qpd
