#pragma once

#include <cstdio>
#include <string>

namespace euler1d {

/// Shortest round-trippable decimal form of a double (17 significant digits).
inline std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace euler1d
