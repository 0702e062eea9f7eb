#pragma once

#include <cstdio>
#include <string>

namespace gridatlas {

// Shortest decimal form that parses back to the identical double (%.17g always
// round-trips; shorter forms are tried first so common values stay readable).
inline std::string format_double(double v) {
    char buf[64];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        double back = 0.0;
        std::sscanf(buf, "%lf", &back);
        if (back == v) return buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace gridatlas
