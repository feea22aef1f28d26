#ifndef MCC_FORMAT_HPP
#define MCC_FORMAT_HPP

#include <cstdio>
#include <string>

namespace mcc {

/// Shortest-faithful decimal rendering with the given significant digits.
inline std::string format_double(double value, int significant_digits = 17) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", significant_digits, value);
    return buf;
}

}  // namespace mcc

#endif
