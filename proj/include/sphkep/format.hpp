// sphkep/format.hpp
#pragma once

#include <cstdio>
#include <string>

namespace sphkep {

/// Fixed numeric formatting for every machine-readable surface (JSON, CSV,
/// plain values): 17 significant digits, enough to round-trip a double, and
/// byte-stable for identical inputs.
[[nodiscard]] inline std::string num17(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace sphkep
