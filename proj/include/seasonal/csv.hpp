#pragma once
// Deterministic CSV formatting: 17 significant digits, '#' metadata lines.

#include <cstdio>
#include <ostream>
#include <string>

namespace seasonal {

inline std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void csv_comment(std::ostream& os, const std::string& line) {
    os << "# " << line << "\n";
}

}  // namespace seasonal
