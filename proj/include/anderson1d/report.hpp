#pragma once

#include <cstdio>
#include <string>
#include <vector>

namespace anderson {

// Deterministic float formatting for emitted payloads: reruns with the same
// config must produce identical bytes.
inline std::string fmt_g(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

inline std::string csv_preamble(const std::string& tool, const std::string& columns,
                                const std::string& config_hash) {
    std::string out;
    out += "# anderson1d " + tool + " v1\n";
    out += "# config_hash=" + config_hash + "\n";
    out += columns + "\n";
    return out;
}

inline std::string csv_row(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out += ",";
        out += fields[i];
    }
    out += "\n";
    return out;
}

}  // namespace anderson
