#pragma once

#include <cctype>
#include <cstdint>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "anderson1d/distribution.hpp"
#include "anderson1d/util.hpp"

namespace anderson {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Flat key-value configuration with one section per module. Unknown sections
// or keys are rejected so experiment files stay diff-auditable.
class ExperimentConfig {
  public:
    static const std::map<std::string, std::vector<std::string>>& schema() {
        static const std::map<std::string, std::vector<std::string>> s = {
            {"distribution", {"kind", "atoms", "support", "breaks", "values"}},
            {"lyapunov", {"energy_grid", "steps", "realizations", "seed"}},
            {"furstenberg", {"grid", "tol", "max_iter", "energy", "quad_points"}},
            {"spectrum", {"L", "realizations", "seed"}},
            {"dynlocal", {"L", "m_max", "realizations", "seed", "n_site"}},
            {"spectral_avg", {"size", "seed", "z", "lambda_max"}},
            {"ks", {"L", "m_max", "grid_N", "grid_X", "e_points", "mc_realizations", "seed"}},
            {"run", {"workers", "output"}},
        };
        return s;
    }

    void set(const std::string& section, const std::string& key, const std::string& value) {
        const auto& sch = schema();
        const auto it = sch.find(section);
        if (it == sch.end()) throw ConfigError("unknown config section: [" + section + "]");
        bool ok = false;
        for (const auto& k : it->second) ok = ok || (k == key);
        if (!ok) throw ConfigError("unknown key '" + key + "' in section [" + section + "]");
        data_[section][key] = value;
    }

    bool has(const std::string& section, const std::string& key) const {
        const auto s = data_.find(section);
        if (s == data_.end()) return false;
        return s->second.count(key) > 0;
    }

    std::string get(const std::string& section, const std::string& key,
                    const std::string& fallback = "") const {
        const auto s = data_.find(section);
        if (s == data_.end()) return fallback;
        const auto k = s->second.find(key);
        return k == s->second.end() ? fallback : k->second;
    }

    std::int64_t get_int(const std::string& section, const std::string& key,
                         std::int64_t fallback) const {
        if (!has(section, key)) return fallback;
        const std::string v = get(section, key);
        try {
            std::size_t pos = 0;
            const std::int64_t x = std::stoll(v, &pos);
            if (pos != v.size()) throw std::invalid_argument(v);
            return x;
        } catch (const std::exception&) {
            throw ConfigError("field " + section + "." + key + ": expected integer, got '" + v + "'");
        }
    }

    double get_real(const std::string& section, const std::string& key, double fallback) const {
        if (!has(section, key)) return fallback;
        const std::string v = get(section, key);
        try {
            std::size_t pos = 0;
            const double x = std::stod(v, &pos);
            if (pos != v.size()) throw std::invalid_argument(v);
            return x;
        } catch (const std::exception&) {
            throw ConfigError("field " + section + "." + key + ": expected real, got '" + v + "'");
        }
    }

    // Canonical text form: sorted sections and keys; also the hash input.
    std::string serialize() const {
        std::ostringstream out;
        for (const auto& [section, kv] : data_) {
            out << "[" << section << "]\n";
            for (const auto& [k, v] : kv) out << k << " = " << v << "\n";
            out << "\n";
        }
        return out.str();
    }

    std::string hash_hex() const {
        static const char* digits = "0123456789abcdef";
        std::uint64_t h = fnv1a(serialize());
        std::string out(16, '0');
        for (int i = 15; i >= 0; --i) {
            out[static_cast<std::size_t>(i)] = digits[h & 0xf];
            h >>= 4;
        }
        return out;
    }

    static ExperimentConfig parse(const std::string& text) {
        ExperimentConfig cfg;
        std::istringstream in(text);
        std::string line, section;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto hash_pos = line.find('#');
            if (hash_pos != std::string::npos) line = line.substr(0, hash_pos);
            line = trim(line);
            if (line.empty()) continue;
            if (line.front() == '[') {
                if (line.back() != ']')
                    throw ConfigError("line " + std::to_string(lineno) + ": malformed section header");
                section = trim(line.substr(1, line.size() - 2));
                if (schema().count(section) == 0)
                    throw ConfigError("unknown config section: [" + section + "]");
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
            if (section.empty())
                throw ConfigError("line " + std::to_string(lineno) + ": key outside any section");
            cfg.set(section, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        }
        return cfg;
    }

    // Distribution selection per the external interface: kind = atoms |
    // uniform | piecewise, with atoms = [[v,w],...] or support = [a,b].
    SiteDistribution make_distribution() const {
        const std::string kind = get("distribution", "kind", "atoms");
        if (kind == "atoms") {
            const std::string spec = get("distribution", "atoms", "[[0,0.5],[1,0.5]]");
            std::vector<std::pair<double, double>> atoms;
            const auto rows = parse_nested_list(spec);
            for (const auto& row : rows) {
                if (row.size() != 2) throw ConfigError("distribution.atoms: expected [v, w] pairs");
                atoms.emplace_back(row[0], row[1]);
            }
            return SiteDistribution::atoms(std::move(atoms));
        }
        if (kind == "uniform") {
            const auto ab = parse_flat_list(get("distribution", "support", "[0,1]"));
            if (ab.size() != 2) throw ConfigError("distribution.support: expected [a, b]");
            return SiteDistribution::uniform(ab[0], ab[1]);
        }
        if (kind == "piecewise") {
            const auto breaks = parse_flat_list(get("distribution", "breaks", ""));
            const auto values = parse_flat_list(get("distribution", "values", ""));
            return SiteDistribution::piecewise(breaks, values);
        }
        throw ConfigError("distribution.kind: expected atoms | uniform | piecewise");
    }

    static std::vector<double> parse_flat_list(const std::string& s) {
        std::vector<double> out;
        std::string token;
        for (char c : s) {
            if (c == '[' || c == ']' || c == ',' || std::isspace(static_cast<unsigned char>(c))) {
                if (!token.empty()) {
                    out.push_back(std::stod(token));
                    token.clear();
                }
            } else {
                token.push_back(c);
            }
        }
        if (!token.empty()) out.push_back(std::stod(token));
        return out;
    }

    static std::vector<std::vector<double>> parse_nested_list(const std::string& s) {
        std::vector<std::vector<double>> out;
        std::vector<double> row;
        std::string token;
        int depth = 0;
        const auto flush_token = [&]() {
            if (!token.empty()) {
                row.push_back(std::stod(token));
                token.clear();
            }
        };
        for (char c : s) {
            if (c == '[') {
                ++depth;
            } else if (c == ']') {
                flush_token();
                if (depth == 2) {
                    out.push_back(row);
                    row.clear();
                }
                --depth;
            } else if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
                flush_token();
            } else {
                token.push_back(c);
            }
        }
        return out;
    }

  private:
    static std::string trim(const std::string& s) {
        std::size_t a = 0, b = s.size();
        while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
        while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
        return s.substr(a, b - a);
    }

    std::map<std::string, std::map<std::string, std::string>> data_;
};

// Energy grid specification "a:b:step", endpoints inclusive up to rounding.
inline std::vector<double> parse_energy_grid(const std::string& spec) {
    std::vector<double> parts;
    std::string token;
    for (char c : spec) {
        if (c == ':') {
            parts.push_back(std::stod(token));
            token.clear();
        } else {
            token.push_back(c);
        }
    }
    if (!token.empty()) parts.push_back(std::stod(token));
    if (parts.size() != 3 || !(parts[2] > 0))
        throw ConfigError("energy grid: expected a:b:step with step > 0");
    std::vector<double> grid;
    for (double e = parts[0]; e <= parts[1] + 1e-12; e += parts[2]) grid.push_back(e);
    return grid;
}

}  // namespace anderson
