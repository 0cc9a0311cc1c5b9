#ifndef QOC_CONFIG_HPP
#define QOC_CONFIG_HPP

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "qoc/common.hpp"

namespace qoc {

/// Flat sectioned key=value run configuration:
///   [system] / [target] / [optimizer] / [output] (+ tool-specific sections).
/// '#' and ';' start comments; whitespace around keys/values is trimmed.
class RunConfig {
public:
    using Section = std::map<std::string, std::string>;

    static RunConfig parse_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw Error("config: cannot open " + path);
        std::stringstream ss;
        ss << in.rdbuf();
        return parse_string(ss.str(), path);
    }

    static RunConfig parse_string(const std::string& text,
                                  const std::string& origin = "<string>") {
        RunConfig cfg;
        std::istringstream in(text);
        std::string line, section;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            // '#' opens a comment anywhere; ';' only at line start or after
            // whitespace, so matrix literals like "0 0; 0 1" survive.
            auto cut = line.find('#');
            for (size_t i = 0; i < line.size() && i < cut; ++i)
                if (line[i] == ';' &&
                    (i == 0 || std::isspace(static_cast<unsigned char>(
                                   line[i - 1])))) {
                    cut = i;
                    break;
                }
            if (cut != std::string::npos) line.erase(cut);
            line = trim(line);
            if (line.empty()) continue;
            if (line.front() == '[') {
                if (line.back() != ']')
                    throw Error("config: bad section header at " + origin + ":" +
                                std::to_string(lineno));
                section = trim(line.substr(1, line.size() - 2));
                cfg.data_[section];
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos || section.empty())
                throw Error("config: expected key=value inside a section at " +
                            origin + ":" + std::to_string(lineno));
            const std::string key = trim(line.substr(0, eq));
            const std::string value = trim(line.substr(eq + 1));
            if (key.empty())
                throw Error("config: empty key at " + origin + ":" +
                            std::to_string(lineno));
            cfg.data_[section][key] = value;
        }
        return cfg;
    }

    bool has(const std::string& section, const std::string& key) const {
        auto s = data_.find(section);
        return s != data_.end() && s->second.count(key) > 0;
    }

    std::string get(const std::string& section, const std::string& key) const {
        auto s = data_.find(section);
        if (s == data_.end() || !s->second.count(key))
            throw Error("config: missing [" + section + "] " + key);
        return s->second.at(key);
    }

    std::string get(const std::string& section, const std::string& key,
                    const std::string& fallback) const {
        return has(section, key) ? get(section, key) : fallback;
    }

    double get_double(const std::string& section, const std::string& key) const {
        return to_double(get(section, key), section, key);
    }
    double get_double(const std::string& section, const std::string& key,
                      double fallback) const {
        return has(section, key) ? get_double(section, key) : fallback;
    }

    long get_int(const std::string& section, const std::string& key) const {
        const std::string v = get(section, key);
        size_t pos = 0;
        long out = 0;
        try {
            out = std::stol(v, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos != v.size())
            throw Error("config: [" + section + "] " + key +
                        " is not an integer: " + v);
        return out;
    }
    long get_int(const std::string& section, const std::string& key,
                 long fallback) const {
        return has(section, key) ? get_int(section, key) : fallback;
    }

    bool get_bool(const std::string& section, const std::string& key,
                  bool fallback) const {
        if (!has(section, key)) return fallback;
        const std::string v = get(section, key);
        if (v == "true" || v == "yes" || v == "1") return true;
        if (v == "false" || v == "no" || v == "0") return false;
        throw Error("config: [" + section + "] " + key + " is not a boolean: " + v);
    }

    std::vector<double> get_list(const std::string& section,
                                 const std::string& key) const {
        std::vector<double> out;
        std::string item;
        std::istringstream in(get(section, key));
        while (std::getline(in, item, ',')) {
            item = trim(item);
            if (!item.empty()) out.push_back(to_double(item, section, key));
        }
        return out;
    }
    std::vector<double> get_list(const std::string& section,
                                 const std::string& key,
                                 std::vector<double> fallback) const {
        return has(section, key) ? get_list(section, key) : std::move(fallback);
    }

    void set(const std::string& section, const std::string& key,
             const std::string& value) {
        data_[section][key] = value;
    }

    const std::map<std::string, Section>& sections() const { return data_; }

    /// Canonical text form (sorted sections/keys); used for echoing the
    /// effective config and for hashing output headers.
    std::string serialize() const {
        std::ostringstream out;
        for (const auto& [name, sec] : data_) {
            out << '[' << name << "]\n";
            for (const auto& [k, v] : sec) out << k << " = " << v << '\n';
            out << '\n';
        }
        return out.str();
    }

    bool operator==(const RunConfig& o) const { return data_ == o.data_; }

private:
    static std::string trim(std::string s) {
        auto notspace = [](unsigned char c) { return !std::isspace(c); };
        s.erase(s.begin(), std::find_if(s.begin(), s.end(), notspace));
        s.erase(std::find_if(s.rbegin(), s.rend(), notspace).base(), s.end());
        return s;
    }
    static double to_double(const std::string& v, const std::string& section,
                            const std::string& key) {
        size_t pos = 0;
        double out = 0.0;
        try {
            out = std::stod(v, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos != v.size())
            throw Error("config: [" + section + "] " + key +
                        " is not a number: " + v);
        return out;
    }

    std::map<std::string, Section> data_;
};

/// FNV-1a 64-bit hash; stamps output file headers so artifacts can be traced
/// back to the exact effective configuration.
inline std::string fnv1a_hex(const std::string& s) {
    unsigned long long h = 14695981039346656037ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", h);
    return std::string(buf);
}

}  // namespace qoc

#endif
