#include "pacstl/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace pacstl {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

bool valid_key(const std::string& key) {
    if (key.empty()) return false;
    for (char c : key)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '.' && c != '-')
            return false;
    return true;
}

}  // namespace

Config Config::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_string(ss.str());
}

Config Config::from_string(const std::string& text) {
    Config cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                        " has no '=': " + line);
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!valid_key(key))
            throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                        " has a malformed key: '" + key + "'");
        if (cfg.values_.count(key))
            throw std::invalid_argument("config: duplicate key '" + key + "' at line " +
                                        std::to_string(lineno));
        cfg.values_[key] = value;
    }
    return cfg;
}

void Config::set(const std::string& key, const std::string& value) {
    if (!valid_key(key)) throw std::invalid_argument("config: malformed key '" + key + "'");
    values_[key] = value;
}

bool Config::has(const std::string& key) const { return values_.count(key) > 0; }

std::string Config::raw(const std::string& key, const std::string& fallback, bool* from_input) {
    const auto it = values_.find(key);
    const bool present = it != values_.end();
    if (from_input) *from_input = present;
    if (present) used_.insert(key);
    const std::string value = present ? it->second : fallback;
    resolved_[key] = {value, present};
    return value;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) {
    return raw(key, fallback, nullptr);
}

double Config::get_double(const std::string& key, double fallback) {
    bool from_input = false;
    const std::string v = raw(key, std::to_string(fallback), &from_input);
    if (!from_input) return fallback;
    double out = 0.0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size())
        throw std::invalid_argument("config: key '" + key + "' is not a number: '" + v + "'");
    return out;
}

int Config::get_int(const std::string& key, int fallback) {
    bool from_input = false;
    const std::string v = raw(key, std::to_string(fallback), &from_input);
    if (!from_input) return fallback;
    int out = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size())
        throw std::invalid_argument("config: key '" + key + "' is not an integer: '" + v + "'");
    return out;
}

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t fallback) {
    bool from_input = false;
    const std::string v = raw(key, std::to_string(fallback), &from_input);
    if (!from_input) return fallback;
    std::uint64_t out = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size())
        throw std::invalid_argument("config: key '" + key + "' is not an unsigned integer: '" +
                                    v + "'");
    return out;
}

bool Config::get_bool(const std::string& key, bool fallback) {
    bool from_input = false;
    const std::string v = raw(key, fallback ? "true" : "false", &from_input);
    if (!from_input) return fallback;
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw std::invalid_argument("config: key '" + key + "' is not a boolean: '" + v + "'");
}

std::vector<std::string> Config::unused() const {
    std::vector<std::string> out;
    for (const auto& [key, value] : values_)
        if (!used_.count(key)) out.push_back(key);
    return out;
}

void Config::require_all_used() const {
    const auto stray = unused();
    if (stray.empty()) return;
    std::string msg = "config: unknown key(s):";
    for (const auto& key : stray) msg += " " + key;
    throw std::invalid_argument(msg);
}

void Config::write_snapshot(std::ostream& os) const {
    os << "# resolved configuration (defaults marked)\n";
    for (const auto& [key, entry] : resolved_) {
        os << key << " = " << entry.first;
        if (!entry.second) os << "  # default";
        os << '\n';
    }
}

}  // namespace pacstl
