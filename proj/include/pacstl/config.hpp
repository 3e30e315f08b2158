#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace pacstl {

// Flat "key = value" configuration with # comments. Typed getters record the
// resolved value (from the file, an override, or the fallback), so a snapshot
// of what a run actually used can be written next to its outputs. Keys nobody
// asked for are configuration errors, surfaced by require_all_used().
class Config {
public:
    Config() = default;

    static Config from_file(const std::string& path);
    static Config from_string(const std::string& text);

    // Flag overrides; wins over the file.
    void set(const std::string& key, const std::string& value);

    bool has(const std::string& key) const;

    std::string get_string(const std::string& key, const std::string& fallback);
    double get_double(const std::string& key, double fallback);
    int get_int(const std::string& key, int fallback);
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback);
    bool get_bool(const std::string& key, bool fallback);

    // Keys present in the file/overrides that no getter consumed.
    std::vector<std::string> unused() const;

    // Throws std::invalid_argument naming every unused key.
    void require_all_used() const;

    // Sorted "key = value" lines of everything consumed, with provenance
    // comments for values that came from fallbacks.
    void write_snapshot(std::ostream& os) const;

private:
    std::string raw(const std::string& key, const std::string& fallback, bool* from_input);

    std::map<std::string, std::string> values_;
    std::set<std::string> used_;
    std::map<std::string, std::pair<std::string, bool>> resolved_;  // value, from input
};

}  // namespace pacstl
