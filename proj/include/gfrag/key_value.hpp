#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace gfrag {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Flat `key = value` document. '#' starts a comment; keys are unique.
class KeyValueDocument {
public:
    static KeyValueDocument parse(const std::string& text, const std::string& source = "<string>");
    static KeyValueDocument load(const std::string& path);

    bool has(const std::string& key) const;
    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    std::int64_t get_int(const std::string& key) const;
    std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<double> get_doubles(const std::string& key, std::vector<double> fallback) const;

    void set(const std::string& key, const std::string& value);
    // Later documents win on conflicts.
    void merge(const KeyValueDocument& other);

    const std::map<std::string, std::string>& entries() const noexcept { return entries_; }
    // Keys that were present but never read; useful for catching typos.
    std::vector<std::string> unread_keys() const;
    std::string source() const { return source_; }
    // "file:line (key)" for diagnostics.
    std::string location(const std::string& key) const;

private:
    std::map<std::string, std::string> entries_;
    std::map<std::string, int> lines_;
    mutable std::set<std::string> read_;
    std::string source_;
};

}  // namespace gfrag
