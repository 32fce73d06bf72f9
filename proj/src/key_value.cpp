#include "gfrag/key_value.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace gfrag {

namespace {

std::string trim(const std::string& s) {
    const auto begin = std::find_if_not(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
    const auto end = std::find_if_not(s.rbegin(), s.rend(), [](unsigned char c) { return std::isspace(c); }).base();
    return begin < end ? std::string(begin, end) : std::string();
}

bool valid_key(const std::string& key) {
    return !key.empty() && std::all_of(key.begin(), key.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '_' || c == '.' || c == '-';
    });
}

}  // namespace

KeyValueDocument KeyValueDocument::parse(const std::string& text, const std::string& source) {
    KeyValueDocument doc;
    doc.source_ = source;
    std::istringstream in(text);
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(source + ":" + std::to_string(number) + ": expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!valid_key(key)) {
            throw ConfigError(source + ":" + std::to_string(number) + ": invalid key '" + key + "'");
        }
        if (value.empty()) {
            throw ConfigError(source + ":" + std::to_string(number) + ": empty value for '" + key + "'");
        }
        if (doc.entries_.count(key)) {
            throw ConfigError(source + ":" + std::to_string(number) + ": duplicate key '" + key +
                              "' (first set on line " + std::to_string(doc.lines_[key]) + ")");
        }
        doc.entries_[key] = value;
        doc.lines_[key] = number;
    }
    return doc;
}

KeyValueDocument KeyValueDocument::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open configuration file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse(buffer.str(), path);
}

std::string KeyValueDocument::location(const std::string& key) const {
    const auto it = lines_.find(key);
    if (it == lines_.end()) return source_ + " (" + key + ")";
    return source_ + ":" + std::to_string(it->second) + " (" + key + ")";
}

bool KeyValueDocument::has(const std::string& key) const { return entries_.count(key) > 0; }

std::string KeyValueDocument::get_string(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) throw ConfigError(source_ + ": missing required key '" + key + "'");
    read_.insert(key);
    return it->second;
}

std::string KeyValueDocument::get_string(const std::string& key, const std::string& fallback) const {
    return has(key) ? get_string(key) : fallback;
}

double KeyValueDocument::get_double(const std::string& key) const {
    const std::string text = get_string(key);
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(text, &used);
    } catch (const std::exception&) {
        throw ConfigError(location(key) + ": expected a number, got '" + text + "'");
    }
    if (used != text.size()) {
        throw ConfigError(location(key) + ": trailing characters in number '" + text + "'");
    }
    return value;
}

double KeyValueDocument::get_double(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

std::int64_t KeyValueDocument::get_int(const std::string& key) const {
    const std::string text = get_string(key);
    std::int64_t value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        // Accept integral values written in floating notation, e.g. 1e5.
        const double d = get_double(key);
        if (d != static_cast<double>(static_cast<std::int64_t>(d))) {
            throw ConfigError(location(key) + ": expected an integer, got '" + text + "'");
        }
        return static_cast<std::int64_t>(d);
    }
    return value;
}

std::int64_t KeyValueDocument::get_int(const std::string& key, std::int64_t fallback) const {
    return has(key) ? get_int(key) : fallback;
}

bool KeyValueDocument::get_bool(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const std::string text = get_string(key);
    if (text == "true" || text == "yes" || text == "1") return true;
    if (text == "false" || text == "no" || text == "0") return false;
    throw ConfigError(location(key) + ": expected true/false, got '" + text + "'");
}

std::vector<double> KeyValueDocument::get_doubles(const std::string& key,
                                                  std::vector<double> fallback) const {
    if (!has(key)) return fallback;
    const std::string text = get_string(key);
    std::vector<double> values;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        try {
            std::size_t used = 0;
            values.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigError(location(key) + ": bad list element '" + item + "'");
        }
    }
    return values;
}

void KeyValueDocument::set(const std::string& key, const std::string& value) {
    if (!valid_key(key)) throw ConfigError("invalid key '" + key + "'");
    entries_[key] = value;
    lines_.erase(key);
}

void KeyValueDocument::merge(const KeyValueDocument& other) {
    for (const auto& [key, value] : other.entries_) {
        entries_[key] = value;
        const auto it = other.lines_.find(key);
        if (it != other.lines_.end()) lines_[key] = it->second;
    }
}

std::vector<std::string> KeyValueDocument::unread_keys() const {
    std::vector<std::string> unread;
    for (const auto& [key, value] : entries_) {
        if (!read_.count(key)) unread.push_back(key);
    }
    return unread;
}

}  // namespace gfrag
