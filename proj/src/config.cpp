#include "nsrl/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "nsrl/csv.hpp"
#include "nsrl/errors.hpp"

namespace nsrl {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

} // namespace

KeyValueConfig KeyValueConfig::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_text(ss.str(), path);
}

KeyValueConfig KeyValueConfig::parse_text(const std::string& text, const std::string& origin) {
    KeyValueConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: missing '=' at " + origin + ":" + std::to_string(lineno));
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError("config: empty key at " + origin + ":" + std::to_string(lineno));
        cfg.values_[key] = value;
    }
    return cfg;
}

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) {
    auto it = values_.find(key);
    const std::string v = it == values_.end() ? fallback : it->second;
    resolved_[key] = v;
    return v;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) {
    auto it = values_.find(key);
    if (it == values_.end()) {
        resolved_[key] = format_full(fallback);
        return fallback;
    }
    try {
        std::size_t pos = 0;
        const double v = std::stod(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument("trailing");
        resolved_[key] = it->second;
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: key '" + key + "' is not a number: " + it->second);
    }
}

long KeyValueConfig::get_int(const std::string& key, long fallback) {
    auto it = values_.find(key);
    if (it == values_.end()) {
        resolved_[key] = std::to_string(fallback);
        return fallback;
    }
    try {
        std::size_t pos = 0;
        const long v = std::stol(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument("trailing");
        resolved_[key] = it->second;
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: key '" + key + "' is not an integer: " + it->second);
    }
}

std::uint64_t KeyValueConfig::get_u64(const std::string& key, std::uint64_t fallback) {
    auto it = values_.find(key);
    if (it == values_.end()) {
        resolved_[key] = std::to_string(fallback);
        return fallback;
    }
    try {
        std::size_t pos = 0;
        const unsigned long long v = std::stoull(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument("trailing");
        resolved_[key] = it->second;
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: key '" + key + "' is not an unsigned integer: " + it->second);
    }
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) {
    auto it = values_.find(key);
    if (it == values_.end()) {
        resolved_[key] = fallback ? "true" : "false";
        return fallback;
    }
    std::string v = it->second;
    std::transform(v.begin(), v.end(), v.begin(), ::tolower);
    resolved_[key] = v;
    if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "off" || v == "no") return false;
    throw ConfigError("config: key '" + key + "' is not a boolean: " + it->second);
}

std::vector<double> KeyValueConfig::get_list(const std::string& key,
                                             const std::vector<double>& fallback) {
    auto it = values_.find(key);
    if (it == values_.end()) {
        std::string rendered;
        for (std::size_t i = 0; i < fallback.size(); ++i) {
            if (i) rendered += ",";
            rendered += format_full(fallback[i]);
        }
        resolved_[key] = rendered;
        return fallback;
    }
    std::vector<double> out;
    std::istringstream ss(it->second);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw ConfigError("config: key '" + key + "' has a non-numeric entry: " + item);
        }
    }
    resolved_[key] = it->second;
    return out;
}

void KeyValueConfig::set(const std::string& key, const std::string& value) {
    values_[key] = value;
}

std::string KeyValueConfig::resolved_text() const {
    std::string out;
    for (const auto& [k, v] : resolved_) out += k + " = " + v + "\n";
    return out;
}

std::vector<std::string> KeyValueConfig::unused_keys() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : values_)
        if (resolved_.find(k) == resolved_.end()) out.push_back(k);
    return out;
}

} // namespace nsrl
