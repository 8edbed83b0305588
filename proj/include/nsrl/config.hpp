#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace nsrl {

/// Flat key-value run configuration. Grammar: one `section.key = value` per
/// line, UTF-8, `#` starts a comment, blank lines ignored.
class KeyValueConfig {
public:
    static KeyValueConfig parse_file(const std::string& path);
    static KeyValueConfig parse_text(const std::string& text, const std::string& origin = "<text>");

    bool has(const std::string& key) const { return values_.count(key) != 0; }

    std::string get_string(const std::string& key, const std::string& fallback);
    double get_double(const std::string& key, double fallback);
    long get_int(const std::string& key, long fallback);
    bool get_bool(const std::string& key, bool fallback);
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback);

    /// Comma-separated list of numbers.
    std::vector<double> get_list(const std::string& key, const std::vector<double>& fallback);

    void set(const std::string& key, const std::string& value);

    /// Every key that was read (with the value actually used, defaults
    /// included), rendered sorted: the provenance record.
    std::string resolved_text() const;

    /// Keys present in the file but never consulted (likely typos).
    std::vector<std::string> unused_keys() const;

private:
    std::map<std::string, std::string> values_;
    mutable std::map<std::string, std::string> resolved_;
};

} // namespace nsrl
