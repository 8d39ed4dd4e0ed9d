#pragma once

// Flat key-value configuration with dotted keys.
//
// File format: one `key = value` pair per line, `#` starts a comment.
// CLI flags are merged on top of file values; typed getters fall back to
// the built-in default when a key is absent.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace vlcsim {

class Config {
public:
    Config() = default;

    static Config from_file(const std::string& path);

    void set(const std::string& key, const std::string& value) { values_[key] = value; }
    bool has(const std::string& key) const { return values_.count(key) != 0; }

    double get_double(const std::string& key, double fallback) const;
    std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;

    // "a,b,c" -> vector of doubles
    std::vector<double> get_double_list(const std::string& key,
                                        const std::vector<double>& fallback) const;

    const std::map<std::string, std::string>& values() const { return values_; }

private:
    std::map<std::string, std::string> values_;
};

} // namespace vlcsim
