#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <string>
#include <vector>

namespace taillab {

// Plain-text key-value configuration: one `key = value` per line, `#` starts
// a comment, blank lines ignored.
class Config {
public:
    static Config parse(std::istream& in);
    static Config parse_file(const std::string& path);

    bool has(const std::string& key) const { return kv_.count(key) > 0; }
    void set(const std::string& key, const std::string& value) { kv_[key] = value; }

    std::string get_str(const std::string& key) const;
    std::string get_str(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key) const;
    int get_int(const std::string& key, int fallback) const;
    std::uint64_t get_u64(const std::string& key) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;

    std::vector<std::string> keys() const;

private:
    std::map<std::string, std::string> kv_;
};

}  // namespace taillab
