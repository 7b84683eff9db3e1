#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace ismp {

// Flat key-value configuration with [section] headers and '#' comments.
class Config {
public:
    static Config parse_file(const std::string& path);
    static Config parse_string(const std::string& text, const std::string& origin = "<string>");

    bool has(const std::string& section, const std::string& key) const;

    std::string get_str(const std::string& section, const std::string& key) const;
    std::string get_str(const std::string& section, const std::string& key,
                        const std::string& fallback) const;
    double get_double(const std::string& section, const std::string& key) const;
    double get_double(const std::string& section, const std::string& key, double fallback) const;
    long long get_int(const std::string& section, const std::string& key) const;
    long long get_int(const std::string& section, const std::string& key,
                      long long fallback) const;
    std::vector<double> get_doubles(const std::string& section, const std::string& key) const;
    std::vector<int> get_ints(const std::string& section, const std::string& key,
                              const std::vector<int>& fallback) const;

    void set(const std::string& section, const std::string& key, const std::string& value);

    // FNV-1a over the sorted canonical "section.key=value" list; stable under
    // key reordering in the file.
    std::uint64_t hash() const;

    const std::map<std::string, std::map<std::string, std::string>>& sections() const {
        return sections_;
    }

private:
    std::map<std::string, std::map<std::string, std::string>> sections_;
    std::string origin_;
};

struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace ismp
