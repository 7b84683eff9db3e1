#include "ismp/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ismp {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

} // namespace

Config Config::parse_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw config_error("cannot open config file: " + path);
    std::ostringstream os;
    os << f.rdbuf();
    return parse_string(os.str(), path);
}

Config Config::parse_string(const std::string& text, const std::string& origin) {
    Config c;
    c.origin_ = origin;
    std::istringstream is(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw config_error(origin + ":" + std::to_string(lineno) +
                                   ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            c.sections_[section];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error(origin + ":" + std::to_string(lineno) +
                               ": expected key = value, got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty())
            throw config_error(origin + ":" + std::to_string(lineno) + ": empty key");
        c.sections_[section][key] = val;
    }
    return c;
}

bool Config::has(const std::string& section, const std::string& key) const {
    auto s = sections_.find(section);
    return s != sections_.end() && s->second.count(key) > 0;
}

std::string Config::get_str(const std::string& section, const std::string& key) const {
    auto s = sections_.find(section);
    if (s == sections_.end() || !s->second.count(key))
        throw config_error("missing config key [" + section + "] " + key);
    return s->second.at(key);
}

std::string Config::get_str(const std::string& section, const std::string& key,
                            const std::string& fallback) const {
    return has(section, key) ? get_str(section, key) : fallback;
}

double Config::get_double(const std::string& section, const std::string& key) const {
    const std::string v = get_str(section, key);
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw config_error("config key [" + section + "] " + key + " is not a number: '" + v +
                           "'");
    }
}

double Config::get_double(const std::string& section, const std::string& key,
                          double fallback) const {
    return has(section, key) ? get_double(section, key) : fallback;
}

long long Config::get_int(const std::string& section, const std::string& key) const {
    const std::string v = get_str(section, key);
    try {
        std::size_t pos = 0;
        const long long d = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw config_error("config key [" + section + "] " + key + " is not an integer: '" + v +
                           "'");
    }
}

long long Config::get_int(const std::string& section, const std::string& key,
                          long long fallback) const {
    return has(section, key) ? get_int(section, key) : fallback;
}

std::vector<double> Config::get_doubles(const std::string& section, const std::string& key) const {
    const std::string v = get_str(section, key);
    std::vector<double> out;
    std::istringstream is(v);
    std::string tok;
    while (std::getline(is, tok, ',')) {
        tok = trim(tok);
        if (tok.empty()) continue;
        try {
            out.push_back(std::stod(tok));
        } catch (const std::exception&) {
            throw config_error("config key [" + section + "] " + key +
                               " has a non-numeric entry: '" + tok + "'");
        }
    }
    if (out.empty())
        throw config_error("config key [" + section + "] " + key + " is empty");
    return out;
}

std::vector<int> Config::get_ints(const std::string& section, const std::string& key,
                                  const std::vector<int>& fallback) const {
    if (!has(section, key)) return fallback;
    std::vector<int> out;
    for (double d : get_doubles(section, key)) out.push_back(static_cast<int>(d));
    return out;
}

void Config::set(const std::string& section, const std::string& key, const std::string& value) {
    sections_[section][key] = value;
}

std::uint64_t Config::hash() const {
    // std::map iterates in sorted order already, so the digest does not
    // depend on the order keys appeared in the file.
    std::uint64_t h = 0xcbf29ce484222325ull;
    auto feed = [&h](const std::string& s) {
        for (unsigned char ch : s) {
            h ^= ch;
            h *= 0x100000001b3ull;
        }
    };
    for (const auto& [sec, kv] : sections_)
        for (const auto& [k, v] : kv) {
            feed(sec);
            feed(".");
            feed(k);
            feed("=");
            feed(v);
            feed("\n");
        }
    return h;
}

} // namespace ismp
