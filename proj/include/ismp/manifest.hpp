#pragma once

#include "ismp/config.hpp"
#include "ismp/localtime.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ismp {

inline constexpr const char* kVersionString = "ismp 0.1.0";

struct RunManifest {
    std::uint64_t config_hash = 0;
    std::string version = kVersionString;
    std::uint64_t seed = 0;
    double elapsed_seconds = 0.0;
    std::vector<std::string> produced_files;
    bool has_calibration = false;
    SignScale calibration;

    void write_json(const std::string& path) const;
};

void write_calibration_json(const SignScale& s, const std::string& path);

} // namespace ismp
