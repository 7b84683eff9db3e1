#include "ismp/manifest.hpp"

#include <fstream>
#include <json.hpp>
#include <stdexcept>

namespace ismp {

void RunManifest::write_json(const std::string& path) const {
    nlohmann::json j;
    j["config_hash"] = config_hash;
    j["version"] = version;
    j["seed"] = seed;
    j["elapsed_seconds"] = elapsed_seconds;
    j["produced_files"] = produced_files;
    if (has_calibration) {
        j["calibration"] = {{"sigma_sign", calibration.sigma_sign},
                            {"kappa_sign", calibration.kappa_sign},
                            {"mismatch", calibration.mismatch}};
    }
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write manifest: " + path);
    f << j.dump(2) << "\n";
}

void write_calibration_json(const SignScale& s, const std::string& path) {
    nlohmann::json j = {{"sigma_sign", s.sigma_sign},
                        {"kappa_sign", s.kappa_sign},
                        {"mismatch", s.mismatch},
                        {"runner_up_ratio", s.runner_up_ratio}};
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write calibration report: " + path);
    f << j.dump(2) << "\n";
}

} // namespace ismp
