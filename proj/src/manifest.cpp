#include "sfconv/manifest.hpp"

#include "json.hpp"

namespace sfconv {

std::string RunManifest::to_json() const {
    nlohmann::json j;
    j["command"] = command;
    j["config_path"] = config_path;
    j["seed"] = seed;
    j["output_dir"] = output_dir;
    j["catalog_hash"] = catalog_hash;
    return j.dump(2);
}

}  // namespace sfconv
