#pragma once
// Provenance block embedded in every report the command-line tool writes, so a
// result file can always be traced back to the exact invocation and catalog
// revision that produced it.

#include <cstdint>
#include <string>

namespace sfconv {

struct RunManifest {
    std::string command;
    std::string config_path;
    std::uint64_t seed = 0;
    std::string output_dir;
    std::uint64_t catalog_hash = 0;

    std::string to_json() const;
};

}  // namespace sfconv
