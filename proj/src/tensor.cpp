#include "sfconv/tensor.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace sfconv {

namespace {

constexpr char kMagic[8] = {'S', 'F', 'C', 'T', '0', '0', '0', '1'};

}  // namespace

void save_sfct(const std::string& path, const DenseTensor& t) {
    nlohmann::json header;
    header["dtype"] = "f64";
    header["shape"] = t.shape;
    header["layout"] = "row-major-nchw";
    std::string hs = header.dump();

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for write: " + path);
    out.write(kMagic, sizeof(kMagic));
    std::uint32_t hlen = std::uint32_t(hs.size());
    unsigned char lenb[4] = {static_cast<unsigned char>(hlen & 0xff),
                             static_cast<unsigned char>((hlen >> 8) & 0xff),
                             static_cast<unsigned char>((hlen >> 16) & 0xff),
                             static_cast<unsigned char>((hlen >> 24) & 0xff)};
    out.write(reinterpret_cast<const char*>(lenb), 4);
    out.write(hs.data(), std::streamsize(hs.size()));
    // Doubles are written as-is; this code only targets little-endian hosts.
    out.write(reinterpret_cast<const char*>(t.data.data()),
              std::streamsize(t.data.size() * sizeof(double)));
    if (!out) throw std::runtime_error("short write: " + path);
}

DenseTensor load_sfct(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw std::runtime_error("not an SFCT file: " + path);
    unsigned char lenb[4];
    in.read(reinterpret_cast<char*>(lenb), 4);
    if (!in) throw std::runtime_error("truncated SFCT header: " + path);
    std::uint32_t hlen = std::uint32_t(lenb[0]) | (std::uint32_t(lenb[1]) << 8) |
                         (std::uint32_t(lenb[2]) << 16) | (std::uint32_t(lenb[3]) << 24);
    std::string hs(hlen, '\0');
    in.read(hs.data(), std::streamsize(hlen));
    if (!in) throw std::runtime_error("truncated SFCT header: " + path);
    nlohmann::json header = nlohmann::json::parse(hs);
    if (header.at("dtype").get<std::string>() != "f64")
        throw std::runtime_error("unsupported SFCT dtype: " + header.at("dtype").get<std::string>());
    if (header.at("layout").get<std::string>() != "row-major-nchw")
        throw std::runtime_error("unsupported SFCT layout");
    DenseTensor t(header.at("shape").get<std::vector<int>>());
    in.read(reinterpret_cast<char*>(t.data.data()), std::streamsize(t.data.size() * sizeof(double)));
    if (!in) throw std::runtime_error("truncated SFCT payload: " + path);
    return t;
}

std::vector<LayerConfig> load_layer_configs(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open layer config: " + path);
    nlohmann::json doc = nlohmann::json::parse(in);
    if (!doc.is_array()) throw std::runtime_error("layer config must be a JSON array");
    std::vector<LayerConfig> layers;
    int idx = 0;
    for (const auto& item : doc) {
        LayerConfig lc;
        lc.name = item.value("name", "layer" + std::to_string(idx));
        lc.in_channels = item.at("in_channels").get<int>();
        lc.out_channels = item.at("out_channels").get<int>();
        lc.height = item.at("height").get<int>();
        lc.width = item.at("width").get<int>();
        lc.kernel = item.at("kernel").get<int>();
        lc.stride = item.value("stride", 1);
        lc.padding = item.value("padding", 0);
        if (lc.in_channels <= 0 || lc.out_channels <= 0 || lc.height <= 0 || lc.width <= 0 ||
            lc.kernel <= 0 || lc.stride <= 0 || lc.padding < 0)
            throw std::runtime_error("invalid layer config entry: " + lc.name);
        layers.push_back(lc);
        ++idx;
    }
    return layers;
}

std::string layer_configs_to_json(const std::vector<LayerConfig>& layers) {
    nlohmann::json doc = nlohmann::json::array();
    for (const auto& lc : layers) {
        doc.push_back({{"name", lc.name},
                       {"in_channels", lc.in_channels},
                       {"out_channels", lc.out_channels},
                       {"height", lc.height},
                       {"width", lc.width},
                       {"kernel", lc.kernel},
                       {"stride", lc.stride},
                       {"padding", lc.padding}});
    }
    return doc.dump(2);
}

}  // namespace sfconv
