#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace sfconv {

// Row-major NCHW tensor of doubles. Small and deliberately boring; all layout
// knowledge lives here so the engine can stay index-free.
struct DenseTensor {
    std::vector<int> shape;
    std::vector<double> data;

    DenseTensor() = default;
    explicit DenseTensor(std::vector<int> s) : shape(std::move(s)) {
        std::size_t n = 1;
        for (int d : shape) n *= std::size_t(d);
        data.assign(n, 0.0);
    }

    int dim(int i) const { return shape[std::size_t(i)]; }
    std::size_t size() const { return data.size(); }

    double& at4(int n, int c, int h, int w) {
        return data[((std::size_t(n) * shape[1] + c) * shape[2] + h) * shape[3] + w];
    }
    double at4(int n, int c, int h, int w) const {
        return data[((std::size_t(n) * shape[1] + c) * shape[2] + h) * shape[3] + w];
    }
};

// Container format: magic "SFCT0001", little-endian u32 header length, JSON
// header {dtype, shape, layout}, then the raw little-endian payload.
void save_sfct(const std::string& path, const DenseTensor& t);
DenseTensor load_sfct(const std::string& path);

struct LayerConfig {
    std::string name;
    int in_channels = 1;
    int out_channels = 1;
    int height = 0;
    int width = 0;
    int kernel = 3;
    int stride = 1;
    int padding = 0;
};

std::vector<LayerConfig> load_layer_configs(const std::string& path);
std::string layer_configs_to_json(const std::vector<LayerConfig>& layers);

}  // namespace sfconv
