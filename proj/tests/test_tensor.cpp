#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstring>
#include <fstream>
#include <random>
#include <string>

#include "sfconv/tensor.hpp"

using namespace sfconv;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name) : path("/tmp/sfconv_test_" + name) {}
    ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("at4 walks the row-major NCHW layout") {
    DenseTensor t({2, 3, 4, 5});
    CHECK(t.size() == 120);
    double v = 0;
    for (int n = 0; n < 2; ++n)
        for (int c = 0; c < 3; ++c)
            for (int h = 0; h < 4; ++h)
                for (int w = 0; w < 5; ++w) t.at4(n, c, h, w) = v++;
    for (std::size_t i = 0; i < t.size(); ++i) CHECK(t.data[i] == double(i));
    CHECK(t.dim(0) == 2);
    CHECK(t.dim(3) == 5);
}

TEST_CASE("save and load round-trip preserves every bit") {
    TempFile f("roundtrip.sfct");
    DenseTensor t({1, 2, 3, 7});
    std::mt19937_64 rng(3);
    std::normal_distribution<double> d;
    for (auto& v : t.data) v = d(rng);
    t.data[0] = -0.0;
    t.data[1] = 1e-308;  // subnormal-adjacent values must survive too
    save_sfct(f.path, t);

    DenseTensor back = load_sfct(f.path);
    CHECK(back.shape == t.shape);
    REQUIRE(back.data.size() == t.data.size());
    for (std::size_t i = 0; i < t.data.size(); ++i) {
        // bit equality, not approx: the container is a byte-exact format
        CHECK(std::memcmp(&back.data[i], &t.data[i], sizeof(double)) == 0);
    }
}

TEST_CASE("wrong magic is rejected") {
    TempFile f("badmagic.sfct");
    std::ofstream(f.path, std::ios::binary) << "NOTSFCTXjunkjunkjunk";
    CHECK_THROWS_WITH_AS(load_sfct(f.path), doctest::Contains("not an SFCT file"),
                         std::runtime_error);
}

TEST_CASE("truncated payload is rejected") {
    TempFile f("trunc.sfct");
    DenseTensor t({1, 1, 2, 2});
    t.data = {1.0, 2.0, 3.0, 4.0};
    save_sfct(f.path, t);
    // chop the last ten bytes off
    std::ifstream in(f.path, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    in.close();
    std::ofstream(f.path, std::ios::binary).write(bytes.data(), std::streamsize(bytes.size() - 10));
    CHECK_THROWS_WITH_AS(load_sfct(f.path), doctest::Contains("truncated"), std::runtime_error);
}

TEST_CASE("missing file is reported by name") {
    CHECK_THROWS_WITH_AS(load_sfct("/tmp/definitely_not_here.sfct"),
                         doctest::Contains("definitely_not_here"), std::runtime_error);
}

TEST_CASE("layer configs load with defaults applied") {
    TempFile f("layers.json");
    std::ofstream(f.path) << R"([
        {"name": "conv1", "in_channels": 3, "out_channels": 16,
         "height": 56, "width": 56, "kernel": 3, "padding": 1},
        {"in_channels": 16, "out_channels": 32, "height": 28, "width": 28,
         "kernel": 5, "stride": 2, "padding": 2}
    ])";
    auto layers = load_layer_configs(f.path);
    REQUIRE(layers.size() == 2);
    CHECK(layers[0].name == "conv1");
    CHECK(layers[0].stride == 1);  // default
    CHECK(layers[0].padding == 1);
    CHECK(layers[1].name == "layer1");  // synthesized name
    CHECK(layers[1].kernel == 5);
    CHECK(layers[1].stride == 2);
}

TEST_CASE("layer config validation") {
    TempFile f("badlayers.json");
    std::ofstream(f.path) << R"([{"in_channels": 0, "out_channels": 1,
        "height": 8, "width": 8, "kernel": 3}])";
    CHECK_THROWS_WITH_AS(load_layer_configs(f.path), doctest::Contains("invalid layer config"),
                         std::runtime_error);

    std::ofstream(f.path) << R"({"not": "an array"})";
    CHECK_THROWS_AS(load_layer_configs(f.path), std::runtime_error);
}

TEST_CASE("layer configs serialize back to equivalent JSON") {
    LayerConfig a;
    a.name = "stage2";
    a.in_channels = 8;
    a.out_channels = 24;
    a.height = 14;
    a.width = 14;
    a.kernel = 3;
    a.padding = 1;
    TempFile f("rt_layers.json");
    std::ofstream(f.path) << layer_configs_to_json({a});
    auto back = load_layer_configs(f.path);
    REQUIRE(back.size() == 1);
    CHECK(back[0].name == a.name);
    CHECK(back[0].in_channels == a.in_channels);
    CHECK(back[0].out_channels == a.out_channels);
    CHECK(back[0].height == a.height);
    CHECK(back[0].width == a.width);
    CHECK(back[0].kernel == a.kernel);
    CHECK(back[0].stride == 1);
    CHECK(back[0].padding == 1);
}
