#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "sfconv/quant.hpp"

using namespace sfconv;

namespace {

DenseTensor random_tensor(std::vector<int> shape, std::uint64_t seed, double scale = 1.0) {
    DenseTensor t(std::move(shape));
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> d(0.0, scale);
    for (auto& v : t.data) v = d(rng);
    return t;
}

double report_mse(const QuantReport& rep, const DenseTensor& input, const DenseTensor& filters,
                  int padding) {
    DenseTensor ref = direct_conv2d(input, filters, 1, padding);
    double err = 0;
    for (std::size_t i = 0; i < ref.data.size(); ++i) {
        double d = rep.output.data[i] - ref.data[i];
        err += d * d;
    }
    return err / double(ref.data.size());
}

}  // namespace

TEST_CASE("rounding is nearest-even") {
    std::int64_t sat = 0;
    CHECK(quantize_value(2.5, 1.0, 8, &sat) == 2);
    CHECK(quantize_value(3.5, 1.0, 8, &sat) == 4);
    CHECK(quantize_value(-2.5, 1.0, 8, &sat) == -2);
    CHECK(quantize_value(2.4999, 1.0, 8, &sat) == 2);
    CHECK(quantize_value(0.26, 0.1, 8, &sat) == 3);
    CHECK(sat == 0);
}

TEST_CASE("clamping to the signed range counts saturations") {
    std::int64_t sat = 0;
    CHECK(quantize_value(127.4, 1.0, 8, &sat) == 127);
    CHECK(sat == 0);
    CHECK(quantize_value(127.6, 1.0, 8, &sat) == 127);
    CHECK(sat == 1);
    CHECK(quantize_value(-128.4, 1.0, 8, &sat) == -128);
    CHECK(sat == 1);
    CHECK(quantize_value(-130.0, 1.0, 8, &sat) == -128);
    CHECK(sat == 2);
    // 4-bit range is [-8, 7]
    CHECK(quantize_value(9.0, 1.0, 4, &sat) == 7);
    CHECK(quantize_value(-9.0, 1.0, 4, &sat) == -8);
    CHECK(sat == 4);
}

TEST_CASE("minmax scale maps the extreme value onto the top code") {
    std::vector<double> vals{-3.0, 1.0, 2.0};
    CHECK(scale_minmax(vals, 8) == doctest::Approx(3.0 / 127.0));
    CHECK(scale_minmax(vals, 4) == doctest::Approx(3.0 / 7.0));
    // an all-zero group must not produce a zero scale
    std::vector<double> zeros(10, 0.0);
    CHECK(scale_minmax(zeros, 8) == 1e-8);

    std::int64_t sat = 0;
    double s = scale_minmax(vals, 8);
    for (double v : vals) quantize_value(v, s, 8, &sat);
    CHECK(sat == 0);  // by construction minmax never clips its own group
}

TEST_CASE("grid-searched scale never loses to minmax") {
    std::mt19937_64 rng(50);
    std::normal_distribution<double> d;
    auto group_mse = [](const std::vector<double>& vals, double scale, int bits) {
        double err = 0;
        std::int64_t sat = 0;
        for (double v : vals) {
            double rec = double(quantize_value(v, scale, bits, &sat)) * scale;
            err += (v - rec) * (v - rec);
        }
        return err;
    };
    for (int bits : {4, 8})
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<double> vals(200);
            for (auto& v : vals) v = d(rng);
            vals[0] = 12.0;  // a fat outlier the grid can choose to clip
            double mm = scale_minmax(vals, bits);
            double gs = scale_mse_grid(vals, bits);
            CHECK(group_mse(vals, gs, bits) <= group_mse(vals, mm, bits));
        }
}

TEST_CASE("constant input concentrates transform energy at DC") {
    // 14x14 with padding 0 keeps every gathered window fully interior, so the
    // zero-sum rows cancel exactly, not just approximately
    DenseTensor x({1, 1, 14, 14});
    for (auto& v : x.data) v = 1.0;
    const AlgorithmSpec& s = catalog_algorithm("sfc6-6x6-3x3");
    std::vector<double> e = frequency_energy(x, s, 0);
    REQUIRE(e.size() == std::size_t(s.K()) * s.K());
    CHECK(e[0] == doctest::Approx(1296.0));  // (6*6)^2, the DC row sums
    for (std::size_t i = 1; i < e.size(); ++i) CHECK(e[i] == 0.0);
}

TEST_CASE("quantized path tracks the float path at 8 bits") {
    DenseTensor x = random_tensor({1, 3, 14, 14}, 60);
    DenseTensor f = random_tensor({4, 3, 3, 3}, 61);
    const AlgorithmSpec& s = catalog_algorithm("sfc6-6x6-3x3");
    QuantConfig cfg;
    QuantReport rep = quantized_fast_conv2d(x, f, s, 1, cfg);
    CHECK(rep.snr_db > 25.0);
    CHECK(rep.saturations == 0);  // minmax scales cannot clip
    CHECK(rep.mse == doctest::Approx(report_mse(rep, x, f, 1)).epsilon(1e-9));
    CHECK(rep.snr_db ==
          doctest::Approx(10.0 * std::log10(rep.signal_energy / rep.mse)).epsilon(1e-6));

    // accounting: filters once, activations once per gathered tile
    int ho = 14 + 2 - 3 + 1;
    int th = (ho + s.M - 1) / s.M, freqs = s.K() * s.K();
    CHECK(rep.values_quantized == 4 * 3 * freqs + th * th * 3 * freqs);
}

TEST_CASE("more bits, less error") {
    DenseTensor x = random_tensor({1, 2, 12, 12}, 62);
    DenseTensor f = random_tensor({2, 2, 3, 3}, 63);
    const AlgorithmSpec& s = catalog_algorithm("sfc4-4x4-3x3");
    double prev = 1e300;
    for (int bits : {4, 6, 8, 12}) {
        QuantConfig cfg;
        cfg.bits = bits;
        QuantReport rep = quantized_fast_conv2d(x, f, s, 1, cfg);
        INFO(bits << " bits");
        CHECK(rep.mse < prev);
        prev = rep.mse;
    }
}

TEST_CASE("finer scale grouping does not hurt") {
    DenseTensor x = random_tensor({1, 3, 16, 16}, 64);
    DenseTensor f = random_tensor({4, 3, 3, 3}, 65);
    const AlgorithmSpec& s = catalog_algorithm("sfc6-6x6-3x3");

    auto run = [&](ActScaleScope as, FilterScaleScope fs) {
        QuantConfig cfg;
        cfg.act_scope = as;
        cfg.filter_scope = fs;
        return quantized_fast_conv2d(x, f, s, 1, cfg).mse;
    };
    double coarse = run(ActScaleScope::PerTensor, FilterScaleScope::PerChannel);
    double mid = run(ActScaleScope::PerFrequency, FilterScaleScope::PerChannel);
    double fine = run(ActScaleScope::PerFrequency, FilterScaleScope::PerChannelFrequency);
    CHECK(mid <= coarse);
    CHECK(fine <= mid);
}

TEST_CASE("channel-aware filter scales rescue a drowned output channel") {
    DenseTensor x = random_tensor({1, 2, 12, 12}, 66);
    DenseTensor f = random_tensor({2, 2, 3, 3}, 67);
    // blow up channel 0: a scale shared across output channels is then sized
    // for channel 0 and quantizes channel 1 to noise
    for (int ic = 0; ic < 2; ++ic)
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) f.at4(0, ic, a, b) *= 1000.0;
    const AlgorithmSpec& s = catalog_algorithm("sfc4-4x4-3x3");

    auto channel_mse = [&](FilterScaleScope scope, int oc) {
        QuantConfig cfg;
        cfg.filter_scope = scope;
        QuantReport rep = quantized_fast_conv2d(x, f, s, 1, cfg);
        DenseTensor ref = direct_conv2d(x, f, 1, 1);
        double err = 0;
        int count = 0;
        for (int i = 0; i < 12; ++i)
            for (int j = 0; j < 12; ++j) {
                double d = rep.output.at4(0, oc, i, j) - ref.at4(0, oc, i, j);
                err += d * d;
                ++count;
            }
        return err / count;
    };
    double shared = channel_mse(FilterScaleScope::PerFrequency, 1);
    double dedicated = channel_mse(FilterScaleScope::PerChannelFrequency, 1);
    CHECK(dedicated * 10.0 < shared);
}

TEST_CASE("width limits are enforced") {
    DenseTensor x = random_tensor({1, 1, 8, 8}, 68);
    DenseTensor f = random_tensor({1, 1, 3, 3}, 69);
    const AlgorithmSpec& s = catalog_algorithm("sfc4-4x4-3x3");
    QuantConfig cfg;
    cfg.bits = 1;
    CHECK_THROWS_AS(quantized_fast_conv2d(x, f, s, 1, cfg), std::invalid_argument);
    cfg.bits = 17;
    CHECK_THROWS_AS(quantized_fast_conv2d(x, f, s, 1, cfg), std::invalid_argument);
}
