#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>

#include "sfconv/conv.hpp"

using namespace sfconv;

namespace {

DenseTensor random_tensor(std::vector<int> shape, std::uint64_t seed) {
    DenseTensor t(std::move(shape));
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> d;
    for (auto& v : t.data) v = d(rng);
    return t;
}

// Reference correlation written with no shared code: plain quad loop over the
// padded input.
DenseTensor naive_conv(const DenseTensor& x, const DenseTensor& f, int stride, int pad) {
    int B = x.dim(0), C = x.dim(1), H = x.dim(2), W = x.dim(3);
    int OC = f.dim(0), R = f.dim(2);
    int HO = (H + 2 * pad - R) / stride + 1;
    int WO = (W + 2 * pad - R) / stride + 1;
    DenseTensor y({B, OC, HO, WO});
    for (int b = 0; b < B; ++b)
        for (int oc = 0; oc < OC; ++oc)
            for (int i = 0; i < HO; ++i)
                for (int j = 0; j < WO; ++j) {
                    double acc = 0;
                    for (int c = 0; c < C; ++c)
                        for (int a = 0; a < R; ++a)
                            for (int t = 0; t < R; ++t) {
                                int r = i * stride + a - pad, s = j * stride + t - pad;
                                if (r < 0 || r >= H || s < 0 || s >= W) continue;
                                acc += x.at4(b, c, r, s) * f.at4(oc, c, a, t);
                            }
                    y.at4(b, oc, i, j) = acc;
                }
    return y;
}

double max_rel_err(const DenseTensor& got, const DenseTensor& want) {
    REQUIRE(got.shape == want.shape);
    double worst = 0, scale = 0;
    for (std::size_t i = 0; i < want.data.size(); ++i) {
        worst = std::max(worst, std::abs(got.data[i] - want.data[i]));
        scale = std::max(scale, std::abs(want.data[i]));
    }
    return scale > 0 ? worst / scale : worst;
}

bool bitwise_equal(const DenseTensor& a, const DenseTensor& b) {
    return a.shape == b.shape &&
           std::memcmp(a.data.data(), b.data.data(), a.data.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("direct_conv2d agrees with the quad-loop reference") {
    DenseTensor x = random_tensor({2, 3, 11, 13}, 100);
    for (int R : {1, 3, 5}) {
        DenseTensor f = random_tensor({4, 3, R, R}, 200 + std::uint64_t(R));
        for (int stride : {1, 2})
            for (int pad : {0, 1, 2}) {
                if (11 + 2 * pad < R) continue;
                INFO("R=" << R << " stride=" << stride << " pad=" << pad);
                CHECK(max_rel_err(direct_conv2d(x, f, stride, pad),
                                  naive_conv(x, f, stride, pad)) < 1e-13);
            }
    }
}

TEST_CASE("fast_conv2d matches direct for every catalog algorithm") {
    // odd spatial size so the last tile row/column is always partial
    DenseTensor x = random_tensor({2, 3, 23, 19}, 1);
    for (const auto& name : catalog_names()) {
        const AlgorithmSpec& s = catalog_algorithm(name);
        if (s.family == AlgoFamily::Direct) continue;
        DenseTensor f = random_tensor({4, 3, s.R, s.R}, 2);
        int pad = s.R / 2;
        DenseTensor want = direct_conv2d(x, f, 1, pad);
        INFO(name);
        CHECK(max_rel_err(fast_conv2d(x, f, s, pad), want) < 1e-10);
    }
}

TEST_CASE("tile seams are invisible at every size") {
    // sweep widths around the tile edge so tiles end flush, one short, one over
    const AlgorithmSpec& s = catalog_algorithm("sfc6-6x6-3x3");
    DenseTensor f = random_tensor({1, 1, 3, 3}, 31);
    for (int w = 6; w <= 14; ++w) {
        DenseTensor x = random_tensor({1, 1, w, w}, 40 + std::uint64_t(w));
        INFO("size " << w);
        CHECK(max_rel_err(fast_conv2d(x, f, s, 1), direct_conv2d(x, f, 1, 1)) < 1e-12);
    }
}

TEST_CASE("channel accumulation happens in the transform domain") {
    // running C channels together must equal the sum of C single-channel runs
    const AlgorithmSpec& s = catalog_algorithm("sfc6-6x6-3x3");
    DenseTensor x = random_tensor({1, 4, 12, 12}, 5);
    DenseTensor f = random_tensor({2, 4, 3, 3}, 6);
    DenseTensor whole = fast_conv2d(x, f, s, 1);

    DenseTensor sum({1, 2, 12, 12});
    for (int c = 0; c < 4; ++c) {
        DenseTensor xc({1, 1, 12, 12}), fc({2, 1, 3, 3});
        for (int h = 0; h < 12; ++h)
            for (int w = 0; w < 12; ++w) xc.at4(0, 0, h, w) = x.at4(0, c, h, w);
        for (int oc = 0; oc < 2; ++oc)
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b) fc.at4(oc, 0, a, b) = f.at4(oc, c, a, b);
        DenseTensor part = fast_conv2d(xc, fc, s, 1);
        for (std::size_t i = 0; i < sum.data.size(); ++i) sum.data[i] += part.data[i];
    }
    CHECK(max_rel_err(whole, sum) < 1e-12);
}

TEST_CASE("counters report the full product schedule") {
    DenseTensor x = random_tensor({2, 3, 18, 18}, 7);
    for (const char* name : {"sfc6-6x6-3x3", "sfc4-4x4-3x3", "wino-4x4-3x3"}) {
        const AlgorithmSpec& s = catalog_algorithm(name);
        DenseTensor f = random_tensor({5, 3, 3, 3}, 8);
        ConvCounters ctr;
        FastConvOptions o;
        o.counters = &ctr;
        fast_conv2d(x, f, s, 1, o);
        int per_dim = (18 + s.M - 1) / s.M;
        INFO(name);
        CHECK(ctr.tiles == 2 * per_dim * per_dim);
        CHECK(ctr.multiplications == s.mults_full() * ctr.tiles * 3 * 5);
    }
}

TEST_CASE("reduced schedule skips the paired products and changes nothing else") {
    DenseTensor x = random_tensor({1, 2, 20, 20}, 9);
    for (const auto& name : catalog_names()) {
        const AlgorithmSpec& s = catalog_algorithm(name);
        if (s.family != AlgoFamily::Sfc) continue;
        DenseTensor f = random_tensor({3, 2, s.R, s.R}, 10);

        ConvCounters full_ctr, red_ctr;
        FastConvOptions full_opts, red_opts;
        full_opts.counters = &full_ctr;
        red_opts.counters = &red_ctr;
        red_opts.reduced_products = true;

        DenseTensor yf = fast_conv2d(x, f, s, 1, full_opts);
        DenseTensor yr = fast_conv2d(x, f, s, 1, red_opts);

        INFO(name);
        CHECK(max_rel_err(yr, yf) < 1e-12);
        CHECK(full_ctr.multiplications == s.mults_full() * full_ctr.tiles * 2 * 3);
        CHECK(red_ctr.multiplications == s.mults_reduced() * red_ctr.tiles * 2 * 3);
        CHECK(red_ctr.multiplications < full_ctr.multiplications);
    }
}

TEST_CASE("reduced schedule on winograd is a no-op") {
    const AlgorithmSpec& s = catalog_algorithm("wino-2x2-3x3");
    DenseTensor x = random_tensor({1, 1, 8, 8}, 11);
    DenseTensor f = random_tensor({1, 1, 3, 3}, 12);
    FastConvOptions o;
    ConvCounters ctr;
    o.reduced_products = true;
    o.counters = &ctr;
    DenseTensor y = fast_conv2d(x, f, s, 1, o);
    CHECK(ctr.multiplications == s.mults_full() * ctr.tiles);
    CHECK(max_rel_err(y, direct_conv2d(x, f, 1, 1)) < 1e-12);
}

TEST_CASE("thread count never changes a single bit of output") {
    DenseTensor x = random_tensor({3, 5, 27, 31}, 13);
    DenseTensor f = random_tensor({7, 5, 3, 3}, 14);
    for (const char* name : {"sfc6-6x6-3x3", "wino-4x4-3x3"}) {
        const AlgorithmSpec& s = catalog_algorithm(name);
        for (bool reduced : {false, true}) {
            FastConvOptions one, many;
            one.threads = 1;
            one.reduced_products = reduced;
            many.threads = 5;
            many.reduced_products = reduced;
            INFO(name << " reduced=" << reduced);
            CHECK(bitwise_equal(fast_conv2d(x, f, s, 1, one), fast_conv2d(x, f, s, 1, many)));
        }
    }
}

TEST_CASE("transform_filters produces G f G^T per channel pair") {
    const AlgorithmSpec& s = catalog_algorithm("sfc4-4x4-3x3");
    DenseTensor f = random_tensor({2, 3, 3, 3}, 15);
    DenseTensor u = transform_filters(f, s);
    REQUIRE(u.shape == std::vector<int>({2, 3, s.K(), s.K()}));
    // check one (oc, ic) pair against a direct evaluation
    int oc = 1, ic = 2;
    for (int r = 0; r < s.K(); ++r)
        for (int c = 0; c < s.K(); ++c) {
            double want = 0;
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b)
                    want += s.G.at(r, a).to_double() * f.at4(oc, ic, a, b) * s.G.at(c, b).to_double();
            CHECK(u.at4(oc, ic, r, c) == doctest::Approx(want).epsilon(1e-12));
        }
}

TEST_CASE("kernel larger than 3 goes through the same engine") {
    DenseTensor x = random_tensor({1, 2, 16, 16}, 16);
    for (const char* name : {"sfc6-6x6-5x5", "wino-2x2-5x5", "sfc6-4x4-7x7", "wino-2x2-7x7"}) {
        const AlgorithmSpec& s = catalog_algorithm(name);
        DenseTensor f = random_tensor({2, 2, s.R, s.R}, 17);
        int pad = s.R / 2;
        INFO(name);
        CHECK(max_rel_err(fast_conv2d(x, f, s, pad), direct_conv2d(x, f, 1, pad)) < 1e-10);
    }
}
