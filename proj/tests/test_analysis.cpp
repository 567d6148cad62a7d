#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "sfconv/analysis.hpp"

using namespace sfconv;

TEST_CASE("singular values of easy matrices") {
    // diagonal: the singular values are the absolute entries, sorted
    std::vector<double> diag = {3, 0, 0, 0, -7, 0, 0, 0, 0.5};
    auto sv = singular_values(diag, 3, 3);
    REQUIRE(sv.size() == 3);
    CHECK(sv[0] == doctest::Approx(7.0));
    CHECK(sv[1] == doctest::Approx(3.0));
    CHECK(sv[2] == doctest::Approx(0.5));

    // permutation: all ones
    auto swap = singular_values({0, 1, 1, 0}, 2, 2);
    CHECK(swap[0] == doctest::Approx(1.0));
    CHECK(swap[1] == doctest::Approx(1.0));

    // rank deficient: smallest value collapses to zero
    auto rank1 = singular_values({1, 2, 2, 4}, 2, 2);
    CHECK(rank1[0] == doctest::Approx(5.0));
    CHECK(rank1[1] < 1e-12);
}

TEST_CASE("singular values satisfy the classical identities") {
    std::mt19937_64 rng(80);
    std::normal_distribution<double> d;
    for (int trial = 0; trial < 40; ++trial) {
        int rows = 2 + int(rng() % 4), cols = 2 + int(rng() % 4);
        std::vector<double> a(std::size_t(rows) * cols);
        for (auto& v : a) v = d(rng);

        auto sv = singular_values(a, rows, cols);
        REQUIRE(int(sv.size()) == std::min(rows, cols));
        // descending and non-negative
        for (std::size_t i = 1; i < sv.size(); ++i) CHECK(sv[i] <= sv[i - 1]);
        CHECK(sv.back() >= 0.0);
        // Frobenius norm is the l2 norm of the spectrum
        double fro = 0, spec = 0;
        for (double v : a) fro += v * v;
        for (double s : sv) spec += s * s;
        CHECK(spec == doctest::Approx(fro).epsilon(1e-10));
    }
}

TEST_CASE("product of singular values is the absolute determinant") {
    std::mt19937_64 rng(81);
    std::uniform_int_distribution<int> d(-4, 4);
    for (int trial = 0; trial < 40; ++trial) {
        double m[9];
        for (double& v : m) v = d(rng);
        double det = m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
                     m[2] * (m[3] * m[7] - m[4] * m[6]);
        auto sv = singular_values(std::vector<double>(m, m + 9), 3, 3);
        CHECK(sv[0] * sv[1] * sv[2] == doctest::Approx(std::abs(det)).epsilon(1e-9).scale(1.0));
    }
}

TEST_CASE("condition numbers of stock matrices") {
    CHECK(condition_number(RatMatrix::identity(4)) == doctest::Approx(1.0));
    RatMatrix stretched{{4, 0}, {0, 2}};
    CHECK(condition_number(stretched) == doctest::Approx(2.0));
}

TEST_CASE("11-bit rounding behaves like binary16 near 1") {
    const double ulp = std::ldexp(1.0, -10);  // spacing of 11-bit significands in [1, 2)
    CHECK(rne11(1.0) == 1.0);
    CHECK(rne11(1.0 + ulp) == 1.0 + ulp);           // representable, untouched
    CHECK(rne11(1.0 + ulp / 4) == 1.0);             // below half spacing, down
    CHECK(rne11(1.0 + ulp / 2) == 1.0);             // tie: even mantissa wins
    CHECK(rne11(1.0 + 3 * ulp / 2) == 1.0 + 2 * ulp);  // tie the other way: up to even
    CHECK(rne11(-1.0 - ulp / 2) == -1.0);           // symmetric in sign
}

TEST_CASE("11-bit rounding structural properties") {
    std::mt19937_64 rng(82);
    std::normal_distribution<double> d;
    for (int trial = 0; trial < 2000; ++trial) {
        double x = d(rng) * std::ldexp(1.0, int(rng() % 20) - 10);
        double r = rne11(x);
        CHECK(rne11(r) == r);  // projection
        CHECK(std::abs(x - r) <= std::ldexp(std::abs(x), -11));
        CHECK(rne11(-x) == -r);
    }
    CHECK(rne11(0.0) == 0.0);
    double inf = std::numeric_limits<double>::infinity();
    CHECK(rne11(inf) == inf);
    CHECK(rne11(-inf) == -inf);
    CHECK(std::isnan(rne11(std::nan(""))));
}

TEST_CASE("overlap-form condition numbers of the catalog") {
    struct Pin { const char* name; double kappa; };
    for (const Pin& p : {Pin{"direct-3x3", 1.0}, Pin{"wino-2x2-3x3", 2.414},
                         Pin{"wino-4x4-3x3", 20.071}, Pin{"sfc6-6x6-3x3", 3.310},
                         Pin{"sfc6-7x7-3x3", 3.378}, Pin{"wino-2x2-7x7", 30.947}}) {
        INFO(p.name);
        CHECK(condition_number(catalog_algorithm(p.name).overlap_form) ==
              doctest::Approx(p.kappa).epsilon(0.005));
    }
}

TEST_CASE("perturbation growth stays under the condition number") {
    for (const char* name : {"direct-3x3", "wino-4x4-3x3", "sfc6-6x6-3x3", "sfc6-4x4-7x7"}) {
        BoundCheck bc = error_bound_check(catalog_algorithm(name), 200, 83);
        INFO(name);
        CHECK(bc.ok);
        CHECK(bc.max_ratio <= bc.kappa * 1.0001);
        CHECK(bc.kappa ==
              doctest::Approx(condition_number(catalog_algorithm(name).overlap_form)));
    }
}

TEST_CASE("reduced-mantissa simulation ranks conditioning correctly") {
    // the poorly conditioned big-tile interpolation must lose more accuracy
    // than the symbolic transform of the same tile size
    HalfSimResult wino = half_precision_mse(catalog_algorithm("wino-4x4-3x3"), 400, 84);
    HalfSimResult sfc = half_precision_mse(catalog_algorithm("sfc6-6x6-3x3"), 400, 84);
    CHECK(wino.ratio > 0.0);
    CHECK(sfc.ratio > 0.0);
    CHECK(sfc.ratio < wino.ratio);

    // the baseline normalized against itself sits near 1
    HalfSimResult base = half_precision_mse(catalog_algorithm("direct-3x3"), 400, 85);
    CHECK(base.ratio > 0.4);
    CHECK(base.ratio < 2.5);
}

TEST_CASE("transform addition counts") {
    CHECK(transform_adds_input(catalog_algorithm("sfc6-6x6-3x3")) == 18);
    CHECK(transform_adds_filter(catalog_algorithm("sfc6-6x6-3x3")) == 10);
    CHECK(transform_adds_input(catalog_algorithm("sfc4-4x4-3x3")) == 10);
    // winograd counts come straight from matrix sparsity
    const AlgorithmSpec& w = catalog_algorithm("wino-2x2-3x3");
    int adds = 0;
    for (int r = 0; r < w.BT.rows; ++r) {
        int nnz = 0;
        for (int c = 0; c < w.BT.cols; ++c)
            if (!w.BT.at(r, c).is_zero()) ++nnz;
        adds += nnz - 1;
    }
    CHECK(transform_adds_input(w) == adds);
}

TEST_CASE("bit-operation model follows its own definitions") {
    LayerConfig layer;
    layer.in_channels = 64;
    layer.out_channels = 64;
    layer.height = 56;
    layer.width = 56;
    layer.kernel = 3;
    layer.padding = 1;

    const AlgorithmSpec& s = catalog_algorithm("sfc6-6x6-3x3");
    BopsBreakdown b = bops_for_layer(s, layer, 8, 32);
    double tiles = std::pow(std::ceil(56.0 / s.M), 2);
    CHECK(b.products ==
          doctest::Approx(double(s.mults_reduced()) * tiles * 64 * 64 * 56).epsilon(1e-12));
    CHECK(b.input_transform ==
          doctest::Approx(tiles * 64 * (s.n_in() + s.K()) * 18 * 8).epsilon(1e-12));
    CHECK(b.accumulation ==
          doctest::Approx(double(s.K()) * s.K() * 63 * tiles * 64 * 32).epsilon(1e-12));
    CHECK(b.total() == doctest::Approx(b.input_transform + b.filter_transform +
                                       b.output_transform + b.products + b.accumulation));

    // the direct baseline has no transform stages at all
    BopsBreakdown d = bops_for_layer(catalog_algorithm("direct-3x3"), layer, 8, 32);
    CHECK(d.input_transform == 0.0);
    CHECK(d.output_transform == 0.0);
    CHECK(d.products == doctest::Approx(9.0 * 64 * 56 * 56 * 64 * 56));
    CHECK(d.total() > b.total());  // the whole point of the fast algorithm

    // mult cost scales linearly in input channels
    LayerConfig wide = layer;
    wide.in_channels *= 2;
    CHECK(bops_for_layer(s, wide, 8, 32).products == doctest::Approx(2 * b.products));

    LayerConfig wrong = layer;
    wrong.kernel = 5;
    CHECK_THROWS_AS(bops_for_layer(s, wrong, 8, 32), std::invalid_argument);
}

TEST_CASE("summary table covers the catalog") {
    std::string csv = catalog_table_csv();
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    CHECK(line == "name,tile,kernel,channels,products_full,products_paired,pct_of_direct,condition");
    int rows = 0;
    bool found = false;
    while (std::getline(in, line)) {
        ++rows;
        if (line == "sfc6-6x6-3x3,6,3,10,100,88,27.16,3.310") found = true;
    }
    CHECK(rows == int(catalog_names().size()));
    CHECK(found);
}
