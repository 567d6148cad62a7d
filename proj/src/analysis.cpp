#include "sfconv/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <stdexcept>

#include "sfconv/conv.hpp"
#include "sfconv/poly.hpp"

namespace sfconv {
namespace {

double column_dot(const std::vector<double>& a, int rows, int cols, int p, int q) {
    double s = 0.0;
    for (int r = 0; r < rows; ++r) s += a[std::size_t(r) * cols + p] * a[std::size_t(r) * cols + q];
    return s;
}

}  // namespace

std::vector<double> singular_values(std::vector<double> a, int rows, int cols) {
    if (rows < cols) {  // operate on the tall orientation; spectrum is shared
        std::vector<double> t(a.size());
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c) t[std::size_t(c) * rows + r] = a[std::size_t(r) * cols + c];
        std::swap(rows, cols);
        a = std::move(t);
    }
    for (int sweep = 0; sweep < 60; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < cols - 1; ++p)
            for (int q = p + 1; q < cols; ++q) {
                const double apq = column_dot(a, rows, cols, p, q);
                const double app = column_dot(a, rows, cols, p, p);
                const double aqq = column_dot(a, rows, cols, q, q);
                off = std::max(off, std::abs(apq) / std::sqrt(app * aqq + 1e-300));
                if (std::abs(apq) < 1e-30) continue;
                const double tau = (aqq - app) / (2.0 * apq);
                const double t = (tau >= 0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t), s = c * t;
                for (int r = 0; r < rows; ++r) {
                    double& xp = a[std::size_t(r) * cols + p];
                    double& xq = a[std::size_t(r) * cols + q];
                    const double np = c * xp - s * xq, nq = s * xp + c * xq;
                    xp = np;
                    xq = nq;
                }
            }
        if (off < 1e-14) break;
    }
    std::vector<double> sv(cols);
    for (int c = 0; c < cols; ++c) sv[std::size_t(c)] = std::sqrt(column_dot(a, rows, cols, c, c));
    std::sort(sv.begin(), sv.end(), std::greater<double>());
    return sv;
}

double condition_number(const RatMatrix& m) {
    const std::vector<double> sv = singular_values(m.to_double(), m.rows, m.cols);
    if (sv.empty() || sv.back() <= 0.0) throw std::domain_error("singular transform");
    return sv.front() / sv.back();
}

double rne11(double v) {
    if (v == 0.0 || !std::isfinite(v)) return v;
    int e = 0;
    const double m = std::frexp(v, &e);        // |m| in [0.5, 1)
    const double r = std::nearbyint(m * 2048.0) / 2048.0;  // ties to even
    return std::ldexp(r, e);
}

namespace {

// One trial of the reduced-mantissa protocol: transformed operands and their
// elementwise products are rounded to 11-bit mantissas, everything else stays
// in fp64. Returns the squared error against the exact fp64 correlation,
// summed over the tile outputs.
double half_sim_trial(const AlgorithmSpec& spec, std::mt19937_64& rng) {
    std::normal_distribution<double> dist(0.0, 1.0);
    const int n = spec.n_in(), R = spec.R, M = spec.M, K = spec.K();
    std::vector<double> x(std::size_t(n) * n), f(std::size_t(R) * R);
    for (auto& v : x) v = dist(rng);
    for (auto& v : f) v = dist(rng);

    std::vector<double> bt = spec.BT.to_double();
    std::vector<double> g = spec.G.to_double();
    std::vector<double> a = spec.A.to_double();
    for (auto& v : a) v /= double(spec.a_denom);

    std::vector<double> tmp(std::size_t(K) * n), vmat(std::size_t(K) * K);
    for (int i = 0; i < K; ++i)
        for (int j = 0; j < n; ++j) {
            double acc = 0.0;
            for (int k = 0; k < n; ++k) acc += bt[std::size_t(i) * n + k] * x[std::size_t(k) * n + j];
            tmp[std::size_t(i) * n + j] = acc;
        }
    for (int i = 0; i < K; ++i)
        for (int j = 0; j < K; ++j) {
            double acc = 0.0;
            for (int k = 0; k < n; ++k) acc += tmp[std::size_t(i) * n + k] * bt[std::size_t(j) * n + k];
            vmat[std::size_t(i) * K + j] = rne11(acc);
        }

    std::vector<double> tg(std::size_t(K) * R), umat(std::size_t(K) * K);
    for (int i = 0; i < K; ++i)
        for (int j = 0; j < R; ++j) {
            double acc = 0.0;
            for (int k = 0; k < R; ++k) acc += g[std::size_t(i) * R + k] * f[std::size_t(k) * R + j];
            tg[std::size_t(i) * R + j] = acc;
        }
    for (int i = 0; i < K; ++i)
        for (int j = 0; j < K; ++j) {
            double acc = 0.0;
            for (int k = 0; k < R; ++k) acc += tg[std::size_t(i) * R + k] * g[std::size_t(j) * R + k];
            umat[std::size_t(i) * K + j] = rne11(acc);
        }

    std::vector<double> p(std::size_t(K) * K);
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = rne11(umat[i] * vmat[i]);

    std::vector<double> q(std::size_t(M) * K);
    for (int t = 0; t < M; ++t)
        for (int j = 0; j < K; ++j) {
            double acc = 0.0;
            for (int k = 0; k < K; ++k) acc += a[std::size_t(k) * M + t] * p[std::size_t(k) * K + j];
            q[std::size_t(t) * K + j] = acc;
        }

    double err = 0.0;
    for (int t1 = 0; t1 < M; ++t1)
        for (int t2 = 0; t2 < M; ++t2) {
            double y = 0.0;
            for (int k = 0; k < K; ++k) y += q[std::size_t(t1) * K + k] * a[std::size_t(k) * M + t2];
            double ref = 0.0;
            for (int r = 0; r < R; ++r)
                for (int c = 0; c < R; ++c)
                    ref += x[std::size_t(t1 + r) * n + (t2 + c)] * f[std::size_t(r) * R + c];
            err += (y - ref) * (y - ref);
        }
    return err;
}

double half_sim_mse(const AlgorithmSpec& spec, int trials, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    double err = 0.0;
    for (int t = 0; t < trials; ++t) err += half_sim_trial(spec, rng);
    return err / (double(trials) * spec.M * spec.M);
}

}  // namespace

HalfSimResult half_precision_mse(const AlgorithmSpec& spec, int trials, std::uint64_t seed) {
    HalfSimResult res;
    res.mse = half_sim_mse(spec, trials, seed);
    res.mse_direct = half_sim_mse(make_direct_spec(spec.R), trials, seed ^ 0x51f0c1a77be2d9ULL);
    res.ratio = res.mse / res.mse_direct;
    return res;
}

BoundCheck error_bound_check(const AlgorithmSpec& spec, int trials, std::uint64_t seed) {
    const RatMatrix& q = spec.overlap_form;
    if (q.rows != q.cols) throw std::invalid_argument("overlap form must be square");
    const int n = q.rows;
    const std::vector<double> qd = q.to_double();

    BoundCheck chk;
    chk.kappa = condition_number(q);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(0.0, 1.0);
    std::vector<double> x(n), d(n), y(n), yp(n);
    for (int t = 0; t < trials; ++t) {
        double nx = 0.0, nd = 0.0;
        for (int i = 0; i < n; ++i) {
            x[std::size_t(i)] = dist(rng);
            d[std::size_t(i)] = dist(rng);
            nx += x[std::size_t(i)] * x[std::size_t(i)];
            nd += d[std::size_t(i)] * d[std::size_t(i)];
        }
        nx = std::sqrt(nx);
        nd = std::sqrt(nd);
        const double scale = 1e-6 * nx / nd;
        for (int i = 0; i < n; ++i) d[std::size_t(i)] *= scale;

        double ny = 0.0, ne = 0.0;
        for (int i = 0; i < n; ++i) {
            double a1 = 0.0, a2 = 0.0;
            for (int k = 0; k < n; ++k) {
                a1 += qd[std::size_t(i) * n + k] * x[std::size_t(k)];
                a2 += qd[std::size_t(i) * n + k] * (x[std::size_t(k)] + d[std::size_t(k)]);
            }
            y[std::size_t(i)] = a1;
            yp[std::size_t(i)] = a2;
            ny += a1 * a1;
            ne += (a2 - a1) * (a2 - a1);
        }
        const double rel_out = std::sqrt(ne) / std::sqrt(ny);
        const double rel_in = 1e-6;
        chk.max_ratio = std::max(chk.max_ratio, rel_out / rel_in);
    }
    chk.ok = chk.max_ratio <= chk.kappa * (1.0 + 1e-6);
    return chk;
}

int transform_adds_input(const AlgorithmSpec& spec) {
    if (spec.family == AlgoFamily::Sfc)
        return (spec.n_in() - spec.N) + sft_addition_count(spec.N) + int(spec.corrections.size());
    int adds = 0;
    for (int r = 0; r < spec.BT.rows; ++r) {
        int nnz = 0;
        for (int c = 0; c < spec.BT.cols; ++c)
            if (!spec.BT.at(r, c).is_zero()) ++nnz;
        if (nnz > 1) adds += nnz - 1;
    }
    return adds;
}

int transform_adds_filter(const AlgorithmSpec& spec) {
    int adds = 0;
    for (int r = 0; r < spec.G.rows; ++r) {
        int nnz = 0;
        for (int c = 0; c < spec.G.cols; ++c)
            if (!spec.G.at(r, c).is_zero()) ++nnz;
        if (nnz > 1) adds += nnz - 1;
    }
    return adds;
}

int transform_adds_output(const AlgorithmSpec& spec) {
    int adds = 0;
    for (int c = 0; c < spec.A.cols; ++c) {
        int nnz = 0;
        for (int r = 0; r < spec.A.rows; ++r)
            if (!spec.A.at(r, c).is_zero()) ++nnz;
        if (nnz > 1) adds += nnz - 1;
    }
    return adds;
}

BopsBreakdown bops_for_layer(const AlgorithmSpec& spec, const LayerConfig& layer,
                             int act_bits, int acc_bits) {
    if (layer.kernel != spec.R) throw std::invalid_argument("layer kernel does not match algorithm");
    const double mult_cost = double(act_bits) * (act_bits - 1);
    const int HO = layer.height + 2 * layer.padding - layer.kernel + 1;
    const int WO = layer.width + 2 * layer.padding - layer.kernel + 1;
    if (HO <= 0 || WO <= 0) throw std::invalid_argument("kernel larger than padded layer");
    const double cin = layer.in_channels, cout = layer.out_channels;

    BopsBreakdown b;
    if (spec.family == AlgoFamily::Direct && spec.M == 1) {
        const double outs = double(HO) * WO;
        const double r2 = double(spec.R) * spec.R;
        b.products = r2 * cin * outs * cout * mult_cost;
        b.accumulation = (r2 * cin - 1.0) * outs * cout * acc_bits;
        return b;
    }

    const int M = spec.M, K = spec.K(), n = spec.n_in(), R = spec.R;
    const double tiles = double((HO + M - 1) / M) * double((WO + M - 1) / M);
    const double per_tile_products = double(spec.mults_reduced());

    b.input_transform = tiles * cin * double(n + K) * transform_adds_input(spec) * act_bits;
    b.filter_transform = cout * cin * double(R + K) * transform_adds_filter(spec) * act_bits;
    b.output_transform = tiles * cout * double(K + M) * transform_adds_output(spec) * acc_bits;
    b.products = per_tile_products * tiles * cin * cout * mult_cost;
    b.accumulation = double(K) * K * (cin - 1.0) * tiles * cout * acc_bits;
    return b;
}

std::string catalog_table_csv() {
    std::ostringstream out;
    out << "name,tile,kernel,channels,products_full,products_paired,pct_of_direct,condition\n";
    for (const std::string& name : catalog_names()) {
        const AlgorithmSpec& spec = catalog_algorithm(name);
        out << spec.name << ',' << spec.M << ',' << spec.R << ',' << spec.K() << ','
            << spec.mults_full() << ',' << spec.mults_reduced() << ',';
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.2f", spec.complexity_pct());
        out << buf << ',';
        std::snprintf(buf, sizeof buf, "%.3f", condition_number(spec.overlap_form));
        out << buf << '\n';
    }
    return out.str();
}

}  // namespace sfconv
