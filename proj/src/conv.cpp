#include "sfconv/conv.hpp"

#include "sfconv/poly.hpp"

#include <atomic>
#include <cmath>
#include <cstring>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace sfconv {
namespace {

void check_filters(const DenseTensor& input, const DenseTensor& filters) {
    if (input.shape.size() != 4 || filters.shape.size() != 4)
        throw std::invalid_argument("conv2d expects 4-d NCHW tensors");
    if (filters.shape[2] != filters.shape[3])
        throw std::invalid_argument("conv2d expects square filters");
    if (input.shape[1] != filters.shape[1])
        throw std::invalid_argument("input channel count does not match filters");
}

// ---------------------------------------------------------------------------
// Paired-channel product schedule.
//
// Channel rows grouped as (a, b, c) with row_c = row_a + row_b in both BT and
// G carry redundant products: across a pair of such groups (one per axis) the
// nine positionwise products collapse to six. The six products are fixed
// bilinear forms in the four "corner" values (a,a), (a,b), (b,a), (b,b) of V
// and U, and a constant 4x6 matrix maps them to synthetic corner values that
// the unchanged output transform consumes. All constants are derived here in
// exact rational arithmetic and the resulting identity is re-verified against
// the positionwise tensor before the plan is allowed to run.
// ---------------------------------------------------------------------------

struct PairBlock {
    int a1, b1, c1;       // channel rows, first axis
    int a2, b2, c2;       // channel rows, second axis
    double alpha[6][4];   // product l reads alpha[l] . (Vaa, Vab, Vba, Vbb)
    double beta[6][4];    // ... and beta[l] . (Uaa, Uab, Uba, Ubb)
    double fold[4][6];    // synthetic corners = fold . products
};

struct ReducedPlan {
    bool available = false;
    std::vector<std::uint8_t> masked;  // K*K flags: position handled by a block
    std::vector<PairBlock> blocks;
};

struct EvalMap {  // coefficients (c00,c01,c10,c11) -> (real part, s part)
    Rat row0[4];
    Rat row1[4];
};

EvalMap bipoly_eval(int N, const PolyElement& e1, const PolyElement& e2) {
    EvalMap m;
    const PolyElement one{1, 0};
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) {
            PolyElement p = poly_mul(r ? e1 : one, c ? e2 : one, N);
            m.row0[2 * r + c] = Rat(p.c0);
            m.row1[2 * r + c] = Rat(p.c1);
        }
    return m;
}

// Rank-2 basis of the A-matrix columns restricted to a channel group, plus the
// inverse of its corner restriction. Throws if the structure is not the
// expected one; callers treat that as "no reduced plan".
struct GroupBasis {
    Rat phi[2][3];   // two independent restricted columns
    Rat cinv[2][2];  // inverse of [[phi0_a, phi0_b], [phi1_a, phi1_b]]
};

GroupBasis group_basis(const AlgorithmSpec& spec, const TripleChannels& t) {
    const int M = spec.M;
    std::vector<std::array<Rat, 3>> w(M);
    for (int j = 0; j < M; ++j)
        w[j] = {spec.A.at(t.a, j), spec.A.at(t.b, j), spec.A.at(t.c, j)};

    auto indep = [](const std::array<Rat, 3>& x, const std::array<Rat, 3>& y) {
        return !((x[0] * y[1] - x[1] * y[0]).is_zero() &&
                 (x[0] * y[2] - x[2] * y[0]).is_zero() &&
                 (x[1] * y[2] - x[2] * y[1]).is_zero());
    };
    int i1 = -1, i2 = -1;
    for (int i = 0; i < M && i2 < 0; ++i)
        for (int j = i + 1; j < M; ++j)
            if (indep(w[i], w[j])) { i1 = i; i2 = j; break; }
    if (i2 < 0) throw std::logic_error("channel group: output columns have rank < 2");

    GroupBasis gb;
    for (int k = 0; k < 3; ++k) { gb.phi[0][k] = w[i1][k]; gb.phi[1][k] = w[i2][k]; }

    // every column must lie in span{phi0, phi1}
    RatMatrix sys(3, 2);
    for (int k = 0; k < 3; ++k) { sys.at(k, 0) = gb.phi[0][k]; sys.at(k, 1) = gb.phi[1][k]; }
    for (int j = 0; j < M; ++j) {
        std::vector<Rat> rhs = {w[j][0], w[j][1], w[j][2]};
        std::vector<Rat> co = solve_exact(sys, rhs);  // throws if inconsistent
        for (int k = 0; k < 3; ++k)
            if (!(co[0] * gb.phi[0][k] + co[1] * gb.phi[1][k] == w[j][k]))
                throw std::logic_error("channel group: span check failed");
    }

    Rat det = gb.phi[0][0] * gb.phi[1][1] - gb.phi[0][1] * gb.phi[1][0];
    if (det.is_zero()) throw std::logic_error("channel group: corner restriction singular");
    gb.cinv[0][0] = gb.phi[1][1] / det;
    gb.cinv[0][1] = -gb.phi[0][1] / det;
    gb.cinv[1][0] = -gb.phi[1][0] / det;
    gb.cinv[1][1] = gb.phi[0][0] / det;
    return gb;
}

// 4x4 bilinear form on (V corners) x (U corners), exact entries.
using Tensor44 = std::array<std::array<Rat, 4>, 4>;

PairBlock derive_pair_block(const AlgorithmSpec& spec, const TripleChannels& t1,
                            const TripleChannels& t2) {
    const int N = spec.N;
    PairBlock blk{};
    blk.a1 = t1.a; blk.b1 = t1.b; blk.c1 = t1.c;
    blk.a2 = t2.a; blk.b2 = t2.b; blk.c2 = t2.c;

    // The scheme needs row_c = row_a + row_b in both transforms on both axes.
    auto additive = [&spec](const TripleChannels& t) {
        for (int j = 0; j < spec.BT.cols; ++j)
            if (!(spec.BT.at(t.a, j) + spec.BT.at(t.b, j) == spec.BT.at(t.c, j))) return false;
        for (int j = 0; j < spec.G.cols; ++j)
            if (!(spec.G.at(t.a, j) + spec.G.at(t.b, j) == spec.G.at(t.c, j))) return false;
        return true;
    };
    if (!additive(t1) || !additive(t2))
        throw std::logic_error("channel group rows are not additive");

    GroupBasis g1 = group_basis(spec, t1);
    GroupBasis g2 = group_basis(spec, t2);

    // Corner expansion of each of the nine block positions: coefficient of the
    // position value in terms of the four corners (a,a),(a,b),(b,a),(b,b).
    const int exp1[3][2] = {{1, 0}, {0, 1}, {1, 1}};  // a, b, c
    auto pos_expand = [&exp1](int i, int j, int k) {  // k indexes corner 2r+c
        return exp1[i][k / 2] * exp1[j][k % 2];
    };

    // The six products: both sides evaluated at (s, s) and (s, conj(s)).
    const PolyElement s{0, 1};
    const PolyElement sb = poly_conj(s, N);
    EvalMap e1 = bipoly_eval(N, s, s);
    EvalMap e2 = bipoly_eval(N, s, sb);
    Rat alpha[6][4], beta[6][4];
    for (int k = 0; k < 4; ++k) {
        alpha[0][k] = e1.row0[k];
        alpha[1][k] = e1.row1[k];
        alpha[2][k] = e1.row0[k] + e1.row1[k];
        alpha[3][k] = e2.row0[k];
        alpha[4][k] = e2.row1[k];
        alpha[5][k] = e2.row0[k] + e2.row1[k];
        for (int l = 0; l < 6; ++l) beta[l][k] = alpha[l][k];
    }

    // Karatsuba recombination of (x0 + x1 s)(y0 + y1 s) after reduction:
    // components of the product in terms of m1 = x0 y0, m2 = x1 y1,
    // m3 = (x0+x1)(y0+y1).
    Rat komb[2][3];
    if (N == 6) {
        komb[0][0] = Rat(1);  komb[0][1] = Rat(-1); komb[0][2] = Rat(0);
        komb[1][0] = Rat(-1); komb[1][1] = Rat(0);  komb[1][2] = Rat(1);
    } else {  // s^2 = -1
        komb[0][0] = Rat(1);  komb[0][1] = Rat(-1); komb[0][2] = Rat(0);
        komb[1][0] = Rat(-1); komb[1][1] = Rat(-1); komb[1][2] = Rat(1);
    }
    Rat wmap[4][6];  // product-pair components as combinations of the 6 mults
    for (int r = 0; r < 2; ++r)
        for (int l = 0; l < 3; ++l) {
            wmap[r][l] = komb[r][l];
            wmap[2 + r][3 + l] = komb[r][l];
        }

    // Tensors of the four components.
    Tensor44 tw[4];
    for (int k = 0; k < 4; ++k)
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) {
                Rat acc;
                for (int l = 0; l < 6; ++l)
                    if (!wmap[k][l].is_zero()) acc += wmap[k][l] * alpha[l][a] * beta[l][b];
                tw[k][a][b] = acc;
            }

    // Target functionals G_uv = sum over block positions of
    // phi1_u[i] phi2_v[j] (position bilinear form), solved exactly in the
    // component span.
    Rat lmap[2][2][4];
    for (int u = 0; u < 2; ++u)
        for (int v = 0; v < 2; ++v) {
            RatMatrix sys(16, 4);
            std::vector<Rat> rhs(16);
            for (int a = 0; a < 4; ++a)
                for (int b = 0; b < 4; ++b) {
                    for (int k = 0; k < 4; ++k) sys.at(4 * a + b, k) = tw[k][a][b];
                    Rat tgt;
                    for (int i = 0; i < 3; ++i)
                        for (int j = 0; j < 3; ++j) {
                            Rat coef = g1.phi[u][i] * g2.phi[v][j];
                            if (coef.is_zero()) continue;
                            tgt += coef * Rat(pos_expand(i, j, a) * pos_expand(i, j, b));
                        }
                    rhs[4 * a + b] = tgt;
                }
            std::vector<Rat> sol = solve_exact(sys, rhs);
            for (int k = 0; k < 4; ++k) lmap[u][v][k] = sol[k];
        }

    // fold[(r,c)][l] = sum_uv C1inv[r][u] C2inv[c][v] sum_k lmap[u][v][k] wmap[k][l]
    Rat fold[4][6];
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c)
            for (int l = 0; l < 6; ++l) {
                Rat acc;
                for (int u = 0; u < 2; ++u)
                    for (int v = 0; v < 2; ++v) {
                        Rat lk;
                        for (int k = 0; k < 4; ++k) lk += lmap[u][v][k] * wmap[k][l];
                        acc += g1.cinv[r][u] * g2.cinv[c][v] * lk;
                    }
                fold[2 * r + c][l] = acc;
            }

    // End-to-end check: for every output pair the synthetic-corner path must
    // reproduce the positionwise tensor exactly.
    const int rows1[3] = {t1.a, t1.b, t1.c};
    const int rows2[3] = {t2.a, t2.b, t2.c};
    for (int o1 = 0; o1 < spec.M; ++o1)
        for (int o2 = 0; o2 < spec.M; ++o2)
            for (int a = 0; a < 4; ++a)
                for (int b = 0; b < 4; ++b) {
                    Rat truth;
                    for (int i = 0; i < 3; ++i)
                        for (int j = 0; j < 3; ++j)
                            truth += spec.A.at(rows1[i], o1) * spec.A.at(rows2[j], o2) *
                                     Rat(pos_expand(i, j, a) * pos_expand(i, j, b));
                    Rat syn;
                    for (int cp = 0; cp < 4; ++cp) {
                        Rat acoef = spec.A.at(cp / 2 ? t1.b : t1.a, o1) *
                                    spec.A.at(cp % 2 ? t2.b : t2.a, o2);
                        if (acoef.is_zero()) continue;
                        for (int l = 0; l < 6; ++l) {
                            if (fold[cp][l].is_zero()) continue;
                            syn += acoef * fold[cp][l] * alpha[l][a] * beta[l][b];
                        }
                    }
                    if (!(truth == syn))
                        throw std::logic_error("paired-product identity check failed");
                }

    for (int l = 0; l < 6; ++l)
        for (int k = 0; k < 4; ++k) {
            blk.alpha[l][k] = alpha[l][k].to_double();
            blk.beta[l][k] = beta[l][k].to_double();
        }
    for (int cp = 0; cp < 4; ++cp)
        for (int l = 0; l < 6; ++l) blk.fold[cp][l] = fold[cp][l].to_double();
    return blk;
}

ReducedPlan build_reduced_plan(const AlgorithmSpec& spec) {
    ReducedPlan plan;
    if (spec.triples.empty()) return plan;
    const int K = spec.K();
    plan.masked.assign(std::size_t(K) * K, 0);
    for (const auto& t1 : spec.triples)
        for (const auto& t2 : spec.triples) {
            plan.blocks.push_back(derive_pair_block(spec, t1, t2));
            const int r1[3] = {t1.a, t1.b, t1.c};
            const int r2[3] = {t2.a, t2.b, t2.c};
            for (int i : r1)
                for (int j : r2) plan.masked[std::size_t(i) * K + j] = 1;
        }
    plan.available = true;
    return plan;
}

// Cache: reduced plans keyed by algorithm name (catalog specs are immutable).
const ReducedPlan& reduced_plan_for(const AlgorithmSpec& spec) {
    static std::mutex mu;
    static std::map<std::string, ReducedPlan> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(spec.name);
    if (it == cache.end()) it = cache.emplace(spec.name, build_reduced_plan(spec)).first;
    return it->second;
}

struct EnginePlan {
    int K, n, R, M;
    std::vector<double> bt;  // K x n
    std::vector<double> g;   // K x R
    std::vector<double> a;   // K x M, a_denom folded in
};

EnginePlan make_engine_plan(const AlgorithmSpec& spec) {
    EnginePlan p;
    p.K = spec.K();
    p.n = spec.n_in();
    p.R = spec.R;
    p.M = spec.M;
    p.bt = spec.BT.to_double();
    p.g = spec.G.to_double();
    p.a = spec.A.to_double();
    const double inv = 1.0 / double(spec.a_denom);
    for (auto& v : p.a) v *= inv;
    return p;
}

}  // namespace

DenseTensor direct_conv2d(const DenseTensor& input, const DenseTensor& filters,
                          int stride, int padding) {
    check_filters(input, filters);
    if (stride < 1) throw std::invalid_argument("stride must be positive");
    const int B = int(input.shape[0]), C = int(input.shape[1]);
    const int H = int(input.shape[2]), W = int(input.shape[3]);
    const int OC = int(filters.shape[0]), R = int(filters.shape[2]);
    const int HO = (H + 2 * padding - R) / stride + 1;
    const int WO = (W + 2 * padding - R) / stride + 1;
    if (HO <= 0 || WO <= 0) throw std::invalid_argument("filter larger than padded input");

    DenseTensor out({B, OC, HO, WO});
    for (int b = 0; b < B; ++b)
        for (int oc = 0; oc < OC; ++oc)
            for (int oh = 0; oh < HO; ++oh)
                for (int ow = 0; ow < WO; ++ow) {
                    double acc = 0.0;
                    for (int ic = 0; ic < C; ++ic)
                        for (int fr = 0; fr < R; ++fr) {
                            const int ih = oh * stride - padding + fr;
                            if (ih < 0 || ih >= H) continue;
                            for (int fc = 0; fc < R; ++fc) {
                                const int iw = ow * stride - padding + fc;
                                if (iw < 0 || iw >= W) continue;
                                acc += input.at4(b, ic, ih, iw) * filters.at4(oc, ic, fr, fc);
                            }
                        }
                    out.at4(b, oc, oh, ow) = acc;
                }
    return out;
}

DenseTensor transform_filters(const DenseTensor& filters, const AlgorithmSpec& spec) {
    if (filters.shape.size() != 4 || int(filters.shape[2]) != spec.R ||
        int(filters.shape[3]) != spec.R)
        throw std::invalid_argument("filter shape does not match algorithm");
    const int OC = int(filters.shape[0]), IC = int(filters.shape[1]);
    const int R = spec.R, K = spec.K();
    const std::vector<double> g = spec.G.to_double();

    DenseTensor u({OC, IC, K, K});
    std::vector<double> tmp(std::size_t(K) * R);
    for (int oc = 0; oc < OC; ++oc)
        for (int ic = 0; ic < IC; ++ic) {
            // tmp = G f
            for (int i = 0; i < K; ++i)
                for (int j = 0; j < R; ++j) {
                    double acc = 0.0;
                    for (int k = 0; k < R; ++k)
                        acc += g[std::size_t(i) * R + k] * filters.at4(oc, ic, k, j);
                    tmp[std::size_t(i) * R + j] = acc;
                }
            // u = tmp G^T
            for (int i = 0; i < K; ++i)
                for (int j = 0; j < K; ++j) {
                    double acc = 0.0;
                    for (int k = 0; k < R; ++k)
                        acc += tmp[std::size_t(i) * R + k] * g[std::size_t(j) * R + k];
                    u.at4(oc, ic, i, j) = acc;
                }
        }
    return u;
}

DenseTensor fast_conv2d(const DenseTensor& input, const DenseTensor& filters,
                        const AlgorithmSpec& spec, int padding,
                        const FastConvOptions& opts) {
    check_filters(input, filters);
    if (int(filters.shape[2]) != spec.R)
        throw std::invalid_argument("filter size does not match algorithm");
    const int B = int(input.shape[0]), C = int(input.shape[1]);
    const int H = int(input.shape[2]), W = int(input.shape[3]);
    const int OC = int(filters.shape[0]);
    const EnginePlan plan = make_engine_plan(spec);
    const int K = plan.K, n = plan.n, M = plan.M, R = plan.R;
    const int HO = H + 2 * padding - R + 1;
    const int WO = W + 2 * padding - R + 1;
    if (HO <= 0 || WO <= 0) throw std::invalid_argument("filter larger than padded input");

    const ReducedPlan* rp = nullptr;
    if (opts.reduced_products) {
        const ReducedPlan& cand = reduced_plan_for(spec);
        if (cand.available) rp = &cand;
    }

    const DenseTensor u = transform_filters(filters, spec);

    const int tiles_h = (HO + M - 1) / M;
    const int tiles_w = (WO + M - 1) / M;
    const std::int64_t total_tiles = std::int64_t(B) * tiles_h * tiles_w;

    DenseTensor out({B, OC, HO, WO});

    int threads = opts.threads > 0 ? opts.threads : 1;
    if (std::int64_t(threads) > total_tiles) threads = int(total_tiles > 0 ? total_tiles : 1);

    std::vector<std::int64_t> thread_mults(std::size_t(threads), 0);
    std::vector<std::int64_t> thread_tiles(std::size_t(threads), 0);

    auto worker = [&](int tid, std::int64_t lo, std::int64_t hi) {
        std::vector<double> window(std::size_t(n) * n);
        std::vector<double> tmp(std::size_t(K) * n);
        std::vector<double> v(std::size_t(K) * K);
        std::vector<double> p(std::size_t(K) * K);
        std::vector<double> q(std::size_t(M) * K);
        std::int64_t mults = 0;

        for (std::int64_t idx = lo; idx < hi; ++idx) {
            const int b = int(idx / (std::int64_t(tiles_h) * tiles_w));
            const int rem = int(idx % (std::int64_t(tiles_h) * tiles_w));
            const int th = rem / tiles_w, tw = rem % tiles_w;
            const int oh0 = th * M, ow0 = tw * M;
            const int ih0 = oh0 - padding, iw0 = ow0 - padding;

            for (int oc = 0; oc < OC; ++oc) {
                std::fill(p.begin(), p.end(), 0.0);
                for (int ic = 0; ic < C; ++ic) {
                    // gather the input window with zero padding
                    for (int r = 0; r < n; ++r) {
                        const int ih = ih0 + r;
                        for (int c = 0; c < n; ++c) {
                            const int iw = iw0 + c;
                            window[std::size_t(r) * n + c] =
                                (ih >= 0 && ih < H && iw >= 0 && iw < W)
                                    ? input.at4(b, ic, ih, iw)
                                    : 0.0;
                        }
                    }
                    // v = BT window BT^T
                    for (int i = 0; i < K; ++i)
                        for (int j = 0; j < n; ++j) {
                            double acc = 0.0;
                            for (int k = 0; k < n; ++k)
                                acc += plan.bt[std::size_t(i) * n + k] *
                                       window[std::size_t(k) * n + j];
                            tmp[std::size_t(i) * n + j] = acc;
                        }
                    for (int i = 0; i < K; ++i)
                        for (int j = 0; j < K; ++j) {
                            double acc = 0.0;
                            for (int k = 0; k < n; ++k)
                                acc += tmp[std::size_t(i) * n + k] *
                                       plan.bt[std::size_t(j) * n + k];
                            v[std::size_t(i) * K + j] = acc;
                        }
                    // accumulate transform-domain products across input channels
                    if (!rp) {
                        for (int i = 0; i < K; ++i)
                            for (int j = 0; j < K; ++j)
                                p[std::size_t(i) * K + j] +=
                                    v[std::size_t(i) * K + j] * u.at4(oc, ic, i, j);
                        mults += std::int64_t(K) * K;
                    } else {
                        for (int i = 0; i < K; ++i)
                            for (int j = 0; j < K; ++j) {
                                if (rp->masked[std::size_t(i) * K + j]) continue;
                                p[std::size_t(i) * K + j] +=
                                    v[std::size_t(i) * K + j] * u.at4(oc, ic, i, j);
                                ++mults;
                            }
                        for (const PairBlock& blk : rp->blocks) {
                            const double vc[4] = {v[std::size_t(blk.a1) * K + blk.a2],
                                                  v[std::size_t(blk.a1) * K + blk.b2],
                                                  v[std::size_t(blk.b1) * K + blk.a2],
                                                  v[std::size_t(blk.b1) * K + blk.b2]};
                            const double uc[4] = {u.at4(oc, ic, blk.a1, blk.a2),
                                                  u.at4(oc, ic, blk.a1, blk.b2),
                                                  u.at4(oc, ic, blk.b1, blk.a2),
                                                  u.at4(oc, ic, blk.b1, blk.b2)};
                            double m[6];
                            for (int l = 0; l < 6; ++l) {
                                double av = 0.0, bv = 0.0;
                                for (int k = 0; k < 4; ++k) {
                                    av += blk.alpha[l][k] * vc[k];
                                    bv += blk.beta[l][k] * uc[k];
                                }
                                m[l] = av * bv;
                            }
                            mults += 6;
                            const int rr[2] = {blk.a1, blk.b1};
                            const int cc[2] = {blk.a2, blk.b2};
                            for (int r = 0; r < 2; ++r)
                                for (int c = 0; c < 2; ++c) {
                                    double acc = 0.0;
                                    for (int l = 0; l < 6; ++l)
                                        acc += blk.fold[2 * r + c][l] * m[l];
                                    p[std::size_t(rr[r]) * K + cc[c]] += acc;
                                }
                        }
                    }
                }
                // y = A^T p A, clipped to the output
                for (int t = 0; t < M; ++t)
                    for (int j = 0; j < K; ++j) {
                        double acc = 0.0;
                        for (int k = 0; k < K; ++k)
                            acc += plan.a[std::size_t(k) * M + t] * p[std::size_t(k) * K + j];
                        q[std::size_t(t) * K + j] = acc;
                    }
                for (int t1 = 0; t1 < M && oh0 + t1 < HO; ++t1)
                    for (int t2 = 0; t2 < M && ow0 + t2 < WO; ++t2) {
                        double acc = 0.0;
                        for (int k = 0; k < K; ++k)
                            acc += q[std::size_t(t1) * K + k] * plan.a[std::size_t(k) * M + t2];
                        out.at4(b, oc, oh0 + t1, ow0 + t2) = acc;
                    }
            }
            ++thread_tiles[std::size_t(tid)];
        }
        thread_mults[std::size_t(tid)] = mults;
    };

    if (threads <= 1) {
        worker(0, 0, total_tiles);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(std::size_t(threads));
        const std::int64_t chunk = (total_tiles + threads - 1) / threads;
        for (int t = 0; t < threads; ++t) {
            const std::int64_t lo = std::min(total_tiles, std::int64_t(t) * chunk);
            const std::int64_t hi = std::min(total_tiles, lo + chunk);
            pool.emplace_back(worker, t, lo, hi);
        }
        for (auto& th : pool) th.join();
    }

    if (opts.counters) {
        for (int t = 0; t < threads; ++t) {
            opts.counters->multiplications += thread_mults[std::size_t(t)];
            opts.counters->tiles += thread_tiles[std::size_t(t)];
        }
    }
    return out;
}

}  // namespace sfconv
