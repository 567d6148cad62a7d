#include "sfconv/iterative.hpp"

#include "sfconv/poly.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace sfconv {
namespace {

constexpr int kInnerTileX = 6;   // feature tile edge
constexpr int kInnerTileF = 5;   // kernel tile edge
constexpr int kGridX = 5;        // feature tiles per axis
constexpr int kGridF = 6;        // kernel tiles per axis

struct ToomBlock {
    RatMatrix B;  // 9 x 5, evaluation rows scaled by Lagrange denominators
    RatMatrix G;  // 9 x 5, plain evaluation rows
    RatMatrix A;  // 9 x 9, interpolation columns with denominators folded back
};

// 5-tap by 5-tap full product through eight finite points and infinity.
ToomBlock toom_nine() {
    const std::vector<Rat> pts = {Rat(0),     Rat(1),      Rat(-1), Rat(2),
                                  Rat(-2),    Rat(1, 2),   Rat(-1, 2), Rat(3)};
    const int npts = int(pts.size()) + 1;  // + infinity
    ToomBlock blk{RatMatrix(npts, 5), RatMatrix(npts, 5), RatMatrix(npts, 9)};

    std::vector<Rat> scale(std::size_t(npts), Rat(1));
    for (int i = 0; i < int(pts.size()); ++i) {
        for (int j = 0; j < int(pts.size()); ++j)
            if (j != i) scale[std::size_t(i)] = scale[std::size_t(i)] * (pts[std::size_t(i)] - pts[std::size_t(j)]);
        Rat pw(1);
        for (int t = 0; t < 5; ++t) {
            blk.B.at(i, t) = pw * scale[std::size_t(i)];
            blk.G.at(i, t) = pw;
            pw = pw * pts[std::size_t(i)];
        }
    }
    blk.B.at(npts - 1, 4) = Rat(1);
    blk.G.at(npts - 1, 4) = Rat(1);

    RatMatrix vand(npts, npts);
    for (int i = 0; i < int(pts.size()); ++i) {
        Rat pw(1);
        for (int t = 0; t < npts; ++t) {
            vand.at(i, t) = pw;
            pw = pw * pts[std::size_t(i)];
        }
    }
    vand.at(npts - 1, npts - 1) = Rat(1);
    RatMatrix vinv = vand.inverse();
    for (int k = 0; k < npts; ++k)
        for (int t = 0; t < npts; ++t) blk.A.at(k, t) = vinv.at(t, k) / scale[std::size_t(k)];
    return blk;
}

// Exact solve for the output-side matrix of a full-product stage: for every
// output tap w, sum_k A[k][w] B[k][u] G[k][v] = [u + v == w].
RatMatrix solve_product_output(const RatMatrix& B, const RatMatrix& G) {
    const int K = B.rows, nu = B.cols, nv = G.cols;
    const int ny = nu + nv - 1;
    RatMatrix sys(nu * nv, K);
    for (int u = 0; u < nu; ++u)
        for (int v = 0; v < nv; ++v)
            for (int k = 0; k < K; ++k) sys.at(u * nv + v, k) = B.at(k, u) * G.at(k, v);
    RatMatrix A(K, ny);
    for (int w = 0; w < ny; ++w) {
        std::vector<Rat> rhs(std::size_t(nu) * nv);
        for (int u = 0; u < nu; ++u)
            for (int v = 0; v < nv; ++v)
                rhs[std::size_t(u) * nv + v] = Rat(u + v == w ? 1 : 0);
        std::vector<Rat> col = solve_exact(sys, rhs);
        for (int k = 0; k < K; ++k) A.at(k, w) = col[std::size_t(k)];
    }
    return A;
}

std::uint64_t splitmix(std::uint64_t& s) {
    s += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = s;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

BilinearStage iterative_inner_stage() {
    const ToomBlock t9 = toom_nine();
    BilinearStage st{RatMatrix(18, 10), RatMatrix(18, 5), RatMatrix(18, 14)};
    for (int k = 0; k < 9; ++k)
        for (int t = 0; t < 5; ++t) {
            st.B.at(k, t) = t9.B.at(k, t);
            st.B.at(9 + k, 5 + t) = t9.B.at(k, t);
            st.G.at(k, t) = t9.G.at(k, t);
            st.G.at(9 + k, t) = t9.G.at(k, t);
        }
    for (int k = 0; k < 9; ++k)
        for (int t = 0; t < 9; ++t) {
            st.A.at(k, t) = t9.A.at(k, t);
            st.A.at(9 + k, 5 + t) = t9.A.at(k, t);
        }
    return st;
}

BilinearStage iterative_outer_stage() {
    const SymbolicDftPlan plan = build_sft(6);
    // Component rows of the period-6 transform, with the summed row appended
    // after each conjugate pair, applied to both operands without folding: the
    // feature side occupies five of the six taps, the kernel side all six.
    std::vector<std::vector<int>> comp;
    const auto& F = plan.F;
    auto frow = [&F](int r) {
        std::vector<int> out(6);
        for (int j = 0; j < 6; ++j) {
            Rat v = F.at(r, j);
            out[std::size_t(j)] = int(v.num);  // entries are -1, 0, 1
        }
        return out;
    };
    auto sum2 = [](const std::vector<int>& x, const std::vector<int>& y) {
        std::vector<int> out(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + y[i];
        return out;
    };
    comp.push_back(frow(0));
    comp.push_back(frow(1));
    comp.push_back(frow(2));
    comp.push_back(sum2(frow(1), frow(2)));
    comp.push_back(frow(3));
    comp.push_back(frow(4));
    comp.push_back(sum2(frow(3), frow(4)));
    comp.push_back(frow(5));

    std::vector<std::pair<int, int>> wraps;
    for (int u = 0; u < kGridX; ++u)
        for (int v = 0; v < kGridF; ++v)
            if (u + v >= 6) wraps.emplace_back(u, v);

    const int K = int(comp.size() + wraps.size());
    BilinearStage st{RatMatrix(K, kGridX), RatMatrix(K, kGridF), RatMatrix(K, kGridX + kGridF - 1)};
    for (int k = 0; k < int(comp.size()); ++k) {
        for (int t = 0; t < kGridX; ++t) st.B.at(k, t) = Rat(comp[std::size_t(k)][std::size_t(t)]);
        for (int t = 0; t < kGridF; ++t) st.G.at(k, t) = Rat(comp[std::size_t(k)][std::size_t(t)]);
    }
    for (int w = 0; w < int(wraps.size()); ++w) {
        const int k = int(comp.size()) + w;
        st.B.at(k, wraps[std::size_t(w)].first) = Rat(1);
        st.G.at(k, wraps[std::size_t(w)].second) = Rat(1);
    }
    st.A = solve_product_output(st.B, st.G);
    return st;
}

void validate_stage(const BilinearStage& stage, int trials, std::uint64_t seed) {
    const int K = stage.channels(), nx = stage.nx(), ng = stage.ng(), ny = stage.ny();
    std::uint64_t state = seed ^ 0xa1c6d96bf0e25741ULL;
    for (int t = 0; t < trials; ++t) {
        std::vector<Rat> x(nx), g(ng);
        for (auto& v : x) v = Rat(std::int64_t(splitmix(state) % 17) - 8);
        for (auto& v : g) v = Rat(std::int64_t(splitmix(state) % 17) - 8);
        std::vector<Rat> y(ny);
        for (int k = 0; k < K; ++k) {
            Rat bx, gg;
            for (int i = 0; i < nx; ++i) bx += stage.B.at(k, i) * x[std::size_t(i)];
            for (int i = 0; i < ng; ++i) gg += stage.G.at(k, i) * g[std::size_t(i)];
            Rat m = bx * gg;
            for (int w = 0; w < ny; ++w)
                if (!stage.A.at(k, w).is_zero()) y[std::size_t(w)] += stage.A.at(k, w) * m;
        }
        for (int w = 0; w < ny; ++w) {
            Rat ref;
            for (int u = std::max(0, w - ng + 1); u <= std::min(nx - 1, w); ++u)
                ref += x[std::size_t(u)] * g[std::size_t(w - u)];
            if (!(y[std::size_t(w)] == ref))
                throw std::logic_error("bilinear stage does not compute the product");
        }
    }
}

IterativeResult iterative_correlate(const DenseTensor& feature, const DenseTensor& kernel) {
    if (feature.shape.size() != 4 || kernel.shape.size() != 4 ||
        feature.shape[0] != 1 || feature.shape[1] != 1 ||
        kernel.shape[0] != 1 || kernel.shape[1] != 1)
        throw std::invalid_argument("iterative_correlate expects [1,1,H,W] tensors");
    const int H = int(feature.shape[2]), W = int(feature.shape[3]);
    const int RH = int(kernel.shape[2]), RW = int(kernel.shape[3]);
    const int envX = kGridX * kInnerTileX, envF = kGridF * kInnerTileF;
    if (H > envX || W > envX || RH > envF || RW > envF)
        throw std::invalid_argument("operands exceed the tiling envelope");

    static const BilinearStage inner = [] {
        BilinearStage st = iterative_inner_stage();
        validate_stage(st, 3, 0x17e5a2ULL);
        return st;
    }();
    static const BilinearStage outer = [] {
        BilinearStage st = iterative_outer_stage();
        validate_stage(st, 3, 0x90b33cULL);
        return st;
    }();

    const int Ki = inner.channels(), Ko = outer.channels();
    const int nxi = inner.nx(), ngi = inner.ng(), nyi = inner.ny();
    const std::vector<double> bi = inner.B.to_double(), gi = inner.G.to_double(),
                              ai = inner.A.to_double();
    const std::vector<double> bo = outer.B.to_double(), go = outer.G.to_double(),
                              ao = outer.A.to_double();

    // Correlation via convolution with the flipped kernel.
    std::vector<double> flip(std::size_t(envF) * envF, 0.0);
    for (int r = 0; r < RH; ++r)
        for (int c = 0; c < RW; ++c)
            flip[std::size_t(RH - 1 - r) * envF + (RW - 1 - c)] = kernel.at4(0, 0, r, c);

    // Inner transforms. Feature tile (ur, uc) is embedded in an nxi-frame at
    // offset (ur, uc) so the outer stage sees uniform tap spacing.
    std::vector<double> zin(std::size_t(kGridX) * kGridX * Ki * Ki, 0.0);
    std::vector<double> frame(std::size_t(nxi) * nxi);
    std::vector<double> tmpi(std::size_t(Ki) * nxi);
    for (int ur = 0; ur < kGridX; ++ur)
        for (int uc = 0; uc < kGridX; ++uc) {
            std::fill(frame.begin(), frame.end(), 0.0);
            for (int r = 0; r < kInnerTileX; ++r)
                for (int c = 0; c < kInnerTileX; ++c) {
                    const int fr = kInnerTileX * ur + r, fc = kInnerTileX * uc + c;
                    frame[std::size_t(ur + r) * nxi + (uc + c)] =
                        (fr < H && fc < W) ? feature.at4(0, 0, fr, fc) : 0.0;
                }
            for (int i = 0; i < Ki; ++i)
                for (int j = 0; j < nxi; ++j) {
                    double acc = 0.0;
                    for (int k = 0; k < nxi; ++k)
                        acc += bi[std::size_t(i) * nxi + k] * frame[std::size_t(k) * nxi + j];
                    tmpi[std::size_t(i) * nxi + j] = acc;
                }
            double* dst = &zin[((std::size_t(ur) * kGridX) + uc) * Ki * Ki];
            for (int i = 0; i < Ki; ++i)
                for (int j = 0; j < Ki; ++j) {
                    double acc = 0.0;
                    for (int k = 0; k < nxi; ++k)
                        acc += tmpi[std::size_t(i) * nxi + k] * bi[std::size_t(j) * nxi + k];
                    dst[std::size_t(i) * Ki + j] = acc;
                }
        }

    std::vector<double> uin(std::size_t(kGridF) * kGridF * Ki * Ki, 0.0);
    std::vector<double> ftile(std::size_t(ngi) * ngi);
    std::vector<double> tmpf(std::size_t(Ki) * ngi);
    for (int vr = 0; vr < kGridF; ++vr)
        for (int vc = 0; vc < kGridF; ++vc) {
            for (int r = 0; r < ngi; ++r)
                for (int c = 0; c < ngi; ++c)
                    ftile[std::size_t(r) * ngi + c] =
                        flip[std::size_t(kInnerTileF * vr + r) * envF + (kInnerTileF * vc + c)];
            for (int i = 0; i < Ki; ++i)
                for (int j = 0; j < ngi; ++j) {
                    double acc = 0.0;
                    for (int k = 0; k < ngi; ++k)
                        acc += gi[std::size_t(i) * ngi + k] * ftile[std::size_t(k) * ngi + j];
                    tmpf[std::size_t(i) * ngi + j] = acc;
                }
            double* dst = &uin[((std::size_t(vr) * kGridF) + vc) * Ki * Ki];
            for (int i = 0; i < Ki; ++i)
                for (int j = 0; j < Ki; ++j) {
                    double acc = 0.0;
                    for (int k = 0; k < ngi; ++k)
                        acc += tmpf[std::size_t(i) * ngi + k] * gi[std::size_t(j) * ngi + k];
                    dst[std::size_t(i) * Ki + j] = acc;
                }
        }

    // Outer transforms across the tile grid, one (inner x inner) slot at a time.
    const std::size_t slots = std::size_t(Ki) * Ki;
    std::vector<double> zout(std::size_t(Ko) * Ko * slots, 0.0);
    std::vector<double> wout(std::size_t(Ko) * Ko * slots, 0.0);
    for (int p = 0; p < Ko; ++p)
        for (int q = 0; q < Ko; ++q) {
            double* zd = &zout[(std::size_t(p) * Ko + q) * slots];
            for (int ur = 0; ur < kGridX; ++ur) {
                const double bp = bo[std::size_t(p) * kGridX + ur];
                if (bp == 0.0) continue;
                for (int uc = 0; uc < kGridX; ++uc) {
                    const double c = bp * bo[std::size_t(q) * kGridX + uc];
                    if (c == 0.0) continue;
                    const double* src = &zin[((std::size_t(ur) * kGridX) + uc) * slots];
                    for (std::size_t s = 0; s < slots; ++s) zd[s] += c * src[s];
                }
            }
            double* wd = &wout[(std::size_t(p) * Ko + q) * slots];
            for (int vr = 0; vr < kGridF; ++vr) {
                const double gp = go[std::size_t(p) * kGridF + vr];
                if (gp == 0.0) continue;
                for (int vc = 0; vc < kGridF; ++vc) {
                    const double c = gp * go[std::size_t(q) * kGridF + vc];
                    if (c == 0.0) continue;
                    const double* src = &uin[((std::size_t(vr) * kGridF) + vc) * slots];
                    for (std::size_t s = 0; s < slots; ++s) wd[s] += c * src[s];
                }
            }
        }

    // The whole multiplicative cost of the method lives here.
    std::int64_t mults = 0;
    for (std::size_t i = 0; i < zout.size(); ++i) {
        zout[i] *= wout[i];
        ++mults;
    }

    // Outer inverse: collapse the Ko x Ko grid channels to output tile slots.
    const int nw = outer.ny();
    std::vector<double> cslot(std::size_t(nw) * nw * slots, 0.0);
    for (int wr = 0; wr < nw; ++wr)
        for (int wc = 0; wc < nw; ++wc) {
            double* cd = &cslot[(std::size_t(wr) * nw + wc) * slots];
            for (int p = 0; p < Ko; ++p) {
                const double ap = ao[std::size_t(p) * nw + wr];
                if (ap == 0.0) continue;
                for (int q = 0; q < Ko; ++q) {
                    const double c = ap * ao[std::size_t(q) * nw + wc];
                    if (c == 0.0) continue;
                    const double* src = &zout[(std::size_t(p) * Ko + q) * slots];
                    for (std::size_t s = 0; s < slots; ++s) cd[s] += c * src[s];
                }
            }
        }

    // Inner inverse and overlap-add assembly at tile stride.
    const int HO = H + RH - 1, WO = W + RW - 1;
    const int span = kInnerTileF * (nw - 1) + nyi;
    std::vector<double> assembled(std::size_t(span) * span, 0.0);
    std::vector<double> tmpo(std::size_t(nyi) * Ki);
    for (int wr = 0; wr < nw; ++wr)
        for (int wc = 0; wc < nw; ++wc) {
            const double* cd = &cslot[(std::size_t(wr) * nw + wc) * slots];
            for (int t = 0; t < nyi; ++t)
                for (int j = 0; j < Ki; ++j) {
                    double acc = 0.0;
                    for (int k = 0; k < Ki; ++k)
                        acc += ai[std::size_t(k) * nyi + t] * cd[std::size_t(k) * Ki + j];
                    tmpo[std::size_t(t) * Ki + j] = acc;
                }
            for (int t1 = 0; t1 < nyi; ++t1)
                for (int t2 = 0; t2 < nyi; ++t2) {
                    double acc = 0.0;
                    for (int k = 0; k < Ki; ++k)
                        acc += tmpo[std::size_t(t1) * Ki + k] * ai[std::size_t(k) * nyi + t2];
                    assembled[std::size_t(kInnerTileF * wr + t1) * span +
                              (kInnerTileF * wc + t2)] += acc;
                }
        }

    IterativeResult res;
    res.output = DenseTensor({1, 1, HO, WO});
    for (int r = 0; r < HO; ++r)
        for (int c = 0; c < WO; ++c)
            res.output.at4(0, 0, r, c) = assembled[std::size_t(r) * span + c];
    res.multiplications = mults;
    res.direct_multiplications =
        std::int64_t(H) * RH * std::int64_t(W) * RW;
    return res;
}

}  // namespace sfconv
