#include "sfconv/quant.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace sfconv {
namespace {

constexpr double kScaleFloor = 1e-8;

double group_absmax(const std::vector<double>& values) {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
}

double quant_group_mse(const std::vector<double>& values, double scale, int bits) {
    const std::int64_t qmax = (std::int64_t(1) << (bits - 1)) - 1;
    const std::int64_t qmin = -(std::int64_t(1) << (bits - 1));
    double err = 0.0;
    for (double v : values) {
        double q = std::nearbyint(v / scale);
        q = std::min(double(qmax), std::max(double(qmin), q));
        const double d = v - q * scale;
        err += d * d;
    }
    return err;
}

// Gathered transform-domain activations: [batch, tileH, tileW, C, K, K].
struct GatheredTiles {
    int B = 0, th = 0, tw = 0, C = 0, K = 0;
    std::vector<double> v;
    double& at(int b, int i, int j, int c, int r, int s) {
        return v[((((std::size_t(b) * th + i) * tw + j) * C + c) * K + r) * K + s];
    }
    double at(int b, int i, int j, int c, int r, int s) const {
        return v[((((std::size_t(b) * th + i) * tw + j) * C + c) * K + r) * K + s];
    }
};

GatheredTiles gather_tiles(const DenseTensor& input, const AlgorithmSpec& spec, int padding) {
    const int B = int(input.shape[0]), C = int(input.shape[1]);
    const int H = int(input.shape[2]), W = int(input.shape[3]);
    const int K = spec.K(), n = spec.n_in(), M = spec.M, R = spec.R;
    const int HO = H + 2 * padding - R + 1, WO = W + 2 * padding - R + 1;
    if (HO <= 0 || WO <= 0) throw std::invalid_argument("filter larger than padded input");

    GatheredTiles g;
    g.B = B;
    g.th = (HO + M - 1) / M;
    g.tw = (WO + M - 1) / M;
    g.C = C;
    g.K = K;
    g.v.assign(std::size_t(B) * g.th * g.tw * C * K * K, 0.0);

    const std::vector<double> bt = spec.BT.to_double();
    std::vector<double> window(std::size_t(n) * n), tmp(std::size_t(K) * n);
    for (int b = 0; b < B; ++b)
        for (int ti = 0; ti < g.th; ++ti)
            for (int tj = 0; tj < g.tw; ++tj) {
                const int ih0 = ti * M - padding, iw0 = tj * M - padding;
                for (int c = 0; c < C; ++c) {
                    for (int r = 0; r < n; ++r) {
                        const int ih = ih0 + r;
                        for (int s = 0; s < n; ++s) {
                            const int iw = iw0 + s;
                            window[std::size_t(r) * n + s] =
                                (ih >= 0 && ih < H && iw >= 0 && iw < W)
                                    ? input.at4(b, c, ih, iw)
                                    : 0.0;
                        }
                    }
                    for (int i = 0; i < K; ++i)
                        for (int j = 0; j < n; ++j) {
                            double acc = 0.0;
                            for (int k = 0; k < n; ++k)
                                acc += bt[std::size_t(i) * n + k] * window[std::size_t(k) * n + j];
                            tmp[std::size_t(i) * n + j] = acc;
                        }
                    for (int i = 0; i < K; ++i)
                        for (int j = 0; j < K; ++j) {
                            double acc = 0.0;
                            for (int k = 0; k < n; ++k)
                                acc += tmp[std::size_t(i) * n + k] * bt[std::size_t(j) * n + k];
                            g.at(b, ti, tj, c, i, j) = acc;
                        }
                }
            }
    return g;
}

double pick_scale(const std::vector<double>& values, const QuantConfig& cfg) {
    return cfg.search == ScaleSearch::MinMax ? scale_minmax(values, cfg.bits)
                                             : scale_mse_grid(values, cfg.bits);
}

}  // namespace

std::int64_t quantize_value(double v, double scale, int bits, std::int64_t* saturated) {
    const std::int64_t qmax = (std::int64_t(1) << (bits - 1)) - 1;
    const std::int64_t qmin = -(std::int64_t(1) << (bits - 1));
    double q = std::nearbyint(v / scale);
    std::int64_t qi = std::int64_t(q);
    if (qi > qmax) {
        qi = qmax;
        if (saturated) ++*saturated;
    } else if (qi < qmin) {
        qi = qmin;
        if (saturated) ++*saturated;
    }
    return qi;
}

double scale_minmax(const std::vector<double>& values, int bits) {
    const double qmax = double((std::int64_t(1) << (bits - 1)) - 1);
    return std::max(group_absmax(values) / qmax, kScaleFloor);
}

double scale_mse_grid(const std::vector<double>& values, int bits) {
    const double base = scale_minmax(values, bits);
    double best = base, best_err = quant_group_mse(values, base, bits);
    for (int i = 0; i < 100; ++i) {
        const double s = std::max(base * (0.3 + 0.7 * double(i) / 99.0), kScaleFloor);
        const double err = quant_group_mse(values, s, bits);
        if (err < best_err) {
            best_err = err;
            best = s;
        }
    }
    return best;
}

std::vector<double> frequency_energy(const DenseTensor& input, const AlgorithmSpec& spec,
                                     int padding) {
    const GatheredTiles g = gather_tiles(input, spec, padding);
    const int K = g.K;
    std::vector<double> energy(std::size_t(K) * K, 0.0);
    const std::size_t groups = g.v.size() / (std::size_t(K) * K);
    for (std::size_t grp = 0; grp < groups; ++grp)
        for (int i = 0; i < K; ++i)
            for (int j = 0; j < K; ++j) {
                const double v = g.v[(grp * K + std::size_t(i)) * K + j];
                energy[std::size_t(i) * K + j] += v * v;
            }
    for (auto& e : energy) e /= double(groups);
    return energy;
}

QuantReport quantized_fast_conv2d(const DenseTensor& input, const DenseTensor& filters,
                                  const AlgorithmSpec& spec, int padding,
                                  const QuantConfig& config) {
    if (config.bits < 2 || config.bits > 16)
        throw std::invalid_argument("quantization width must be between 2 and 16 bits");
    const int B = int(input.shape[0]), C = int(input.shape[1]);
    const int H = int(input.shape[2]), W = int(input.shape[3]);
    const int OC = int(filters.shape[0]);
    const int K = spec.K(), M = spec.M, R = spec.R;
    const int HO = H + 2 * padding - R + 1, WO = W + 2 * padding - R + 1;

    const GatheredTiles g = gather_tiles(input, spec, padding);
    const DenseTensor u = transform_filters(filters, spec);

    QuantReport rep;

    // --- activation scales ---
    const int freqs = K * K;
    std::vector<double> act_scale;  // one entry (PerTensor) or K*K entries
    if (config.act_scope == ActScaleScope::PerTensor) {
        act_scale.assign(1, pick_scale(g.v, config));
    } else {
        act_scale.assign(std::size_t(freqs), 0.0);
        const std::size_t groups = g.v.size() / std::size_t(freqs);
        std::vector<double> vals(groups);
        for (int f = 0; f < freqs; ++f) {
            for (std::size_t grp = 0; grp < groups; ++grp) vals[grp] = g.v[grp * freqs + f];
            act_scale[std::size_t(f)] = pick_scale(vals, config);
        }
    }

    // --- filter scales ---
    const int IC = C;
    std::vector<double> fil_scale;  // indexed by scope
    auto fil_scale_at = [&](int oc, int f) {
        switch (config.filter_scope) {
            case FilterScaleScope::PerChannel: return fil_scale[std::size_t(oc)];
            case FilterScaleScope::PerFrequency: return fil_scale[std::size_t(f)];
            default: return fil_scale[std::size_t(oc) * freqs + f];
        }
    };
    if (config.filter_scope == FilterScaleScope::PerChannel) {
        fil_scale.assign(std::size_t(OC), 0.0);
        std::vector<double> vals(std::size_t(IC) * freqs);
        for (int oc = 0; oc < OC; ++oc) {
            for (int ic = 0; ic < IC; ++ic)
                for (int f = 0; f < freqs; ++f)
                    vals[std::size_t(ic) * freqs + f] = u.at4(oc, ic, f / K, f % K);
            fil_scale[std::size_t(oc)] = pick_scale(vals, config);
        }
    } else if (config.filter_scope == FilterScaleScope::PerFrequency) {
        fil_scale.assign(std::size_t(freqs), 0.0);
        std::vector<double> vals(std::size_t(OC) * IC);
        for (int f = 0; f < freqs; ++f) {
            for (int oc = 0; oc < OC; ++oc)
                for (int ic = 0; ic < IC; ++ic)
                    vals[std::size_t(oc) * IC + ic] = u.at4(oc, ic, f / K, f % K);
            fil_scale[std::size_t(f)] = pick_scale(vals, config);
        }
    } else {
        fil_scale.assign(std::size_t(OC) * freqs, 0.0);
        std::vector<double> vals(IC);
        for (int oc = 0; oc < OC; ++oc)
            for (int f = 0; f < freqs; ++f) {
                for (int ic = 0; ic < IC; ++ic) vals[std::size_t(ic)] = u.at4(oc, ic, f / K, f % K);
                fil_scale[std::size_t(oc) * freqs + f] = pick_scale(vals, config);
            }
    }

    // --- quantize filters once ---
    std::vector<std::int64_t> uq(std::size_t(OC) * IC * freqs);
    for (int oc = 0; oc < OC; ++oc)
        for (int ic = 0; ic < IC; ++ic)
            for (int f = 0; f < freqs; ++f)
                uq[(std::size_t(oc) * IC + ic) * freqs + f] =
                    quantize_value(u.at4(oc, ic, f / K, f % K), fil_scale_at(oc, f),
                                   config.bits, &rep.saturations);
    rep.values_quantized += std::int64_t(uq.size());

    // --- main loop: quantize tiles, integer accumulate, dequantize, inverse ---
    std::vector<double> a = spec.A.to_double();
    for (auto& v : a) v /= double(spec.a_denom);

    rep.output = DenseTensor({B, OC, HO, WO});
    std::vector<std::int64_t> vq(std::size_t(C) * freqs);
    std::vector<std::int64_t> pacc(freqs);
    std::vector<double> pd(freqs), q(std::size_t(M) * K);
    for (int b = 0; b < g.B; ++b)
        for (int ti = 0; ti < g.th; ++ti)
            for (int tj = 0; tj < g.tw; ++tj) {
                for (int c = 0; c < C; ++c)
                    for (int f = 0; f < freqs; ++f) {
                        const double s = act_scale[config.act_scope == ActScaleScope::PerTensor
                                                       ? 0
                                                       : std::size_t(f)];
                        vq[std::size_t(c) * freqs + f] = quantize_value(
                            g.at(b, ti, tj, c, f / K, f % K), s, config.bits, &rep.saturations);
                    }
                rep.values_quantized += std::int64_t(C) * freqs;
                for (int oc = 0; oc < OC; ++oc) {
                    std::fill(pacc.begin(), pacc.end(), 0);
                    for (int ic = 0; ic < C; ++ic) {
                        const std::int64_t* uf = &uq[(std::size_t(oc) * IC + ic) * freqs];
                        const std::int64_t* vf = &vq[std::size_t(ic) * freqs];
                        for (int f = 0; f < freqs; ++f) pacc[std::size_t(f)] += uf[f] * vf[f];
                    }
                    for (int f = 0; f < freqs; ++f) {
                        const double sa = act_scale[config.act_scope == ActScaleScope::PerTensor
                                                        ? 0
                                                        : std::size_t(f)];
                        pd[std::size_t(f)] = double(pacc[std::size_t(f)]) * sa * fil_scale_at(oc, f);
                    }
                    for (int t = 0; t < M; ++t)
                        for (int j = 0; j < K; ++j) {
                            double acc = 0.0;
                            for (int k = 0; k < K; ++k)
                                acc += a[std::size_t(k) * M + t] * pd[std::size_t(k) * K + j];
                            q[std::size_t(t) * K + j] = acc;
                        }
                    const int oh0 = ti * M, ow0 = tj * M;
                    for (int t1 = 0; t1 < M && oh0 + t1 < HO; ++t1)
                        for (int t2 = 0; t2 < M && ow0 + t2 < WO; ++t2) {
                            double acc = 0.0;
                            for (int k = 0; k < K; ++k)
                                acc += q[std::size_t(t1) * K + k] * a[std::size_t(k) * M + t2];
                            rep.output.at4(b, oc, oh0 + t1, ow0 + t2) = acc;
                        }
                }
            }

    const DenseTensor ref = direct_conv2d(input, filters, 1, padding);
    double err = 0.0, sig = 0.0;
    for (std::size_t i = 0; i < ref.data.size(); ++i) {
        const double d = rep.output.data[i] - ref.data[i];
        err += d * d;
        sig += ref.data[i] * ref.data[i];
    }
    rep.mse = err / double(ref.data.size());
    rep.signal_energy = sig / double(ref.data.size());
    rep.snr_db = 10.0 * std::log10(sig / std::max(err, 1e-300));
    return rep;
}

}  // namespace sfconv
