#pragma once
// Convolution engines: a plain direct evaluator plus the tiled transform-domain
// path driven by an AlgorithmSpec from the catalog.

#include <cstdint>

#include "sfconv/spec.hpp"
#include "sfconv/tensor.hpp"

namespace sfconv {

struct ConvCounters {
    std::int64_t multiplications = 0;  // elementwise transform-domain products
    std::int64_t tiles = 0;            // output tiles processed (per image/channel pair group)
};

struct FastConvOptions {
    int threads = 1;
    bool reduced_products = false;  // use the paired-channel product schedule
    ConvCounters* counters = nullptr;
};

// Plain correlation, NCHW in double precision. Arbitrary stride and symmetric
// zero padding. Filters are [OC, IC, R, R].
DenseTensor direct_conv2d(const DenseTensor& input, const DenseTensor& filters,
                          int stride = 1, int padding = 0);

// G f G^T for every (oc, ic) pair; result is [OC, IC, K, K].
DenseTensor transform_filters(const DenseTensor& filters, const AlgorithmSpec& spec);

// Tiled transform-domain correlation (stride 1 only). Tile products are summed
// across input channels in the transform domain; the output transform runs once
// per accumulated tile. Matches direct_conv2d up to floating-point rounding.
DenseTensor fast_conv2d(const DenseTensor& input, const DenseTensor& filters,
                        const AlgorithmSpec& spec, int padding = 0,
                        const FastConvOptions& opts = {});

}  // namespace sfconv
