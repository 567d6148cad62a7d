#pragma once
// Integer simulation of the transform-domain pipeline: transformed activations
// and filters are quantized to b bits with symmetric scales, products are
// accumulated in 64-bit integers across input channels, and dequantization
// happens only after the channel sum so every supported scale grouping stays
// exact with respect to the accumulation order.

#include <cstdint>

#include "sfconv/conv.hpp"
#include "sfconv/spec.hpp"
#include "sfconv/tensor.hpp"

namespace sfconv {

enum class ActScaleScope { PerTensor, PerFrequency };
enum class FilterScaleScope { PerChannel, PerFrequency, PerChannelFrequency };
enum class ScaleSearch { MinMax, MseGrid };

struct QuantConfig {
    int bits = 8;
    ActScaleScope act_scope = ActScaleScope::PerTensor;
    FilterScaleScope filter_scope = FilterScaleScope::PerChannel;
    ScaleSearch search = ScaleSearch::MinMax;
};

struct QuantReport {
    DenseTensor output;
    double mse = 0.0;          // against the float64 direct result
    double signal_energy = 0.0;
    double snr_db = 0.0;
    std::int64_t saturations = 0;
    std::int64_t values_quantized = 0;
};

// Round-to-nearest-even quantization of v at the given scale; the value is
// clamped to the signed b-bit range and *saturated is bumped when clamping
// actually changed the result.
std::int64_t quantize_value(double v, double scale, int bits, std::int64_t* saturated);

// Symmetric scale choices for a group of values.
double scale_minmax(const std::vector<double>& values, int bits);
double scale_mse_grid(const std::vector<double>& values, int bits);

// Mean squared transform-domain magnitude per frequency position, taken over
// every tile and channel. Useful for judging how unevenly the transform
// spreads energy (and hence what per-frequency scaling buys).
std::vector<double> frequency_energy(const DenseTensor& input, const AlgorithmSpec& spec,
                                     int padding = 0);

QuantReport quantized_fast_conv2d(const DenseTensor& input, const DenseTensor& filters,
                                  const AlgorithmSpec& spec, int padding,
                                  const QuantConfig& config);

}  // namespace sfconv
