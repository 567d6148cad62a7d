#pragma once
// Numerical analysis helpers: conditioning of the transform that governs a
// tile's error growth, a reduced-mantissa simulation of half-precision
// arithmetic, and a bit-operation cost model for quantized deployments.

#include <cstdint>
#include <string>
#include <vector>

#include "sfconv/spec.hpp"
#include "sfconv/tensor.hpp"

namespace sfconv {

// Singular values by one-sided Jacobi rotations, descending.
std::vector<double> singular_values(std::vector<double> a, int rows, int cols);

// 2-norm condition number of a matrix (sigma_max / sigma_min).
double condition_number(const RatMatrix& m);

// Round a double to an 11-bit mantissa, ties to even. Mirrors binary16
// arithmetic for values whose exponent stays in range.
double rne11(double v);

struct HalfSimResult {
    double mse = 0.0;        // squared error per output element vs the fp64 oracle
    double mse_direct = 0.0; // same protocol applied to the plain evaluation
    double ratio = 0.0;      // mse / mse_direct
};

// Runs the tile pipeline with transformed operands and their products rounded
// to 11-bit mantissas, everything else in fp64. Inputs and filters are drawn
// standard-normal. The direct evaluation under the same rounding protocol
// provides the normalizer.
HalfSimResult half_precision_mse(const AlgorithmSpec& spec, int trials, std::uint64_t seed);

struct BoundCheck {
    double kappa = 0.0;      // condition number of the overlap form
    double max_ratio = 0.0;  // worst observed error growth / perturbation size
    bool ok = false;         // max_ratio <= kappa (plus rounding slack)
};

// Perturbs random inputs through the overlap form and verifies the relative
// output error never exceeds the condition number times the relative input
// perturbation.
BoundCheck error_bound_check(const AlgorithmSpec& spec, int trials, std::uint64_t seed);

// --- bit-operation cost model -------------------------------------------------
//
// One b-bit multiply costs b*(b-1) bit operations; one addition costs as many
// bit operations as its operand width. Transform additions run at the
// activation width, channel accumulation and the output transform at the
// accumulator width. Elementwise products use the reduced schedule when the
// algorithm has one.

struct BopsBreakdown {
    double input_transform = 0.0;
    double filter_transform = 0.0;
    double output_transform = 0.0;
    double products = 0.0;
    double accumulation = 0.0;
    double total() const {
        return input_transform + filter_transform + output_transform + products + accumulation;
    }
};

// Additions of one 1-d application of each transform stage.
int transform_adds_input(const AlgorithmSpec& spec);   // BT row apply
int transform_adds_filter(const AlgorithmSpec& spec);  // G row apply
int transform_adds_output(const AlgorithmSpec& spec);  // A column apply

BopsBreakdown bops_for_layer(const AlgorithmSpec& spec, const LayerConfig& layer,
                             int act_bits = 8, int acc_bits = 32);

// Fixed-order summary of every catalog algorithm: multiply counts, complexity
// relative to the direct method, and the overlap-form condition number.
std::string catalog_table_csv();

}  // namespace sfconv
