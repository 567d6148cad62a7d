#pragma once
// Two-level tiled full convolution: an outer transform over the tile grid is
// composed with an inner transform over tile contents, so a kernel larger than
// the feature map is handled without ever materialising the direct loop.

#include <cstdint>

#include "sfconv/spec.hpp"
#include "sfconv/tensor.hpp"

namespace sfconv {

// One level of the nesting: y = A^T ((B x) . (G g)) computes the full 1-d
// polynomial product of an nx-tap and an ng-tap sequence.
struct BilinearStage {
    RatMatrix B;  // K x nx
    RatMatrix G;  // K x ng
    RatMatrix A;  // K x (nx + ng - 1)

    int channels() const { return B.rows; }
    int nx() const { return B.cols; }
    int ng() const { return G.cols; }
    int ny() const { return B.cols + G.cols - 1; }
};

// Inner level: 10-tap by 5-tap product in 18 channels (two interpolation
// blocks on the 5-tap halves of the long side).
BilinearStage iterative_inner_stage();

// Outer level: 5-element by 6-element tile-sequence product in 18 channels
// (period-6 transform channels plus single-product wrap corrections).
BilinearStage iterative_outer_stage();

// Exact check that a stage reproduces the polynomial product; throws on
// failure.
void validate_stage(const BilinearStage& stage, int trials, std::uint64_t seed);

struct IterativeResult {
    DenseTensor output;                        // [1, 1, H+R-1, W+R-1]
    std::int64_t multiplications = 0;          // transform-domain products executed
    std::int64_t direct_multiplications = 0;   // products the direct loop would use
};

// Full 2-d correlation of a feature map (at most 30x30) with a kernel (at most
// 30x30, typically larger than the feature). Both tensors are [1, 1, H, W].
IterativeResult iterative_correlate(const DenseTensor& feature, const DenseTensor& kernel);

}  // namespace sfconv
