#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sfconv/rational.hpp"

namespace sfconv {

enum class AlgoFamily { Direct, Winograd, Sfc };

// One boundary-repair product. The window transform misses sample `desired`
// and double-counts `wrapped` (they alias modulo N), so one extra product of
// (x[desired] - x[wrapped]) against filter tap `tap` patches output `out`.
struct CorrectionTerm {
    int out = 0;
    int desired = 0;
    int wrapped = 0;
    int tap = 0;
    friend bool operator==(const CorrectionTerm& a, const CorrectionTerm& b) {
        return a.out == b.out && a.desired == b.desired && a.wrapped == b.wrapped && a.tap == b.tap;
    }
};

// Rows (a, b, c) of the transforms forming one conjugate channel triple per
// axis: row c is the elementwise sum of rows a and b in both B^T and G, the
// Karatsuba evaluation pattern for one complex frequency.
struct TripleChannels {
    int a = 0, b = 0, c = 0;
};

// A 2D tile convolution algorithm y = A^T [(G f G^T) .* (B^T x B)] A, stored
// in per-axis form. A holds integer entries; the 1/a_denom fold is applied
// once per axis at the output stage.
struct AlgorithmSpec {
    std::string name;
    AlgoFamily family = AlgoFamily::Direct;
    int N = 0;       // transform period (SFC) or interpolation size (Winograd)
    int M = 0;       // output tile edge
    int R = 0;       // kernel edge
    int offset = 0;  // window placement of the transform inside the input tile
    RatMatrix BT;    // K x n_in input transform
    RatMatrix G;     // K x R filter transform
    RatMatrix A;     // K x M output transform (column per output)
    std::int64_t a_denom = 1;
    RatMatrix overlap_form;  // square transform whose conditioning governs error growth
    std::vector<CorrectionTerm> corrections;
    std::vector<TripleChannels> triples;

    int K() const { return BT.rows; }
    int n_in() const { return BT.cols; }
    long mults_full() const { return long(K()) * K(); }
    long mults_reduced() const {
        long t = long(triples.size());
        return mults_full() - 3 * t * t;
    }
    // Multiplications per output sample relative to direct convolution.
    double complexity_pct() const {
        return 100.0 * double(mults_reduced()) / (double(M) * M * R * R);
    }
};

// Toom-Cook style algorithm over the given finite interpolation points plus
// the point at infinity; points.size() must equal m + r - 2.
AlgorithmSpec generate_winograd(int m, int r, const std::vector<Rat>& points);

// Symbolic-Fourier algorithm with correction products for the samples the
// length-N window cannot reach. N in {4, 6}.
AlgorithmSpec derive_correction_spec(int N, int M, int R);

AlgorithmSpec make_direct_spec(int R);

// --- catalog ---

const AlgorithmSpec& catalog_algorithm(const std::string& name);
const std::vector<std::string>& catalog_names();   // fixed presentation order
std::string catalog_export_json();
std::uint64_t catalog_hash();

// --- exact validation / repair ---

struct ValidationReport {
    bool ok = false;
    int trials = 0;
    long mismatches = 0;
    std::string detail;
};

// Exact-arithmetic gate: correlates random integer tiles (entries in [-8, 8])
// through the algorithm and through direct big-integer correlation, requiring
// bit-for-bit equality.
ValidationReport validate_algorithm(const AlgorithmSpec& spec, int trials, std::uint64_t seed);

// Exact single-tile execution, exposed for tests and the validation gate.
// x is n_in x n_in, f is R x R, result is the M x M valid correlation.
std::vector<std::int64_t> execute_tile_exact(const AlgorithmSpec& spec,
                                             const std::vector<std::int64_t>& x,
                                             const std::vector<std::int64_t>& f);

struct RepairResult {
    AlgorithmSpec spec;
    std::vector<std::string> changes;  // "B[7][4]: 1 -> -1" style entries
};

// Re-solves one transform of a defective spec from the other two through the
// exact linear constraints of valid correlation. Tries A, then B^T, then G;
// throws std::domain_error if none admits a solution.
RepairResult repair_matrix(const AlgorithmSpec& broken);

}  // namespace sfconv
