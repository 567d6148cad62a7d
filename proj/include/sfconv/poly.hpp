#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "sfconv/rational.hpp"

namespace sfconv {

// First-order polynomial c0 + c1*s in the primitive N-th root of unity s.
// Every power of s reduces to this form through the defining relation of s:
//   N=6: s^2 = s - 1      (s = exp(i*pi/3))
//   N=4: s^2 = -1         (s = i)
//   N=3: s^2 = -s - 1     (s = exp(i*2*pi/3))
// Coefficients stay integral under add/sub/mul, which is the whole point:
// transform application never needs irrational arithmetic.
struct PolyElement {
    std::int64_t c0 = 0;
    std::int64_t c1 = 0;

    friend PolyElement operator+(PolyElement a, PolyElement b) { return {a.c0 + b.c0, a.c1 + b.c1}; }
    friend PolyElement operator-(PolyElement a, PolyElement b) { return {a.c0 - b.c0, a.c1 - b.c1}; }
    friend PolyElement operator-(PolyElement a) { return {-a.c0, -a.c1}; }
    friend bool operator==(PolyElement a, PolyElement b) { return a.c0 == b.c0 && a.c1 == b.c1; }
};

// Collapse a quadratic c0 + c1*s + c2*s^2 back to first order.
inline PolyElement poly_reduce(std::int64_t c0, std::int64_t c1, std::int64_t c2, int N) {
    switch (N) {
        case 6: return {c0 - c2, c1 + c2};
        case 4: return {c0 - c2, c1};
        case 3: return {c0 - c2, c1 - c2};
        default: throw std::invalid_argument("poly_reduce: N must be 3, 4 or 6");
    }
}

inline PolyElement poly_mul(PolyElement a, PolyElement b, int N) {
    return poly_reduce(a.c0 * b.c0, a.c0 * b.c1 + a.c1 * b.c0, a.c1 * b.c1, N);
}

// Complex conjugation expressed on coefficients; uses conj(s) = s^(N-1).
inline PolyElement poly_conj(PolyElement a, int N) {
    switch (N) {
        case 6: return {a.c0 + a.c1, -a.c1};
        case 4: return {a.c0, -a.c1};
        case 3: return {a.c0 - a.c1, -a.c1};
        default: throw std::invalid_argument("poly_conj: N must be 3, 4 or 6");
    }
}

inline std::complex<double> poly_to_complex(PolyElement a, int N) {
    double theta = 2.0 * 3.14159265358979323846 / N;
    std::complex<double> s(std::cos(theta), std::sin(theta));
    return std::complex<double>(double(a.c0), 0.0) + double(a.c1) * s;
}

// One frequency channel of the symbolic transform. Real channels occupy a
// single row of F; complex channels occupy two (real part, s-coefficient),
// and their Hermitian partner frequency is implied rather than stored.
struct SftChannel {
    int freq = 0;
    bool complex_pair = false;  // true: rows {row, row+1} hold (c0, c1) parts
    int row = 0;
};

// Symbolic Fourier transform plan for N in {3, 4, 6}.
struct SymbolicDftPlan {
    int N = 0;
    std::vector<std::vector<PolyElement>> W;   // W[m][t] = s^(-m*t), full N x N
    RatMatrix F;                               // N x N integer component rows
    std::vector<SftChannel> channels;          // row pairing bookkeeping
    std::vector<std::vector<PolyElement>> iF;  // s^(+m*t) / denom, exact inverse of W
    std::int64_t iF_denom = 1;                 // the 1/N fold
    RatMatrix component_inverse;               // exact rational inverse of F
};

SymbolicDftPlan build_sft(int N);

// Fast in-register application schedules. Return values are fresh vectors of
// length N; add counts are the documented costs used by the BOPs model.
std::vector<double> sft6_apply_fast(const double* x);  // 14 additions
std::vector<double> sft4_apply_fast(const double* x);  // 6 additions
int sft_addition_count(int N);

}  // namespace sfconv
