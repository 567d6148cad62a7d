#include "sfconv/poly.hpp"

namespace sfconv {

namespace {

// s^k reduced to first order, k taken modulo N.
PolyElement root_power(int k, int N) {
    k %= N;
    if (k < 0) k += N;
    PolyElement p{1, 0};
    PolyElement s{0, 1};
    for (int i = 0; i < k; ++i) p = poly_mul(p, s, N);
    return p;
}

}  // namespace

SymbolicDftPlan build_sft(int N) {
    if (N != 3 && N != 4 && N != 6) throw std::invalid_argument("build_sft: N must be 3, 4 or 6");
    SymbolicDftPlan plan;
    plan.N = N;
    plan.W.assign(N, std::vector<PolyElement>(N));
    plan.iF.assign(N, std::vector<PolyElement>(N));
    for (int m = 0; m < N; ++m)
        for (int t = 0; t < N; ++t) {
            plan.W[m][t] = root_power(-m * t, N);
            plan.iF[t][m] = root_power(m * t, N);
        }
    plan.iF_denom = N;

    // Component rows: frequencies 0..N/2 cover everything real data needs,
    // the remaining channels being conjugates of these.
    plan.F = RatMatrix(N, N);
    int row = 0;
    for (int m = 0; m <= N / 2; ++m) {
        bool is_real = (m == 0) || (2 * m == N);
        SftChannel ch;
        ch.freq = m;
        ch.row = row;
        ch.complex_pair = !is_real;
        plan.channels.push_back(ch);
        for (int t = 0; t < N; ++t) plan.F.at(row, t) = Rat(plan.W[m][t].c0);
        ++row;
        if (!is_real) {
            for (int t = 0; t < N; ++t) plan.F.at(row, t) = Rat(plan.W[m][t].c1);
            ++row;
        }
    }
    if (row != N) throw std::logic_error("build_sft: channel rows do not fill the matrix");
    plan.component_inverse = plan.F.inverse();
    return plan;
}

std::vector<double> sft6_apply_fast(const double* x) {
    double a = x[0] + x[3], b = x[1] + x[4], c = x[2] + x[5];
    double d = x[0] - x[3], e = x[1] - x[4], f = x[2] - x[5];
    std::vector<double> y(6);
    y[0] = (a + b) + c;
    y[1] = d + e;
    y[2] = -(e + f);
    y[3] = a - c;
    y[4] = c - b;
    y[5] = (d - e) + f;
    return y;
}

std::vector<double> sft4_apply_fast(const double* x) {
    double t0 = x[0] + x[2], t1 = x[1] + x[3];
    std::vector<double> y(4);
    y[0] = t0 + t1;
    y[1] = x[0] - x[2];
    y[2] = x[3] - x[1];
    y[3] = t0 - t1;
    return y;
}

int sft_addition_count(int N) {
    switch (N) {
        case 6: return 14;
        case 4: return 6;
        case 3: return 4;
        default: throw std::invalid_argument("sft_addition_count: N must be 3, 4 or 6");
    }
}

}  // namespace sfconv
