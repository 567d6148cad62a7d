#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace sfconv {

// Exact rational arithmetic on 64-bit integers. Catalog matrices are small;
// an overflow here means a bug upstream, not a capacity problem, so every
// operation checks and throws instead of wrapping.
struct Rat {
    std::int64_t num = 0;
    std::int64_t den = 1;

    Rat() = default;
    Rat(std::int64_t n) : num(n), den(1) {}
    Rat(std::int64_t n, std::int64_t d) : num(n), den(d) { normalize(); }

    void normalize() {
        if (den == 0) throw std::domain_error("rational with zero denominator");
        if (den < 0) { num = checked_neg(num); den = checked_neg(den); }
        std::int64_t g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) { num /= g; den /= g; }
    }

    static std::int64_t checked_add(std::int64_t a, std::int64_t b) {
        std::int64_t r;
        if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("rational add overflow");
        return r;
    }
    static std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
        std::int64_t r;
        if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("rational mul overflow");
        return r;
    }
    static std::int64_t checked_neg(std::int64_t a) {
        std::int64_t r;
        if (__builtin_sub_overflow(std::int64_t{0}, a, &r)) throw std::overflow_error("rational negate overflow");
        return r;
    }

    friend Rat operator+(const Rat& a, const Rat& b) {
        std::int64_t g = std::gcd(a.den, b.den);
        std::int64_t bd = b.den / g;
        std::int64_t n = checked_add(checked_mul(a.num, bd), checked_mul(b.num, a.den / g));
        return Rat(n, checked_mul(a.den, bd));
    }
    friend Rat operator-(const Rat& a) { return Rat(checked_neg(a.num), a.den); }
    friend Rat operator-(const Rat& a, const Rat& b) { return a + (-b); }
    friend Rat operator*(const Rat& a, const Rat& b) {
        std::int64_t g1 = std::gcd(a.num < 0 ? -a.num : a.num, b.den);
        std::int64_t g2 = std::gcd(b.num < 0 ? -b.num : b.num, a.den);
        return Rat(checked_mul(a.num / g1, b.num / g2),
                   checked_mul(a.den / g2, b.den / g1));
    }
    friend Rat operator/(const Rat& a, const Rat& b) {
        if (b.num == 0) throw std::domain_error("rational division by zero");
        return a * Rat(b.den, b.num);
    }
    Rat& operator+=(const Rat& o) { *this = *this + o; return *this; }
    Rat& operator-=(const Rat& o) { *this = *this - o; return *this; }
    Rat& operator*=(const Rat& o) { *this = *this * o; return *this; }

    friend bool operator==(const Rat& a, const Rat& b) { return a.num == b.num && a.den == b.den; }
    friend bool operator!=(const Rat& a, const Rat& b) { return !(a == b); }

    bool is_zero() const { return num == 0; }
    double to_double() const { return double(num) / double(den); }
    std::string str() const {
        return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
    }
};

// Dense row-major matrix of exact rationals.
struct RatMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<Rat> a;

    RatMatrix() = default;
    RatMatrix(int r, int c) : rows(r), cols(c), a(std::size_t(r) * c) {}
    RatMatrix(std::initializer_list<std::initializer_list<std::int64_t>> init) {
        rows = int(init.size());
        cols = rows ? int(init.begin()->size()) : 0;
        a.reserve(std::size_t(rows) * cols);
        for (auto& row : init) {
            if (int(row.size()) != cols) throw std::invalid_argument("ragged matrix initializer");
            for (auto v : row) a.push_back(Rat(v));
        }
    }

    Rat& at(int r, int c) { return a[std::size_t(r) * cols + c]; }
    const Rat& at(int r, int c) const { return a[std::size_t(r) * cols + c]; }

    static RatMatrix identity(int n) {
        RatMatrix m(n, n);
        for (int i = 0; i < n; ++i) m.at(i, i) = Rat(1);
        return m;
    }

    RatMatrix transposed() const {
        RatMatrix t(cols, rows);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) t.at(j, i) = at(i, j);
        return t;
    }

    friend RatMatrix operator*(const RatMatrix& x, const RatMatrix& y) {
        if (x.cols != y.rows) throw std::invalid_argument("matrix dimension mismatch");
        RatMatrix r(x.rows, y.cols);
        for (int i = 0; i < x.rows; ++i)
            for (int k = 0; k < x.cols; ++k) {
                const Rat& xv = x.at(i, k);
                if (xv.is_zero()) continue;
                for (int j = 0; j < y.cols; ++j)
                    r.at(i, j) += xv * y.at(k, j);
            }
        return r;
    }

    friend bool operator==(const RatMatrix& x, const RatMatrix& y) {
        return x.rows == y.rows && x.cols == y.cols && x.a == y.a;
    }

    // Exact inverse by Gauss-Jordan elimination with partial (first nonzero) pivoting.
    RatMatrix inverse() const {
        if (rows != cols) throw std::invalid_argument("inverse of non-square matrix");
        int n = rows;
        RatMatrix aug(n, 2 * n);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) aug.at(i, j) = at(i, j);
            aug.at(i, n + i) = Rat(1);
        }
        for (int col = 0; col < n; ++col) {
            int piv = -1;
            for (int r = col; r < n; ++r)
                if (!aug.at(r, col).is_zero()) { piv = r; break; }
            if (piv < 0) throw std::domain_error("singular matrix");
            if (piv != col)
                for (int j = 0; j < 2 * n; ++j) std::swap(aug.at(piv, j), aug.at(col, j));
            Rat p = aug.at(col, col);
            for (int j = 0; j < 2 * n; ++j) aug.at(col, j) = aug.at(col, j) / p;
            for (int r = 0; r < n; ++r) {
                if (r == col || aug.at(r, col).is_zero()) continue;
                Rat f = aug.at(r, col);
                for (int j = 0; j < 2 * n; ++j)
                    aug.at(r, j) -= f * aug.at(col, j);
            }
        }
        RatMatrix inv(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) inv.at(i, j) = aug.at(i, n + j);
        return inv;
    }

    std::vector<double> to_double() const {
        std::vector<double> d(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i].to_double();
        return d;
    }
};

// Solve M x = b exactly. Throws std::domain_error when the system is
// inconsistent; for underdetermined consistent systems free variables are 0.
std::vector<Rat> solve_exact(const RatMatrix& M, const std::vector<Rat>& b);

}  // namespace sfconv
