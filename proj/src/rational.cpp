#include "sfconv/rational.hpp"

namespace sfconv {

std::vector<Rat> solve_exact(const RatMatrix& M, const std::vector<Rat>& b) {
    if (int(b.size()) != M.rows) throw std::invalid_argument("solve_exact: rhs size mismatch");
    int m = M.rows, n = M.cols;
    RatMatrix aug(m, n + 1);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n; ++j) aug.at(i, j) = M.at(i, j);
        aug.at(i, n) = b[i];
    }
    std::vector<int> pivot_col(m, -1);
    int row = 0;
    for (int col = 0; col < n && row < m; ++col) {
        int piv = -1;
        for (int r = row; r < m; ++r)
            if (!aug.at(r, col).is_zero()) { piv = r; break; }
        if (piv < 0) continue;
        if (piv != row)
            for (int j = 0; j <= n; ++j) std::swap(aug.at(piv, j), aug.at(row, j));
        Rat p = aug.at(row, col);
        for (int j = col; j <= n; ++j) aug.at(row, j) = aug.at(row, j) / p;
        for (int r = 0; r < m; ++r) {
            if (r == row || aug.at(r, col).is_zero()) continue;
            Rat f = aug.at(r, col);
            for (int j = col; j <= n; ++j) aug.at(r, j) -= f * aug.at(row, j);
        }
        pivot_col[row] = col;
        ++row;
    }
    for (int r = row; r < m; ++r)
        if (!aug.at(r, n).is_zero()) throw std::domain_error("solve_exact: inconsistent system");
    std::vector<Rat> x(n, Rat(0));
    for (int r = 0; r < row; ++r) x[pivot_col[r]] = aug.at(r, n);
    return x;
}

}  // namespace sfconv
