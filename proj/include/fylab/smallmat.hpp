#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace fylab {

// Dense symmetric matrix, row-major.
struct SymMatrix {
    int n = 0;
    std::vector<double> a;

    SymMatrix() = default;
    explicit SymMatrix(int dim) : n(dim), a(static_cast<std::size_t>(dim) * dim, 0.0) {}

    double& at(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
    double at(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }

    static SymMatrix identity(int dim);
    static SymMatrix diag(const std::vector<double>& d);

    // Throws std::invalid_argument on asymmetry beyond round-off or
    // non-finite entries.
    void validate() const;
    double frobenius() const;
};

struct EigenResult {
    std::vector<double> eigenvalues;  // sorted ascending
    double offdiag_residual = 0.0;
};

// A = J^T J for row-major J with `rows` rows (parameters) and `cols`
// columns (outputs).
SymMatrix gram(const std::vector<double>& J, int rows, int cols);

// Cyclic Jacobi sweeps until the off-diagonal Frobenius norm drops below
// tol * ||A||_F. Throws std::runtime_error after 100 sweeps.
EigenResult sym_eig(const SymMatrix& A, double tol = 1e-12);

// Per-row (center, radius) Gershgorin intervals.
std::vector<std::pair<double, double>> gershgorin(const SymMatrix& A);

// Sample Pearson correlation. Throws std::domain_error when either
// series is constant.
double pearson(const std::vector<double>& xs, const std::vector<double>& ys);

// Rolling Pearson over windows [t, t+window). Constant windows yield NaN.
std::vector<double> sliding_pearson(const std::vector<double>& xs,
                                    const std::vector<double>& ys,
                                    int window = 50);

}  // namespace fylab
