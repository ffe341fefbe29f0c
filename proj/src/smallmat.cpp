#include "fylab/smallmat.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace fylab {

SymMatrix SymMatrix::identity(int dim) {
    SymMatrix m(dim);
    for (int i = 0; i < dim; ++i) m.at(i, i) = 1.0;
    return m;
}

SymMatrix SymMatrix::diag(const std::vector<double>& d) {
    SymMatrix m(static_cast<int>(d.size()));
    for (int i = 0; i < m.n; ++i) m.at(i, i) = d[i];
    return m;
}

void SymMatrix::validate() const {
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            double x = at(i, j), y = at(j, i);
            if (!std::isfinite(x) || !std::isfinite(y)) {
                throw std::invalid_argument("SymMatrix: non-finite entry");
            }
            if (std::abs(x - y) > 1e-12 * std::max(1.0, std::abs(x))) {
                throw std::invalid_argument("SymMatrix: not symmetric");
            }
        }
    }
}

double SymMatrix::frobenius() const {
    double s = 0.0;
    for (double x : a) s += x * x;
    return std::sqrt(s);
}

SymMatrix gram(const std::vector<double>& J, int rows, int cols) {
    if (rows < 0 || cols <= 0 ||
        J.size() != static_cast<std::size_t>(rows) * cols) {
        throw std::invalid_argument("gram: bad shape");
    }
    for (double x : J) {
        if (!std::isfinite(x)) throw std::invalid_argument("gram: non-finite entry");
    }
    SymMatrix A(cols);
    for (int r = 0; r < rows; ++r) {
        const double* row = J.data() + static_cast<std::size_t>(r) * cols;
        for (int i = 0; i < cols; ++i) {
            double ji = row[i];
            if (ji == 0.0) continue;
            for (int j = i; j < cols; ++j) {
                A.at(i, j) += ji * row[j];
            }
        }
    }
    for (int i = 0; i < cols; ++i) {
        for (int j = 0; j < i; ++j) A.at(i, j) = A.at(j, i);
    }
    return A;
}

namespace {

double offdiag_norm(const SymMatrix& A) {
    double s = 0.0;
    for (int i = 0; i < A.n; ++i) {
        for (int j = i + 1; j < A.n; ++j) s += 2.0 * A.at(i, j) * A.at(i, j);
    }
    return std::sqrt(s);
}

}  // namespace

EigenResult sym_eig(const SymMatrix& A0, double tol) {
    A0.validate();
    if (A0.n > 256) throw std::invalid_argument("sym_eig: dimension > 256");
    SymMatrix A = A0;
    const int n = A.n;
    const double fro = A.frobenius();
    const double target = tol * std::max(fro, 1e-300);

    int sweep = 0;
    double res = offdiag_norm(A);
    while (res > target) {
        if (++sweep > 100) {
            std::ostringstream os;
            os << "sym_eig: no convergence in 100 sweeps, residual " << res;
            throw std::runtime_error(os.str());
        }
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                double apq = A.at(p, q);
                if (std::abs(apq) <= 1e-300) {
                    A.at(p, q) = A.at(q, p) = 0.0;
                    continue;
                }
                double theta = (A.at(q, q) - A.at(p, p)) / (2.0 * apq);
                double t = (theta >= 0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;
                double tau = s / (1.0 + c);
                double app = A.at(p, p), aqq = A.at(q, q);
                A.at(p, p) = app - t * apq;
                A.at(q, q) = aqq + t * apq;
                A.at(p, q) = A.at(q, p) = 0.0;
                for (int r = 0; r < n; ++r) {
                    if (r == p || r == q) continue;
                    double arp = A.at(r, p), arq = A.at(r, q);
                    A.at(r, p) = A.at(p, r) = arp - s * (arq + tau * arp);
                    A.at(r, q) = A.at(q, r) = arq + s * (arp - tau * arq);
                }
            }
        }
        res = offdiag_norm(A);
    }

    EigenResult out;
    out.offdiag_residual = res;
    out.eigenvalues.resize(n);
    for (int i = 0; i < n; ++i) out.eigenvalues[i] = A.at(i, i);
    std::sort(out.eigenvalues.begin(), out.eigenvalues.end());
    return out;
}

std::vector<std::pair<double, double>> gershgorin(const SymMatrix& A) {
    A.validate();
    std::vector<std::pair<double, double>> out;
    out.reserve(A.n);
    for (int i = 0; i < A.n; ++i) {
        double r = 0.0;
        for (int j = 0; j < A.n; ++j) {
            if (j != i) r += std::abs(A.at(i, j));
        }
        out.emplace_back(A.at(i, i), r);
    }
    return out;
}

double pearson(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2) {
        throw std::invalid_argument("pearson: need equal lengths >= 2");
    }
    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double dx = xs[i] - mx, dy = ys[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0.0 || syy == 0.0) {
        throw std::domain_error("pearson: constant series");
    }
    double r = sxy / std::sqrt(sxx * syy);
    return std::clamp(r, -1.0, 1.0);
}

std::vector<double> sliding_pearson(const std::vector<double>& xs,
                                    const std::vector<double>& ys,
                                    int window) {
    if (window < 2) throw std::invalid_argument("sliding_pearson: window < 2");
    if (xs.size() != ys.size() || xs.size() < static_cast<std::size_t>(window)) {
        throw std::invalid_argument("sliding_pearson: series shorter than window");
    }
    std::vector<double> out;
    out.reserve(xs.size() - window + 1);
    for (std::size_t t = 0; t + window <= xs.size(); ++t) {
        std::vector<double> wx(xs.begin() + t, xs.begin() + t + window);
        std::vector<double> wy(ys.begin() + t, ys.begin() + t + window);
        try {
            out.push_back(pearson(wx, wy));
        } catch (const std::domain_error&) {
            out.push_back(std::numeric_limits<double>::quiet_NaN());
        }
    }
    return out;
}

}  // namespace fylab
