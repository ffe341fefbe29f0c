#include "fylab/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace fylab {

double fitting_error(const Vec& q, const Vec& p) {
    if (q.size() != p.size()) {
        throw std::invalid_argument("fitting_error: dimension mismatch");
    }
    double s = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        double d = p[i] - q[i];
        s += d * d;
    }
    return s;
}

UlgResult ulg_from_eigenvalues(const std::vector<double>& eigenvalues, double floor_) {
    if (eigenvalues.empty()) throw std::invalid_argument("ulg: empty spectrum");
    double lmin = eigenvalues.front();
    double lmax = eigenvalues.back();
    lmin = std::max(lmin, floor_);
    lmax = std::max(lmax, floor_);
    UlgResult r;
    r.U = -std::log(lmin);
    r.L = -std::log(lmax);
    r.G = r.U - r.L;
    return r;
}

UlgResult ulg(const SymMatrix& A, double floor_) {
    return ulg_from_eigenvalues(sym_eig(A).eigenvalues, floor_);
}

double structural_error(double alpha, double beta, double gamma, const SymMatrix& A) {
    if (alpha <= 0.0 || beta <= 0.0 || gamma <= 0.0) {
        throw std::invalid_argument("structural_error: weights must be positive");
    }
    UlgResult r = ulg(A);
    return alpha * r.G + beta * r.U + gamma * r.L;
}

DiagnosticsRecord sandwich_check(const Vec& q, const ModelConfig& cfg, Generator gen,
                                 const ParamVector& theta, const Vec& x, double tol) {
    validate_simplex(q);
    DiagnosticsRecord rec;
    rec.samples_used = 1;

    Vec f = forward(cfg, theta, x);
    Vec p = link(gen, f);
    Vec e(q.size());
    double enorm2 = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        e[i] = q[i] - p[i];
        enorm2 += e[i] * e[i];
    }

    std::vector<double> J = jacobian(cfg, theta, x);
    SymMatrix A = gram(J, static_cast<int>(theta.size()), cfg.output_dim);
    EigenResult eig = sym_eig(A);
    UlgResult u = ulg_from_eigenvalues(eig.eigenvalues);
    rec.U = u.U;
    rec.L = u.L;
    rec.G = u.G;
    rec.S = u.G + u.U + u.L;

    if (std::sqrt(enorm2) < 1e-15) {
        rec.degenerate = true;  // at optimum, ratio undefined
        rec.fit_err_log = -std::numeric_limits<double>::infinity();
        rec.grad_norm_log = -std::numeric_limits<double>::infinity();
        rec.upper_bound = rec.grad_norm_log + rec.U;
        rec.lower_bound = rec.grad_norm_log + rec.L;
        return rec;
    }
    if (eig.eigenvalues.front() <= kEigenFloor) {
        rec.degenerate = true;  // floored spectrum, bound not assertable
    }

    double grad_norm = 0.0;  // e^T A e
    for (int i = 0; i < A.n; ++i) {
        double acc = 0.0;
        for (int j = 0; j < A.n; ++j) acc += A.at(i, j) * e[j];
        grad_norm += e[i] * acc;
    }
    grad_norm = std::max(grad_norm, 0.0);

    rec.fit_err_log = std::log(enorm2);
    rec.grad_norm_log = std::log(std::max(grad_norm, 1e-300));
    rec.upper_bound = rec.grad_norm_log + rec.U;
    rec.lower_bound = rec.grad_norm_log + rec.L;
    double ratio = rec.fit_err_log - rec.grad_norm_log;
    rec.sandwich_ok = (rec.L - tol <= ratio) && (ratio <= rec.U + tol);
    return rec;
}

IndependenceReport independence_check(const std::vector<double>& J, std::size_t rows,
                                      int cols) {
    if (rows < 2 || cols < 2 || J.size() != rows * static_cast<std::size_t>(cols)) {
        throw std::invalid_argument("independence_check: bad shape");
    }
    IndependenceReport rep;
    std::vector<double> norms2(cols, 0.0);
    for (std::size_t r = 0; r < rows; ++r) {
        const double* row = J.data() + r * cols;
        for (int j = 0; j < cols; ++j) norms2[j] += row[j] * row[j];
    }
    double max2 = *std::max_element(norms2.begin(), norms2.end());
    rep.epsilon_hat = std::sqrt(max2);
    if (rep.epsilon_hat == 0.0) {
        return rep;  // zero Jacobian: holds = false
    }
    const double m = static_cast<double>(rows);
    const double n = static_cast<double>(cols);
    double diag_thresh = 1.0 - 2.0 * std::log(n) / m;
    diag_thresh = diag_thresh * diag_thresh * max2;
    double off_thresh = std::sqrt(6.0 * std::log(n)) / std::sqrt(m - 1.0) * max2;

    int diag_ok = 0;
    for (int j = 0; j < cols; ++j) {
        if (norms2[j] >= diag_thresh) ++diag_ok;
    }
    int off_ok = 0, pairs = 0;
    for (int i = 0; i < cols; ++i) {
        for (int j = i + 1; j < cols; ++j) {
            double dot = 0.0;
            for (std::size_t r = 0; r < rows; ++r) {
                dot += J[r * cols + i] * J[r * cols + j];
            }
            ++pairs;
            if (std::abs(dot) <= off_thresh) ++off_ok;
        }
    }
    rep.diag_ok_fraction = static_cast<double>(diag_ok) / cols;
    rep.offdiag_ok_fraction = pairs ? static_cast<double>(off_ok) / pairs : 1.0;
    rep.holds = rep.diag_ok_fraction >= 0.9 && rep.offdiag_ok_fraction >= 0.9;
    return rep;
}

Theorem3Bounds theorem3_bounds(std::size_t m, int n, double epsilon, bool printed_z) {
    if (m < 2 || n < 2 || epsilon <= 0.0) {
        throw std::invalid_argument("theorem3_bounds: need m >= 2, n >= 2, eps > 0");
    }
    if (static_cast<std::size_t>(n) > m - 1) {
        throw std::invalid_argument("theorem3_bounds: premise n <= m - 1 violated");
    }
    const double md = static_cast<double>(m);
    const double nd = static_cast<double>(n);
    double c = 1.0 - 2.0 * std::log(nd) / md;
    if (c <= 0.0) {
        throw std::invalid_argument("theorem3_bounds: 1 - 2 log n / m not positive");
    }
    Theorem3Bounds b;
    b.u_bound = -std::log(c * c) - std::log(epsilon * epsilon);
    double base = 2.0 * nd * std::sqrt(6.0 * std::log(nd)) / std::sqrt(md - 1.0);
    b.Z = printed_z ? base * c * c : base / (c * c);
    b.g_bound = std::log(b.Z + 1.0);
    return b;
}

RegProbeResult implicit_reg_probe(const ModelConfig& cfg, Generator gen, const Vec& x,
                                  double radius, int samples, std::uint64_t seed) {
    if (radius <= 0.0 || samples < 1) {
        throw std::invalid_argument("implicit_reg_probe: bad radius or sample count");
    }
    const std::size_t m = param_count(cfg);
    const double invK = 1.0 / cfg.output_dim;

    // Premise: theta = 0 must map to the uniform distribution.
    {
        ParamVector zero(m, 0.0);
        Vec p0 = link(gen, forward(cfg, zero, x));
        for (double pi : p0) {
            if (std::abs(pi - invK) > 1e-9) {
                throw std::domain_error(
                    "implicit_reg_probe: zero parameters do not map to uniform");
            }
        }
    }

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    RegProbeResult out;
    ParamVector theta(m);
    for (int s = 0; s < samples; ++s) {
        double norm2 = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            theta[i] = gauss(rng);
            norm2 += theta[i] * theta[i];
        }
        double u = unif(rng);
        double scale = radius * std::pow(u, 1.0 / static_cast<double>(m)) / std::sqrt(norm2);
        norm2 = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            theta[i] *= scale;
            norm2 += theta[i] * theta[i];
        }
        if (std::sqrt(norm2) < 1e-12) continue;
        Vec p = link(gen, forward(cfg, theta, x));
        double pnorm2 = 0.0;
        for (double pi : p) pnorm2 += pi * pi;
        if (pnorm2 < invK - 1e-9) ++out.violations;
        out.k_hat = std::max(out.k_hat, (pnorm2 - invK) / norm2);
        ++out.samples_used;
    }
    return out;
}

std::vector<double> sample_ball_columns(std::size_t rows, int cols, double eps,
                                        std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<double> J(rows * static_cast<std::size_t>(cols));
    std::vector<double> col(rows);
    for (int j = 0; j < cols; ++j) {
        double norm2 = 0.0;
        for (std::size_t r = 0; r < rows; ++r) {
            col[r] = gauss(rng);
            norm2 += col[r] * col[r];
        }
        double u = unif(rng);
        double scale = eps * std::pow(u, 1.0 / static_cast<double>(rows)) / std::sqrt(norm2);
        for (std::size_t r = 0; r < rows; ++r) {
            J[r * cols + j] = col[r] * scale;
        }
    }
    return J;
}

}  // namespace fylab
