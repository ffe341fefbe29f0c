#pragma once

#include <cstdint>
#include <vector>

#include "fylab/convex.hpp"
#include "fylab/netmodel.hpp"
#include "fylab/smallmat.hpp"

namespace fylab {

inline constexpr double kEigenFloor = 1e-18;

struct UlgResult {
    double U = 0.0;
    double L = 0.0;
    double G = 0.0;
};

// Squared Euclidean distance between two distributions.
double fitting_error(const Vec& q, const Vec& p);

// U = -log lambda_min, L = -log lambda_max, eigenvalues clamped at floor.
UlgResult ulg(const SymMatrix& A, double floor_ = kEigenFloor);
UlgResult ulg_from_eigenvalues(const std::vector<double>& eigenvalues,
                               double floor_ = kEigenFloor);

// alpha*G + beta*U + gamma*L, weights must be positive.
double structural_error(double alpha, double beta, double gamma, const SymMatrix& A);

struct DiagnosticsRecord {
    long step = 0;
    double fit_err_log = 0.0;
    double grad_norm_log = 0.0;
    double U = 0.0;
    double L = 0.0;
    double G = 0.0;
    double S = 0.0;
    double upper_bound = 0.0;
    double lower_bound = 0.0;
    bool sandwich_ok = false;
    int samples_used = 0;
    bool degenerate = false;  // at-optimum or floored spectrum; not asserted
};

// Evaluates the sandwich bound L <= log(E_f / ||grad||^2) <= U at one
// (model, input) with target q.
DiagnosticsRecord sandwich_check(const Vec& q, const ModelConfig& cfg, Generator gen,
                                 const ParamVector& theta, const Vec& x,
                                 double tol = 1e-6);

struct IndependenceReport {
    double epsilon_hat = 0.0;
    double diag_ok_fraction = 0.0;
    double offdiag_ok_fraction = 0.0;
    bool holds = false;
};

// Checks the ball-concentration inequalities on the columns of J
// (row-major, rows = |theta|, cols = K).
IndependenceReport independence_check(const std::vector<double>& J, std::size_t rows,
                                      int cols);

struct Theorem3Bounds {
    double u_bound = 0.0;
    double g_bound = 0.0;
    double Z = 0.0;
};

// Closed-form parameter-count bounds. The divided Z form follows the
// proof's algebra; printed_z selects the published variant instead.
Theorem3Bounds theorem3_bounds(std::size_t m, int n, double epsilon,
                               bool printed_z = false);

struct RegProbeResult {
    double k_hat = 0.0;
    int violations = 0;
    int samples_used = 0;
};

// Samples theta uniformly in a ball and measures the implicit
// regularization ratio (||p||^2 - 1/K) / ||theta||^2.
RegProbeResult implicit_reg_probe(const ModelConfig& cfg, Generator gen, const Vec& x,
                                  double radius, int samples, std::uint64_t seed);

// Samples `cols` columns uniformly from the radius-eps ball in R^rows;
// shared by the Monte-Carlo validators.
std::vector<double> sample_ball_columns(std::size_t rows, int cols, double eps,
                                        std::uint64_t seed);

}  // namespace fylab
