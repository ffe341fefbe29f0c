#include "fylab/convex.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace fylab {

void validate_finite(const Vec& v) {
    for (double x : v) {
        if (!std::isfinite(x)) {
            throw std::invalid_argument("non-finite entry in vector");
        }
    }
}

void validate_simplex(const Vec& mu) {
    if (mu.size() < 2) {
        throw std::domain_error("simplex point needs dimension >= 2");
    }
    double sum = 0.0;
    for (double x : mu) {
        if (!std::isfinite(x) || x < 0.0) {
            throw std::domain_error("simplex entries must be finite and >= 0");
        }
        sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw std::domain_error("simplex entries must sum to 1");
    }
}

double logsumexp(const Vec& v) {
    double m = *std::max_element(v.begin(), v.end());
    double s = 0.0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s);
}

Vec softmax(const Vec& v) {
    double m = *std::max_element(v.begin(), v.end());
    Vec out(v.size());
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        out[i] = std::exp(v[i] - m);
        s += out[i];
    }
    for (double& x : out) x /= s;
    return out;
}

// Sorted-threshold projection onto {x >= 0, sum x = 1}.
Vec simplex_projection(const Vec& v) {
    Vec u = v;
    std::sort(u.begin(), u.end(), std::greater<double>());
    double cum = 0.0;
    double tau = 0.0;
    int rho = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        cum += u[i];
        double t = (cum - 1.0) / static_cast<double>(i + 1);
        if (u[i] - t > 0.0) {
            rho = static_cast<int>(i + 1);
            tau = t;
        }
    }
    Vec out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        out[i] = std::max(v[i] - tau, 0.0);
    }
    (void)rho;
    return out;
}

double omega_value(Generator gen, const Vec& mu) {
    validate_simplex(mu);
    double s = 0.0;
    switch (gen) {
        case Generator::SquaredL2:
            for (double x : mu) s += x * x;
            return 0.5 * s;
        case Generator::NegEntropySimplex:
            for (double x : mu) {
                if (x > 0.0) s += x * std::log(x);  // 0 log 0 = 0
            }
            return s;
    }
    throw std::logic_error("unknown generator");
}

double omega_conjugate(Generator gen, const Vec& nu) {
    validate_finite(nu);
    switch (gen) {
        case Generator::SquaredL2: {
            // sup over the simplex of <mu,nu> - 1/2 ||mu||^2, attained at
            // the projection of nu.
            Vec p = simplex_projection(nu);
            double s = 0.0;
            for (std::size_t i = 0; i < nu.size(); ++i) {
                s += p[i] * nu[i] - 0.5 * p[i] * p[i];
            }
            return s;
        }
        case Generator::NegEntropySimplex:
            return logsumexp(nu);
    }
    throw std::logic_error("unknown generator");
}

Vec link(Generator gen, const Vec& nu) {
    validate_finite(nu);
    switch (gen) {
        case Generator::SquaredL2:
            return simplex_projection(nu);
        case Generator::NegEntropySimplex:
            return softmax(nu);
    }
    throw std::logic_error("unknown generator");
}

double fy_loss(Generator gen, const Vec& mu, const Vec& nu) {
    if (mu.size() != nu.size()) {
        throw std::invalid_argument("fy_loss: size mismatch");
    }
    double dot = std::inner_product(mu.begin(), mu.end(), nu.begin(), 0.0);
    double v = omega_value(gen, mu) + omega_conjugate(gen, nu) - dot;
    return std::max(v, 0.0);
}

Vec fy_loss_grad(Generator gen, const Vec& mu, const Vec& nu) {
    if (mu.size() != nu.size()) {
        throw std::invalid_argument("fy_loss_grad: size mismatch");
    }
    validate_simplex(mu);
    Vec g = link(gen, nu);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] -= mu[i];
    return g;
}

double b_omega(Generator gen, const DiscreteJoint& joint) {
    if (joint.cond.size() != joint.x_mass.size()) {
        throw std::invalid_argument("b_omega: joint shape mismatch");
    }
    const std::size_t K = joint.cond.empty() ? 0 : joint.cond.front().size();
    Vec marginal(K, 0.0);
    double e_cond = 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < joint.cond.size(); ++i) {
        double w = joint.x_mass[i];
        if (w <= 0.0) continue;  // zero-mass x excluded
        validate_simplex(joint.cond[i]);
        for (std::size_t y = 0; y < K; ++y) marginal[y] += w * joint.cond[i][y];
        e_cond += w * omega_value(gen, joint.cond[i]);
        total += w;
    }
    if (total <= 0.0) {
        throw std::invalid_argument("b_omega: joint has no mass");
    }
    // E_Y[Omega(1_y)] with Omega evaluated at the one-hot vertex.
    Vec onehot(K, 0.0);
    double e_vertex = 0.0;
    for (std::size_t y = 0; y < K; ++y) {
        onehot.assign(K, 0.0);
        onehot[y] = 1.0;
        e_vertex += marginal[y] * omega_value(gen, onehot);
    }
    return (e_vertex - e_cond) / total;
}

}  // namespace fylab
