#pragma once

#include <vector>

namespace fylab {

using Vec = std::vector<double>;

// Convex generator selecting Omega, its conjugate and link map.
// Both kinds are restricted to the probability simplex, so
// NegEntropySimplex has Omega* = logsumexp and link = softmax.
enum class Generator {
    SquaredL2,
    NegEntropySimplex,
};

// Throws std::domain_error unless v is a valid point on the simplex
// (entries >= 0, sum within 1e-9 of 1, size >= 2).
void validate_simplex(const Vec& mu);

// Throws std::invalid_argument on non-finite entries.
void validate_finite(const Vec& v);

double omega_value(Generator gen, const Vec& mu);
double omega_conjugate(Generator gen, const Vec& nu);

// nu -> grad Omega*(nu). Softmax for NegEntropySimplex, Euclidean
// projection onto the simplex for SquaredL2.
Vec link(Generator gen, const Vec& nu);

// d_Omega(mu, nu) = Omega(mu) + Omega*(nu) - <mu, nu>, clipped at 0.
double fy_loss(Generator gen, const Vec& mu, const Vec& nu);

// Gradient in nu: link(nu) - mu.
Vec fy_loss_grad(Generator gen, const Vec& mu, const Vec& nu);

// Finite discrete joint distribution over (x, y). cond[i] is q_{Y|x_i},
// x_mass[i] the marginal mass of x_i.
struct DiscreteJoint {
    std::vector<Vec> cond;
    Vec x_mass;
};

// B_Omega of the joint: E_Y[Omega(1_y)] - E_X[Omega(q_{Y|x})].
// Points with zero x mass are excluded.
double b_omega(Generator gen, const DiscreteJoint& joint);

double logsumexp(const Vec& v);
Vec softmax(const Vec& v);
Vec simplex_projection(const Vec& v);

}  // namespace fylab
