#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "fylab/convex.hpp"

namespace testutil {

inline fylab::Vec random_simplex(std::mt19937_64& rng, int K) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    fylab::Vec mu(K);
    double s = 0.0;
    for (double& v : mu) {
        v = -std::log(unif(rng) + 1e-300);
        s += v;
    }
    for (double& v : mu) v /= s;
    return mu;
}

inline fylab::Vec random_scores(std::mt19937_64& rng, int K, double scale = 2.0) {
    std::normal_distribution<double> gauss(0.0, scale);
    fylab::Vec nu(K);
    for (double& v : nu) v = gauss(rng);
    return nu;
}

inline fylab::Vec onehot(int y, int K) {
    fylab::Vec v(K, 0.0);
    v[y] = 1.0;
    return v;
}

}  // namespace testutil
