#pragma once

#include <cstdint>
#include <vector>

#include "fylab/convex.hpp"

namespace fylab {

enum class Activation { ReLU, Tanh, Identity };
enum class InitScheme { He, Xavier, Zero };

// Feed-forward net: `block_count` blocks [Linear + activation] followed by
// a linear head. With skip=true a block adds its input back whenever the
// shapes match (block input dim == block output dim).
struct ModelConfig {
    int input_dim = 784;
    int output_dim = 10;
    int block_count = 1;
    int block_width = 64;
    Activation activation = Activation::ReLU;
    bool skip = false;
    char arch_label = 'a';

    // a: width w, no skip; b: width w, skip; c: 2w, no skip; d: 2w, skip.
    static ModelConfig arch(char label, int k, int input_dim = 784,
                            int output_dim = 10, int width = 64);

    void validate() const;
};

std::size_t param_count(const ModelConfig& cfg);

using ParamVector = std::vector<double>;

ParamVector init_params(const ModelConfig& cfg, InitScheme scheme, std::uint64_t seed);

Vec forward(const ModelConfig& cfg, const ParamVector& theta, const Vec& x);

// Exact reverse-mode gradient of d_Omega(target, f_theta(x)) in theta.
ParamVector loss_grad(const ModelConfig& cfg, Generator gen, const ParamVector& theta,
                      const Vec& x, const Vec& target);

// Row-major |theta| x K Jacobian of f_theta(x), one reverse pass per
// output coordinate.
std::vector<double> jacobian(const ModelConfig& cfg, const ParamVector& theta, const Vec& x);

// Reverse pass from an arbitrary output cotangent; building block for
// loss_grad and jacobian.
ParamVector backprop(const ModelConfig& cfg, const ParamVector& theta, const Vec& x,
                     const Vec& cotangent);

}  // namespace fylab
