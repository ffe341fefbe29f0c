#include "fylab/netmodel.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace fylab {

ModelConfig ModelConfig::arch(char label, int k, int input_dim, int output_dim, int width) {
    ModelConfig cfg;
    cfg.input_dim = input_dim;
    cfg.output_dim = output_dim;
    cfg.block_count = k;
    cfg.arch_label = label;
    switch (label) {
        case 'a': cfg.block_width = width; cfg.skip = false; break;
        case 'b': cfg.block_width = width; cfg.skip = true; break;
        case 'c': cfg.block_width = 2 * width; cfg.skip = false; break;
        case 'd': cfg.block_width = 2 * width; cfg.skip = true; break;
        default: throw std::invalid_argument("arch label must be one of a,b,c,d");
    }
    return cfg;
}

void ModelConfig::validate() const {
    if (input_dim < 1 || output_dim < 2 || block_count < 0 || block_width < 1) {
        throw std::invalid_argument("ModelConfig: bad dimensions");
    }
    if ((arch_label == 'b' || arch_label == 'd') && !skip) {
        throw std::invalid_argument("ModelConfig: arch b/d require skip");
    }
    if ((arch_label == 'a' || arch_label == 'c') && skip) {
        throw std::invalid_argument("ModelConfig: arch a/c forbid skip");
    }
}

namespace {

struct LayerShape {
    int in = 0;
    int out = 0;
    bool skip = false;  // identity bypass around this block
};

// Block i maps (i == 0 ? input_dim : width) -> width; the head maps the
// last hidden (or the input when there are no blocks) -> output_dim.
// Skip applies only where the bypass is shape-valid.
std::vector<LayerShape> layer_shapes(const ModelConfig& cfg) {
    std::vector<LayerShape> shapes;
    int d = cfg.input_dim;
    for (int i = 0; i < cfg.block_count; ++i) {
        LayerShape s;
        s.in = d;
        s.out = cfg.block_width;
        s.skip = cfg.skip && s.in == s.out;
        shapes.push_back(s);
        d = s.out;
    }
    shapes.push_back({d, cfg.output_dim, false});  // head
    return shapes;
}

double activate(Activation act, double z) {
    switch (act) {
        case Activation::ReLU: return z > 0.0 ? z : 0.0;
        case Activation::Tanh: return std::tanh(z);
        case Activation::Identity: return z;
    }
    return z;
}

double activate_grad(Activation act, double z) {
    switch (act) {
        case Activation::ReLU: return z > 0.0 ? 1.0 : 0.0;  // subgradient 0 at 0
        case Activation::Tanh: {
            double t = std::tanh(z);
            return 1.0 - t * t;
        }
        case Activation::Identity: return 1.0;
    }
    return 1.0;
}

struct ForwardTrace {
    std::vector<Vec> inputs;  // input to each layer (blocks + head)
    std::vector<Vec> pre;     // pre-activation of each block
    Vec scores;
};

ForwardTrace run_forward(const ModelConfig& cfg, const ParamVector& theta, const Vec& x,
                         const std::vector<LayerShape>& shapes) {
    if (x.size() != static_cast<std::size_t>(cfg.input_dim)) {
        throw std::invalid_argument("forward: input dimension mismatch");
    }
    if (theta.size() != param_count(cfg)) {
        throw std::invalid_argument("forward: parameter count mismatch");
    }
    ForwardTrace tr;
    Vec h = x;
    std::size_t off = 0;
    for (std::size_t l = 0; l + 1 < shapes.size(); ++l) {
        const auto& s = shapes[l];
        tr.inputs.push_back(h);
        Vec z(s.out);
        for (int o = 0; o < s.out; ++o) {
            const double* w = theta.data() + off + static_cast<std::size_t>(o) * s.in;
            double acc = theta[off + static_cast<std::size_t>(s.out) * s.in + o];
            for (int i = 0; i < s.in; ++i) acc += w[i] * h[i];
            z[o] = acc;
        }
        tr.pre.push_back(z);
        Vec out(s.out);
        for (int o = 0; o < s.out; ++o) {
            out[o] = activate(cfg.activation, z[o]);
            if (s.skip) out[o] += h[o];
        }
        h = std::move(out);
        off += static_cast<std::size_t>(s.out) * s.in + s.out;
    }
    const auto& hd = shapes.back();
    tr.inputs.push_back(h);
    Vec f(hd.out);
    for (int o = 0; o < hd.out; ++o) {
        const double* w = theta.data() + off + static_cast<std::size_t>(o) * hd.in;
        double acc = theta[off + static_cast<std::size_t>(hd.out) * hd.in + o];
        for (int i = 0; i < hd.in; ++i) acc += w[i] * h[i];
        f[o] = acc;
    }
    tr.scores = std::move(f);
    return tr;
}

}  // namespace

std::size_t param_count(const ModelConfig& cfg) {
    cfg.validate();
    std::size_t n = 0;
    for (const auto& s : layer_shapes(cfg)) {
        n += static_cast<std::size_t>(s.out) * s.in + s.out;
    }
    return n;
}

ParamVector init_params(const ModelConfig& cfg, InitScheme scheme, std::uint64_t seed) {
    const auto shapes = layer_shapes(cfg);
    ParamVector theta(param_count(cfg), 0.0);
    if (scheme == InitScheme::Zero) return theta;
    std::mt19937_64 rng(seed);
    std::size_t off = 0;
    for (const auto& s : shapes) {
        const std::size_t nw = static_cast<std::size_t>(s.out) * s.in;
        if (scheme == InitScheme::He) {
            std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / s.in));
            for (std::size_t i = 0; i < nw; ++i) theta[off + i] = dist(rng);
        } else {
            double bound = std::sqrt(6.0 / (s.in + s.out));
            std::uniform_real_distribution<double> dist(-bound, bound);
            for (std::size_t i = 0; i < nw; ++i) theta[off + i] = dist(rng);
        }
        // biases stay zero
        off += nw + s.out;
    }
    return theta;
}

Vec forward(const ModelConfig& cfg, const ParamVector& theta, const Vec& x) {
    return run_forward(cfg, theta, x, layer_shapes(cfg)).scores;
}

ParamVector backprop(const ModelConfig& cfg, const ParamVector& theta, const Vec& x,
                     const Vec& cotangent) {
    const auto shapes = layer_shapes(cfg);
    if (cotangent.size() != static_cast<std::size_t>(cfg.output_dim)) {
        throw std::invalid_argument("backprop: cotangent dimension mismatch");
    }
    ForwardTrace tr = run_forward(cfg, theta, x, shapes);

    ParamVector grad(theta.size(), 0.0);

    // layer parameter offsets
    std::vector<std::size_t> offsets(shapes.size());
    std::size_t off = 0;
    for (std::size_t l = 0; l < shapes.size(); ++l) {
        offsets[l] = off;
        off += static_cast<std::size_t>(shapes[l].out) * shapes[l].in + shapes[l].out;
    }

    // head
    const auto& hd = shapes.back();
    const std::size_t hoff = offsets.back();
    const Vec& hin = tr.inputs.back();
    Vec gh(hd.in, 0.0);
    for (int o = 0; o < hd.out; ++o) {
        double g = cotangent[o];
        double* gw = grad.data() + hoff + static_cast<std::size_t>(o) * hd.in;
        const double* w = theta.data() + hoff + static_cast<std::size_t>(o) * hd.in;
        grad[hoff + static_cast<std::size_t>(hd.out) * hd.in + o] = g;
        if (g != 0.0) {
            for (int i = 0; i < hd.in; ++i) {
                gw[i] = g * hin[i];
                gh[i] += w[i] * g;
            }
        }
    }

    for (int l = static_cast<int>(shapes.size()) - 2; l >= 0; --l) {
        const auto& s = shapes[l];
        const std::size_t loff = offsets[l];
        const Vec& lin = tr.inputs[l];
        const Vec& z = tr.pre[l];
        Vec gnext(s.in, 0.0);
        if (s.skip) {
            for (int i = 0; i < s.in; ++i) gnext[i] = gh[i];
        }
        for (int o = 0; o < s.out; ++o) {
            double gz = gh[o] * activate_grad(cfg.activation, z[o]);
            grad[loff + static_cast<std::size_t>(s.out) * s.in + o] = gz;
            if (gz == 0.0) continue;
            double* gw = grad.data() + loff + static_cast<std::size_t>(o) * s.in;
            const double* w = theta.data() + loff + static_cast<std::size_t>(o) * s.in;
            for (int i = 0; i < s.in; ++i) {
                gw[i] = gz * lin[i];
                gnext[i] += w[i] * gz;
            }
        }
        gh = std::move(gnext);
    }
    return grad;
}

ParamVector loss_grad(const ModelConfig& cfg, Generator gen, const ParamVector& theta,
                      const Vec& x, const Vec& target) {
    Vec f = forward(cfg, theta, x);
    Vec cot = fy_loss_grad(gen, target, f);  // link(f) - target
    return backprop(cfg, theta, x, cot);
}

std::vector<double> jacobian(const ModelConfig& cfg, const ParamVector& theta, const Vec& x) {
    const std::size_t m = param_count(cfg);
    const int K = cfg.output_dim;
    std::vector<double> J(m * K, 0.0);
    Vec cot(K, 0.0);
    for (int j = 0; j < K; ++j) {
        cot.assign(K, 0.0);
        cot[j] = 1.0;
        ParamVector col = backprop(cfg, theta, x, cot);
        for (std::size_t r = 0; r < m; ++r) J[r * K + j] = col[r];
    }
    return J;
}

}  // namespace fylab
