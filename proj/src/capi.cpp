#include "fylab.h"

#include <cstring>
#include <iostream>
#include <stdexcept>
#include <string>

#include "fylab/experiments.hpp"

namespace {

thread_local std::string g_last_error;

fylab::Generator to_generator(int gen) {
    switch (gen) {
        case FYLAB_GEN_SQUARED_L2: return fylab::Generator::SquaredL2;
        case FYLAB_GEN_NEG_ENTROPY: return fylab::Generator::NegEntropySimplex;
    }
    throw std::invalid_argument("unknown generator id");
}

fylab::Activation to_activation(int act) {
    switch (act) {
        case FYLAB_ACT_RELU: return fylab::Activation::ReLU;
        case FYLAB_ACT_TANH: return fylab::Activation::Tanh;
        case FYLAB_ACT_IDENTITY: return fylab::Activation::Identity;
    }
    throw std::invalid_argument("unknown activation id");
}

fylab::InitScheme to_scheme(int scheme) {
    switch (scheme) {
        case FYLAB_INIT_HE: return fylab::InitScheme::He;
        case FYLAB_INIT_XAVIER: return fylab::InitScheme::Xavier;
        case FYLAB_INIT_ZERO: return fylab::InitScheme::Zero;
    }
    throw std::invalid_argument("unknown init scheme id");
}

template <typename F>
fylab_status guarded(F&& fn) {
    try {
        fn();
        return FYLAB_OK;
    } catch (const std::domain_error& e) {
        g_last_error = e.what();
        return FYLAB_ERR_DOMAIN;
    } catch (const std::invalid_argument& e) {
        g_last_error = e.what();
        return FYLAB_ERR_INVALID_ARGUMENT;
    } catch (const std::runtime_error& e) {
        g_last_error = e.what();
        // I/O failures come through runtime_error with a path in the text
        return std::string(e.what()).find("cannot") != std::string::npos ||
                       std::string(e.what()).find("file") != std::string::npos
                   ? FYLAB_ERR_IO
                   : FYLAB_ERR_NUMERIC;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return FYLAB_ERR_UNKNOWN;
    }
}

fylab::Vec to_vec(const double* p, int k) {
    if (!p || k < 1) throw std::invalid_argument("null or empty buffer");
    return fylab::Vec(p, p + k);
}

}  // namespace

struct fylab_model {
    fylab::ModelConfig cfg;
    fylab::ParamVector theta;
};

struct fylab_dataset {
    fylab::Dataset ds;
};

extern "C" {

const char* fylab_version_string(void) { return "fylab 0.1.0"; }

const char* fylab_last_error(void) { return g_last_error.c_str(); }

fylab_status fylab_fy_loss(int gen, int k, const double* mu, const double* nu,
                           double* out) {
    return guarded([&] {
        if (!out) throw std::invalid_argument("null output");
        *out = fylab::fy_loss(to_generator(gen), to_vec(mu, k), to_vec(nu, k));
    });
}

fylab_status fylab_fy_loss_grad(int gen, int k, const double* mu, const double* nu,
                                double* grad_out) {
    return guarded([&] {
        if (!grad_out) throw std::invalid_argument("null output");
        fylab::Vec g = fylab::fy_loss_grad(to_generator(gen), to_vec(mu, k), to_vec(nu, k));
        std::memcpy(grad_out, g.data(), g.size() * sizeof(double));
    });
}

fylab_status fylab_link(int gen, int k, const double* nu, double* prob_out) {
    return guarded([&] {
        if (!prob_out) throw std::invalid_argument("null output");
        fylab::Vec p = fylab::link(to_generator(gen), to_vec(nu, k));
        std::memcpy(prob_out, p.data(), p.size() * sizeof(double));
    });
}

fylab_status fylab_omega_value(int gen, int k, const double* mu, double* out) {
    return guarded([&] {
        if (!out) throw std::invalid_argument("null output");
        *out = fylab::omega_value(to_generator(gen), to_vec(mu, k));
    });
}

fylab_status fylab_omega_conjugate(int gen, int k, const double* nu, double* out) {
    return guarded([&] {
        if (!out) throw std::invalid_argument("null output");
        *out = fylab::omega_conjugate(to_generator(gen), to_vec(nu, k));
    });
}

fylab_status fylab_sym_eig(int n, const double* a, double* eigenvalues,
                           double* offdiag_residual) {
    return guarded([&] {
        if (!a || !eigenvalues || n < 1) throw std::invalid_argument("bad arguments");
        fylab::SymMatrix A(n);
        std::memcpy(A.a.data(), a, A.a.size() * sizeof(double));
        fylab::EigenResult r = fylab::sym_eig(A);
        std::memcpy(eigenvalues, r.eigenvalues.data(), n * sizeof(double));
        if (offdiag_residual) *offdiag_residual = r.offdiag_residual;
    });
}

fylab_status fylab_ulg(int n, const double* a, double* u, double* l, double* g) {
    return guarded([&] {
        if (!a || !u || !l || !g || n < 1) throw std::invalid_argument("bad arguments");
        fylab::SymMatrix A(n);
        std::memcpy(A.a.data(), a, A.a.size() * sizeof(double));
        fylab::UlgResult r = fylab::ulg(A);
        *u = r.U;
        *l = r.L;
        *g = r.G;
    });
}

fylab_status fylab_theorem3_bounds(long long m, int n, double epsilon, int printed_z,
                                   double* u_bound, double* g_bound, double* z) {
    return guarded([&] {
        if (!u_bound || !g_bound || m < 0) throw std::invalid_argument("bad arguments");
        fylab::Theorem3Bounds b = fylab::theorem3_bounds(
            static_cast<std::size_t>(m), n, epsilon, printed_z != 0);
        *u_bound = b.u_bound;
        *g_bound = b.g_bound;
        if (z) *z = b.Z;
    });
}

fylab_status fylab_model_create(char arch_label, int block_count, int input_dim,
                                int output_dim, int width, int activation,
                                fylab_model** out) {
    return guarded([&] {
        if (!out) throw std::invalid_argument("null output");
        fylab::ModelConfig cfg =
            fylab::ModelConfig::arch(arch_label, block_count, input_dim, output_dim, width);
        cfg.activation = to_activation(activation);
        cfg.validate();
        auto* m = new fylab_model{cfg, fylab::ParamVector(fylab::param_count(cfg), 0.0)};
        *out = m;
    });
}

void fylab_model_destroy(fylab_model* model) { delete model; }

fylab_status fylab_model_init(fylab_model* model, int scheme, unsigned long long seed) {
    return guarded([&] {
        if (!model) throw std::invalid_argument("null model");
        model->theta = fylab::init_params(model->cfg, to_scheme(scheme), seed);
    });
}

fylab_status fylab_model_param_count(const fylab_model* model, long long* out) {
    return guarded([&] {
        if (!model || !out) throw std::invalid_argument("bad arguments");
        *out = static_cast<long long>(fylab::param_count(model->cfg));
    });
}

fylab_status fylab_model_forward(const fylab_model* model, const double* x,
                                 double* scores_out) {
    return guarded([&] {
        if (!model || !scores_out) throw std::invalid_argument("bad arguments");
        fylab::Vec f = fylab::forward(model->cfg, model->theta,
                                      to_vec(x, model->cfg.input_dim));
        std::memcpy(scores_out, f.data(), f.size() * sizeof(double));
    });
}

fylab_status fylab_model_jacobian(const fylab_model* model, const double* x,
                                  double* jac_out) {
    return guarded([&] {
        if (!model || !jac_out) throw std::invalid_argument("bad arguments");
        std::vector<double> J = fylab::jacobian(model->cfg, model->theta,
                                                to_vec(x, model->cfg.input_dim));
        std::memcpy(jac_out, J.data(), J.size() * sizeof(double));
    });
}

fylab_status fylab_dataset_load_idx(const char* image_path, const char* label_path,
                                    fylab_dataset** out) {
    return guarded([&] {
        if (!image_path || !label_path || !out) throw std::invalid_argument("bad arguments");
        *out = new fylab_dataset{fylab::load_mnist_idx(image_path, label_path)};
    });
}

fylab_status fylab_dataset_synthetic(int n_points, int input_dim, int k,
                                     unsigned long long seed, int discrete_exact,
                                     fylab_dataset** out) {
    return guarded([&] {
        if (!out) throw std::invalid_argument("null output");
        fylab::SyntheticSpec spec;
        spec.n_points = n_points;
        spec.input_dim = input_dim;
        spec.K = k;
        spec.noise_seed = seed;
        spec.discrete_exact = discrete_exact != 0;
        *out = new fylab_dataset{fylab::synthetic_dataset(spec)};
    });
}

void fylab_dataset_destroy(fylab_dataset* ds) { delete ds; }

fylab_status fylab_dataset_info(const fylab_dataset* ds, long long* n, int* input_dim,
                                int* k) {
    return guarded([&] {
        if (!ds) throw std::invalid_argument("null dataset");
        if (n) *n = static_cast<long long>(ds->ds.size());
        if (input_dim) *input_dim = ds->ds.input_dim();
        if (k) *k = ds->ds.K;
    });
}

void fylab_train_config_defaults(fylab_train_config* cfg) {
    if (!cfg) return;
    cfg->lr = 0.01;
    cfg->momentum = 0.9;
    cfg->batch_size = 64;
    cfg->epochs = 1;
    cfg->seed = 0;
    cfg->diag_samples = 8;
    cfg->diag_every = 1;
    cfg->shuffle = 1;
}

fylab_status fylab_train_csv(fylab_model* model, int gen, const fylab_dataset* ds,
                             const fylab_train_config* cfg, const char* csv_path) {
    return guarded([&] {
        if (!model || !ds || !cfg || !csv_path) throw std::invalid_argument("bad arguments");
        fylab::TrainConfig t;
        t.lr = cfg->lr;
        t.momentum = cfg->momentum;
        t.batch_size = cfg->batch_size;
        t.epochs = cfg->epochs;
        t.seed = cfg->seed;
        t.diag_samples = cfg->diag_samples;
        t.diag_every = cfg->diag_every;
        t.shuffle = cfg->shuffle != 0;
        fylab::MetricLog log = fylab::train(model->cfg, to_generator(gen), ds->ds, t,
                                            &model->theta, &model->theta);
        fylab::write_csv(log, csv_path);
    });
}

fylab_status fylab_run_experiment(const fylab_experiment_spec* spec) {
    return guarded([&] {
        if (!spec || !spec->name) throw std::invalid_argument("null experiment spec");
        fylab::ExperimentSpec s;
        s.name = spec->name;
        s.arch_labels.clear();
        if (spec->arch_labels) {
            for (const char* p = spec->arch_labels; *p; ++p) s.arch_labels.push_back(*p);
        }
        s.k_values.assign(spec->k_values, spec->k_values + spec->k_count);
        s.seeds.assign(spec->seeds, spec->seeds + spec->seed_count);
        if (spec->output_dir) s.output_dir = spec->output_dir;
        s.subset_size = spec->subset_size;
        if (spec->mnist_images) s.mnist_images = spec->mnist_images;
        if (spec->mnist_labels) s.mnist_labels = spec->mnist_labels;
        s.gen = to_generator(spec->generator);
        std::string name = spec->name;
        if (name == "convergence") {
            fylab::exp_convergence(s);
        } else if (name == "depth-init") {
            fylab::exp_depth_init(s);
        } else if (name == "depth-train") {
            fylab::exp_depth_train(s);
        } else {
            throw std::invalid_argument("unknown experiment: " + name);
        }
    });
}

fylab_status fylab_plot_svg(const char* csv_path, const char* columns,
                            const char* out_path) {
    return guarded([&] {
        if (!csv_path || !columns || !out_path) throw std::invalid_argument("bad arguments");
        std::vector<std::string> cols;
        std::string cur;
        for (const char* p = columns;; ++p) {
            if (*p == ',' || *p == '\0') {
                if (!cur.empty()) cols.push_back(cur);
                cur.clear();
                if (*p == '\0') break;
            } else {
                cur.push_back(*p);
            }
        }
        fylab::plot_svg(csv_path, cols, out_path);
    });
}

fylab_status fylab_validate(int* failures) {
    return guarded([&] {
        int f = fylab::validate_suite(std::cout);
        if (failures) *failures = f;
    });
}

}  // extern "C"
