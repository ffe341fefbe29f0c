#include "fylab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace fylab {

namespace fs = std::filesystem;

void ExperimentSpec::validate() const {
    if (arch_labels.empty() || k_values.empty() || seeds.empty()) {
        throw std::invalid_argument("ExperimentSpec: empty arch/k/seed lists");
    }
    for (char c : arch_labels) {
        if (c != 'a' && c != 'b' && c != 'c' && c != 'd') {
            throw std::invalid_argument("ExperimentSpec: bad arch label");
        }
    }
    if (subset_size < 0 || pearson_window < 2) {
        throw std::invalid_argument("ExperimentSpec: bad subset or window");
    }
}

namespace {

// Deterministic 10-class 28x28 stand-in: per-class stroke masks plus
// pixel noise, written through the IDX path so the loader contract is
// exercised on every run.
Dataset make_surrogate(int n_points, std::uint64_t seed) {
    const int dim = 28 * 28;
    const int K = 10;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::uniform_int_distribution<int> pix(0, dim - 1);

    std::vector<Vec> centers(K, Vec(dim, 0.0));
    for (auto& c : centers) {
        for (int s = 0; s < 90; ++s) c[pix(rng)] = 0.5 + 0.4 * unif(rng);
    }
    Dataset ds;
    ds.K = K;
    std::uniform_int_distribution<int> cls(0, K - 1);
    std::normal_distribution<double> noise(0.0, 0.18);
    for (int i = 0; i < n_points; ++i) {
        int y = cls(rng);
        double gain = 0.7 + 0.3 * unif(rng);
        Vec x(dim);
        for (int d = 0; d < dim; ++d) {
            x[d] = std::clamp(centers[y][d] * gain + noise(rng), 0.0, 1.0);
        }
        ds.inputs.push_back(std::move(x));
        ds.labels.push_back(y);
    }
    return ds;
}

TrainConfig default_train_config(std::uint64_t seed) {
    TrainConfig t;
    t.lr = 0.01;
    t.momentum = 0.9;
    t.batch_size = 64;
    t.epochs = 1;
    t.seed = seed;
    return t;
}

std::string run_tag(const std::string& name, char arch, int k, std::uint64_t seed) {
    std::ostringstream os;
    os << name << "_arch" << arch << "_k" << k << "_seed" << seed;
    return os.str();
}

struct DiagSeries {
    std::vector<double> step, fit, upper, lower, U, L, G;
};

DiagSeries diag_series(const MetricLog& log) {
    DiagSeries s;
    for (const auto& r : log.records) {
        if (!r.has_diag) continue;
        s.step.push_back(static_cast<double>(r.step));
        s.fit.push_back(r.diag.fit_err_log);
        s.upper.push_back(r.diag.upper_bound);
        s.lower.push_back(r.diag.lower_bound);
        s.U.push_back(r.diag.U);
        s.L.push_back(r.diag.L);
        s.G.push_back(r.diag.G);
    }
    return s;
}

std::string write_correlations(const DiagSeries& s, int window, const std::string& path) {
    CsvTable t;
    t.columns = {"start_step", "corr_upper", "corr_lower"};
    if (s.fit.size() >= static_cast<std::size_t>(window)) {
        auto cu = sliding_pearson(s.fit, s.upper, window);
        auto cl = sliding_pearson(s.fit, s.lower, window);
        for (std::size_t i = 0; i < cu.size(); ++i) {
            t.rows.push_back({s.step[i], cu[i], cl[i]});
        }
    }
    write_csv_table(t, path);
    return path;
}

Dataset training_set(const ExperimentSpec& spec) {
    Dataset ds = load_experiment_dataset(spec);
    if (spec.subset_size > 0 && ds.size() > static_cast<std::size_t>(spec.subset_size)) {
        ds.inputs.resize(spec.subset_size);
        ds.labels.resize(spec.subset_size);
    }
    return ds;
}

}  // namespace

Dataset load_experiment_dataset(const ExperimentSpec& spec) {
    spec.validate();
    if (!spec.mnist_images.empty() || !spec.mnist_labels.empty()) {
        if (spec.mnist_images.empty() || spec.mnist_labels.empty()) {
            throw std::invalid_argument("need both --mnist-images and --mnist-labels");
        }
        return load_mnist_idx(spec.mnist_images, spec.mnist_labels);
    }
    fs::create_directories(spec.output_dir);
    int n = spec.subset_size > 0 ? spec.subset_size : 60000;
    const std::string img = (fs::path(spec.output_dir) / "surrogate-images-idx3-ubyte").string();
    const std::string lab = (fs::path(spec.output_dir) / "surrogate-labels-idx1-ubyte").string();
    Dataset ds = make_surrogate(n, 0x5eedULL);
    write_idx(ds, 28, 28, img, lab);
    return load_mnist_idx(img, lab);
}

std::vector<std::string> exp_convergence(const ExperimentSpec& spec) {
    spec.validate();
    for (int k : spec.k_values) {
        if (k != 1) throw std::invalid_argument("exp_convergence: k must be 1");
    }
    fs::create_directories(spec.output_dir);
    Dataset ds = training_set(spec);
    std::vector<std::string> files;
    for (char arch : spec.arch_labels) {
        for (std::uint64_t seed : spec.seeds) {
            ModelConfig cfg = ModelConfig::arch(arch, 1, ds.input_dim(), ds.K);
            MetricLog log = train(cfg, spec.gen, ds, default_train_config(seed));
            std::string tag = run_tag("convergence", arch, 1, seed);
            std::string metrics = (fs::path(spec.output_dir) / (tag + ".csv")).string();
            write_csv(log, metrics);
            files.push_back(metrics);
            files.push_back(write_correlations(
                diag_series(log), spec.pearson_window,
                (fs::path(spec.output_dir) / (tag + "_corr.csv")).string()));
        }
    }
    return files;
}

std::vector<std::string> exp_depth_init(const ExperimentSpec& spec) {
    spec.validate();
    fs::create_directories(spec.output_dir);
    Dataset ds = training_set(spec);
    const int n_inputs = static_cast<int>(std::min<std::size_t>(32, ds.size()));
    std::vector<std::string> files;
    for (char arch : spec.arch_labels) {
        CsvTable t;
        t.columns = {"k", "U", "L", "G", "S", "mean_abs_jacobian", "eps_hat",
                     "diag_ok_fraction", "offdiag_ok_fraction", "holds_fraction"};
        for (int k : spec.k_values) {
            ModelConfig cfg = ModelConfig::arch(arch, k, ds.input_dim(), ds.K);
            double U = 0, L = 0, G = 0, mj = 0, eh = 0, df = 0, of = 0, hf = 0;
            int count = 0;
            for (std::uint64_t seed : spec.seeds) {
                ParamVector theta = init_params(cfg, InitScheme::He, seed);
                for (int i = 0; i < n_inputs; ++i) {
                    std::vector<double> J = jacobian(cfg, theta, ds.inputs[i]);
                    SymMatrix A = gram(J, static_cast<int>(theta.size()), ds.K);
                    UlgResult u = ulg(A);
                    IndependenceReport rep =
                        independence_check(J, theta.size(), ds.K);
                    U += u.U;
                    L += u.L;
                    G += u.G;
                    double s = 0.0;
                    for (double v : J) s += std::abs(v);
                    mj += s / static_cast<double>(J.size());
                    eh += rep.epsilon_hat;
                    df += rep.diag_ok_fraction;
                    of += rep.offdiag_ok_fraction;
                    hf += rep.holds ? 1.0 : 0.0;
                    ++count;
                }
            }
            const double inv = 1.0 / count;
            t.rows.push_back({static_cast<double>(k), U * inv, L * inv, G * inv,
                              (G + U + L) * inv, mj * inv, eh * inv, df * inv, of * inv,
                              hf * inv});
        }
        std::ostringstream os;
        os << "depth_init_arch" << arch << ".csv";
        std::string path = (fs::path(spec.output_dir) / os.str()).string();
        write_csv_table(t, path);
        files.push_back(path);
    }
    return files;
}

namespace {

// First step whose fitting-error log drops 10% below its initial value;
// -1 when it never does.
long onset_step(const DiagSeries& s) {
    if (s.fit.empty()) return -1;
    double v0 = s.fit.front();
    double thresh = v0 - 0.1 * std::abs(v0);
    for (std::size_t i = 0; i < s.fit.size(); ++i) {
        if (s.fit[i] <= thresh) return static_cast<long>(s.step[i]);
    }
    return -1;
}

}  // namespace

std::vector<std::string> exp_depth_train(const ExperimentSpec& spec) {
    spec.validate();
    for (char arch : spec.arch_labels) {
        if (arch != 'a' && arch != 'b') {
            throw std::invalid_argument("exp_depth_train: archs limited to a, b");
        }
    }
    fs::create_directories(spec.output_dir);
    Dataset ds = training_set(spec);
    std::vector<std::string> files;
    for (char arch : spec.arch_labels) {
        CsvTable summary;
        summary.columns = {"k", "onset_step", "terminal_U", "terminal_L", "terminal_G"};
        for (int k : spec.k_values) {
            ModelConfig cfg = ModelConfig::arch(arch, k, ds.input_dim(), ds.K);
            MetricLog log = train(cfg, spec.gen, ds, default_train_config(spec.seeds.front()));
            std::string tag = run_tag("depth_train", arch, k, spec.seeds.front());
            std::string metrics = (fs::path(spec.output_dir) / (tag + ".csv")).string();
            write_csv(log, metrics);
            files.push_back(metrics);
            DiagSeries s = diag_series(log);
            files.push_back(write_correlations(
                s, spec.pearson_window,
                (fs::path(spec.output_dir) / (tag + "_corr.csv")).string()));
            summary.rows.push_back({static_cast<double>(k),
                                    static_cast<double>(onset_step(s)),
                                    s.U.empty() ? 0.0 : s.U.back(),
                                    s.L.empty() ? 0.0 : s.L.back(),
                                    s.G.empty() ? 0.0 : s.G.back()});
        }
        std::ostringstream os;
        os << "depth_train_arch" << arch << "_summary.csv";
        std::string path = (fs::path(spec.output_dir) / os.str()).string();
        write_csv_table(summary, path);
        files.push_back(path);
    }
    return files;
}

void plot_svg(const std::string& csv_path, const std::vector<std::string>& columns,
              const std::string& out_path) {
    if (columns.empty()) throw std::invalid_argument("plot_svg: no columns requested");
    CsvTable t = read_csv(csv_path);
    std::vector<std::vector<double>> series;
    for (const auto& c : columns) {
        if (t.column_index(c) < 0) {
            throw std::invalid_argument("plot_svg: missing column: " + c);
        }
        series.push_back(t.column(c));
    }
    if (t.rows.empty()) {
        throw std::invalid_argument("plot_svg: no data rows in " + csv_path);
    }

    double ymin = std::numeric_limits<double>::infinity();
    double ymax = -std::numeric_limits<double>::infinity();
    for (const auto& s : series) {
        for (double v : s) {
            if (std::isfinite(v)) {
                ymin = std::min(ymin, v);
                ymax = std::max(ymax, v);
            }
        }
    }
    if (!std::isfinite(ymin)) { ymin = 0.0; ymax = 1.0; }
    if (ymax == ymin) { ymax = ymin + 1.0; }

    const double W = 800, H = 500, ml = 70, mr = 20, mt = 20, mb = 45;
    const double pw = W - ml - mr, ph = H - mt - mb;
    const double n = static_cast<double>(t.rows.size());
    auto xpix = [&](double i) { return ml + (n > 1 ? i / (n - 1) : 0.5) * pw; };
    auto ypix = [&](double v) { return mt + (ymax - v) / (ymax - ymin) * ph; };

    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b"};
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\""
        << H << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    svg << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    svg << "<line x1=\"" << ml << "\" y1=\"" << mt + ph << "\" x2=\"" << ml + pw
        << "\" y2=\"" << mt + ph << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
        << mt + ph << "\" stroke=\"black\"/>\n";
    char buf[64];
    for (int i = 0; i <= 5; ++i) {
        double v = ymin + (ymax - ymin) * i / 5.0;
        double y = ypix(v);
        std::snprintf(buf, sizeof(buf), "%.4g", v);
        svg << "<line x1=\"" << ml - 4 << "\" y1=\"" << y << "\" x2=\"" << ml
            << "\" y2=\"" << y << "\" stroke=\"black\"/>\n";
        svg << "<text x=\"" << ml - 8 << "\" y=\"" << y + 4
            << "\" font-size=\"12\" text-anchor=\"end\">" << buf << "</text>\n";
        double xv = (n - 1) * i / 5.0;
        double x = xpix(xv);
        std::snprintf(buf, sizeof(buf), "%.4g", xv);
        svg << "<line x1=\"" << x << "\" y1=\"" << mt + ph << "\" x2=\"" << x
            << "\" y2=\"" << mt + ph + 4 << "\" stroke=\"black\"/>\n";
        svg << "<text x=\"" << x << "\" y=\"" << mt + ph + 18
            << "\" font-size=\"12\" text-anchor=\"middle\">" << buf << "</text>\n";
    }
    for (std::size_t s = 0; s < series.size(); ++s) {
        svg << "<polyline fill=\"none\" stroke=\"" << palette[s % 6]
            << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < series[s].size(); ++i) {
            double v = series[s][i];
            if (!std::isfinite(v)) continue;
            std::snprintf(buf, sizeof(buf), "%.2f,%.2f ", xpix(static_cast<double>(i)),
                          ypix(v));
            svg << buf;
        }
        svg << "\"/>\n";
        svg << "<text x=\"" << ml + 10 << "\" y=\"" << mt + 16 + 16 * s
            << "\" font-size=\"13\" fill=\"" << palette[s % 6] << "\">" << columns[s]
            << "</text>\n";
    }
    svg << "</svg>\n";

    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + out_path);
    out << svg.str();
    if (!out) throw std::runtime_error("write failed for " + out_path);
}

int validate_suite(std::ostream& os) {
    int failures = 0;
    auto check = [&](const std::string& name, bool ok) {
        os << (ok ? "PASS " : "FAIL ") << name << "\n";
        if (!ok) ++failures;
    };
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    auto random_simplex = [&](int K) {
        Vec mu(K);
        double s = 0.0;
        for (double& v : mu) {
            v = -std::log(unif(rng) + 1e-300);
            s += v;
        }
        for (double& v : mu) v /= s;
        return mu;
    };

    for (Generator gen : {Generator::NegEntropySimplex, Generator::SquaredL2}) {
        bool nonneg = true, zero_at_link = true;
        for (int t = 0; t < 500; ++t) {
            int K = 2 + static_cast<int>(rng() % 9);
            Vec mu = random_simplex(K);
            Vec nu(K);
            for (double& v : nu) v = 2.0 * gauss(rng);
            if (fy_loss(gen, mu, nu) < 0.0) nonneg = false;
            if (fy_loss(gen, link(gen, nu), nu) > 1e-8) zero_at_link = false;
        }
        const char* gn = gen == Generator::SquaredL2 ? "squared" : "entropy";
        check(std::string("fy_nonnegativity_") + gn, nonneg);
        check(std::string("fy_zero_at_link_") + gn, zero_at_link);
    }

    {
        bool ok = true;
        for (int t = 0; t < 200; ++t) {
            int n = 2 + static_cast<int>(rng() % 6);
            SymMatrix A(n);
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j <= i; ++j) {
                    A.at(i, j) = A.at(j, i) = gauss(rng);
                }
            }
            auto eig = sym_eig(A);
            double tr = 0.0;
            for (int i = 0; i < n; ++i) tr += A.at(i, i);
            double sum = 0.0;
            for (double l : eig.eigenvalues) sum += l;
            if (std::abs(sum - tr) > 1e-9 * std::max(1.0, std::abs(tr))) ok = false;
            auto discs = gershgorin(A);
            for (double l : eig.eigenvalues) {
                bool inside = false;
                for (auto [c, r] : discs) {
                    if (l >= c - r - 1e-9 && l <= c + r + 1e-9) inside = true;
                }
                if (!inside) ok = false;
            }
        }
        check("eigen_trace_and_gershgorin", ok);
    }

    {
        bool ok = true;
        for (int t = 0; t < 50; ++t) {
            ModelConfig cfg = ModelConfig::arch(t % 2 ? 'b' : 'a', 1 + t % 3, 8, 4, 10);
            ParamVector theta = init_params(cfg, InitScheme::He, 900 + t);
            Vec x(8);
            for (double& v : x) v = unif(rng);
            Vec q = random_simplex(4);
            DiagnosticsRecord r = sandwich_check(q, cfg, Generator::NegEntropySimplex,
                                                 theta, x);
            if (!r.degenerate && !r.sandwich_ok) ok = false;
        }
        check("theorem2_sandwich", ok);
    }

    {
        int holds = 0;
        for (int t = 0; t < 20; ++t) {
            auto J = sample_ball_columns(2000, 10, 1.0, 7000 + t);
            if (independence_check(J, 2000, 10).holds) ++holds;
        }
        check("lemma2_monte_carlo", holds >= 18);
    }
    return failures;
}

}  // namespace fylab
