// Acceptance gate: ten numbered criteria, one PASS/FAIL line each.
// Exit status is the number of failed criteria.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "fylab/experiments.hpp"

using namespace fylab;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int idx, const std::string& name, bool ok, const std::string& detail = "") {
    std::printf("%s criterion %2d (%s)%s%s\n", ok ? "PASS" : "FAIL", idx, name.c_str(),
                detail.empty() ? "" : ": ", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

Vec rand_simplex(std::mt19937_64& rng, int K) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Vec mu(K);
    double s = 0.0;
    for (double& v : mu) {
        v = -std::log(unif(rng) + 1e-300);
        s += v;
    }
    for (double& v : mu) v /= s;
    return mu;
}

Vec rand_scores(std::mt19937_64& rng, int K, double scale = 2.0) {
    std::normal_distribution<double> gauss(0.0, scale);
    Vec nu(K);
    for (double& v : nu) v = gauss(rng);
    return nu;
}

// ---- criterion 1 ---------------------------------------------------------

void criterion1() {
    std::mt19937_64 rng(101);
    bool ok = true;
    const double h = 1e-6;
    for (Generator gen : {Generator::NegEntropySimplex, Generator::SquaredL2}) {
        for (int t = 0; t < 1000 && ok; ++t) {
            int K = 2 + static_cast<int>(rng() % 9);
            Vec mu = rand_simplex(rng, K);
            Vec nu = rand_scores(rng, K);
            if (fy_loss(gen, mu, nu) < 0.0) ok = false;
            if (fy_loss(gen, link(gen, nu), nu) > 1e-8) ok = false;
            Vec grad = fy_loss_grad(gen, mu, nu);
            double gnorm = 0.0, dnorm = 0.0;
            for (int i = 0; i < K; ++i) {
                Vec np = nu, nm = nu;
                np[i] += h;
                nm[i] -= h;
                double fd = (fy_loss(gen, mu, np) - fy_loss(gen, mu, nm)) / (2.0 * h);
                dnorm += (fd - grad[i]) * (fd - grad[i]);
                gnorm += grad[i] * grad[i];
            }
            if (std::sqrt(dnorm) > 1e-5 * std::max(1.0, std::sqrt(gnorm))) ok = false;
        }
    }
    for (int t = 0; t < 1000 && ok; ++t) {
        int K = 2 + static_cast<int>(rng() % 9);
        int y = static_cast<int>(rng() % K);
        Vec nu = rand_scores(rng, K, 5.0);
        Vec onehot(K, 0.0);
        onehot[y] = 1.0;
        double lhs = fy_loss(Generator::NegEntropySimplex, onehot, nu);
        double rhs = -nu[y] + logsumexp(nu);
        if (std::abs(lhs - rhs) > 1e-12 * std::max(1.0, std::abs(rhs))) ok = false;
    }
    report(1, "loss property suite", ok);
}

// ---- criterion 2 ---------------------------------------------------------

void criterion2() {
    SyntheticSpec sspec;
    sspec.n_points = 600;
    sspec.input_dim = 4;
    sspec.K = 3;
    sspec.discrete_exact = true;
    sspec.distinct_x = 5;
    sspec.noise_seed = 77;
    Dataset ds = synthetic_dataset(sspec);
    EmpiricalJoint ej = empirical_joint(ds);

    bool ok = true;
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
        Generator gen = t % 2 ? Generator::NegEntropySimplex : Generator::SquaredL2;
        ModelConfig cfg = ModelConfig::arch(t % 4 < 2 ? 'a' : 'b', t % 3, 4, 3, 6);
        ParamVector theta = init_params(cfg, InitScheme::He, 500 + t);

        double lhs = 0.0;
        for (std::size_t i = 0; i < ds.size(); ++i) {
            Vec onehot(3, 0.0);
            onehot[ds.labels[i]] = 1.0;
            lhs += fy_loss(gen, onehot, forward(cfg, theta, ds.inputs[i]));
        }
        lhs /= static_cast<double>(ds.size());

        double rhs = b_omega(gen, ej.joint);
        for (std::size_t j = 0; j < ej.xs.size(); ++j) {
            rhs += ej.joint.x_mass[j] *
                   fy_loss(gen, ej.joint.cond[j], forward(cfg, theta, ej.xs[j]));
        }
        double err = std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs));
        worst = std::max(worst, err);
        if (err > 1e-10) ok = false;
    }
    char d[64];
    std::snprintf(d, sizeof(d), "max rel err %.3g", worst);
    report(2, "risk decomposition identity", ok, d);
}

// ---- criterion 3 ---------------------------------------------------------

void criterion3() {
    std::mt19937_64 rng(103);
    std::uniform_real_distribution<double> unif(0.05, 0.95);
    const int ks[3] = {0, 1, 3};
    bool ok = true;
    long degenerate = 0;
    for (int t = 0; t < 10000; ++t) {
        ModelConfig cfg = ModelConfig::arch(t % 2 ? 'b' : 'a', ks[t % 3], 8, 4, 10);
        if (t % 5 == 0) cfg.activation = Activation::Tanh;
        Generator gen = t % 2 ? Generator::NegEntropySimplex : Generator::SquaredL2;
        ParamVector theta = init_params(cfg, InitScheme::He, 1000 + t);
        Vec x(8);
        for (double& v : x) v = unif(rng);
        Vec q = rand_simplex(rng, 4);

        DiagnosticsRecord r = sandwich_check(q, cfg, gen, theta, x);
        if (r.degenerate) {
            ++degenerate;
            continue;
        }
        if (!(r.lower_bound - 1e-6 <= r.fit_err_log &&
              r.fit_err_log <= r.upper_bound + 1e-6)) {
            ok = false;
        }

        ParamVector g = loss_grad(cfg, gen, theta, x, q);
        double gn = 0.0;
        for (double v : g) gn += v * v;
        double quad = std::exp(r.grad_norm_log);
        if (std::abs(gn - quad) > 1e-9 * std::max(1.0, std::abs(quad))) ok = false;
    }
    char d[64];
    std::snprintf(d, sizeof(d), "%ld degenerate of 10000", degenerate);
    report(3, "sandwich bound and chain rule", ok && degenerate < 1000, d);
}

// ---- criterion 4 ---------------------------------------------------------

std::vector<double> roots_2x2(const SymMatrix& A) {
    double tr = A.at(0, 0) + A.at(1, 1);
    double det = A.at(0, 0) * A.at(1, 1) - A.at(0, 1) * A.at(0, 1);
    double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
    return {tr / 2.0 - disc, tr / 2.0 + disc};
}

// trigonometric closed form for a symmetric 3x3
std::vector<double> roots_3x3(const SymMatrix& A) {
    double p1 = A.at(0, 1) * A.at(0, 1) + A.at(0, 2) * A.at(0, 2) +
                A.at(1, 2) * A.at(1, 2);
    double q = (A.at(0, 0) + A.at(1, 1) + A.at(2, 2)) / 3.0;
    if (p1 == 0.0) {
        std::vector<double> r = {A.at(0, 0), A.at(1, 1), A.at(2, 2)};
        std::sort(r.begin(), r.end());
        return r;
    }
    double p2 = 0.0;
    for (int i = 0; i < 3; ++i) p2 += (A.at(i, i) - q) * (A.at(i, i) - q);
    p2 += 2.0 * p1;
    double p = std::sqrt(p2 / 6.0);
    SymMatrix B(3);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            B.at(i, j) = (A.at(i, j) - (i == j ? q : 0.0)) / p;
        }
    }
    double detB = B.at(0, 0) * (B.at(1, 1) * B.at(2, 2) - B.at(1, 2) * B.at(2, 1)) -
                  B.at(0, 1) * (B.at(1, 0) * B.at(2, 2) - B.at(1, 2) * B.at(2, 0)) +
                  B.at(0, 2) * (B.at(1, 0) * B.at(2, 1) - B.at(1, 1) * B.at(2, 0));
    double r = std::clamp(detB / 2.0, -1.0, 1.0);
    double phi = std::acos(r) / 3.0;
    double e1 = q + 2.0 * p * std::cos(phi);
    double e3 = q + 2.0 * p * std::cos(phi + 2.0 * M_PI / 3.0);
    double e2 = 3.0 * q - e1 - e3;
    std::vector<double> out = {e1, e2, e3};
    std::sort(out.begin(), out.end());
    return out;
}

void criterion4() {
    bool ok = true;
    std::mt19937_64 rng(104);
    std::normal_distribution<double> gauss(0.0, 1.0);
    auto rand_sym = [&](int n, double scale) {
        SymMatrix A(n);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j <= i; ++j) A.at(i, j) = A.at(j, i) = scale * gauss(rng);
        }
        return A;
    };

    // characteristic-polynomial oracles, 2x2 and 3x3
    for (int t = 0; t < 200; ++t) {
        SymMatrix A2 = rand_sym(2, t % 2 ? 1.0 : 50.0);
        auto e2 = sym_eig(A2).eigenvalues;
        auto o2 = roots_2x2(A2);
        for (int i = 0; i < 2; ++i) {
            if (std::abs(e2[i] - o2[i]) > 1e-10 * std::max(1.0, std::abs(o2[i]))) {
                ok = false;
            }
        }
        SymMatrix A3 = rand_sym(3, t % 2 ? 1.0 : 50.0);
        auto e3 = sym_eig(A3).eigenvalues;
        auto o3 = roots_3x3(A3);
        for (int i = 0; i < 3; ++i) {
            if (std::abs(e3[i] - o3[i]) > 1e-10 * std::max(1.0, std::abs(o3[i]))) {
                ok = false;
            }
        }
    }

    // invariants and Gershgorin inclusion on 1000 random matrices
    for (int t = 0; t < 1000; ++t) {
        int n = 2 + static_cast<int>(rng() % 9);
        SymMatrix A = rand_sym(n, 1.0);
        auto eig = sym_eig(A).eigenvalues;
        double tr = 0.0, fro2 = 0.0, sum = 0.0, sum2 = 0.0;
        for (int i = 0; i < n; ++i) tr += A.at(i, i);
        for (double v : A.a) fro2 += v * v;
        for (double l : eig) {
            sum += l;
            sum2 += l * l;
        }
        if (std::abs(sum - tr) > 1e-9 * std::max(1.0, std::abs(tr))) ok = false;
        if (std::abs(sum2 - fro2) > 1e-9 * std::max(1.0, fro2)) ok = false;
        auto discs = gershgorin(A);
        for (double l : eig) {
            bool inside = false;
            for (auto [c, rr] : discs) {
                if (l >= c - rr - 1e-9 && l <= c + rr + 1e-9) inside = true;
            }
            if (!inside) ok = false;
        }
    }
    report(4, "linear algebra oracles", ok);
}

// ---- criterion 5 ---------------------------------------------------------

void criterion5() {
    bool ok = true;
    std::string detail;
    for (auto [m, n] : {std::pair<std::size_t, int>{1000, 10}, {10000, 10}}) {
        Theorem3Bounds b = theorem3_bounds(m, n, 1.0);
        int lemma = 0, ub = 0, gb = 0;
        for (int t = 0; t < 100; ++t) {
            auto J = sample_ball_columns(m, n, 1.0, 5000 + t);
            if (independence_check(J, m, n).holds) ++lemma;
            UlgResult u = ulg(gram(J, static_cast<int>(m), n));
            if (u.U <= b.u_bound) ++ub;
            if (u.G <= b.g_bound) ++gb;
        }
        char d[96];
        std::snprintf(d, sizeof(d), "m=%zu: lemma %d/100, U %d/100, G %d/100; ", m,
                      lemma, ub, gb);
        detail += d;
        if (lemma < 90 || ub < 90 || gb < 90) ok = false;
    }
    report(5, "ball concentration and count bounds", ok, detail);
}

// ---- criterion 6 ---------------------------------------------------------

void criterion6() {
    ModelConfig lin = ModelConfig::arch('a', 0, 4, 3, 4);
    Vec x = {0.2, 0.5, 0.1, 0.8};
    RegProbeResult small = implicit_reg_probe(lin, Generator::NegEntropySimplex, x,
                                              1e-2, 10000, 61);
    RegProbeResult large = implicit_reg_probe(lin, Generator::NegEntropySimplex, x,
                                              1e-1, 10000, 62);
    bool ok = small.violations == 0 && large.violations == 0 &&
              std::isfinite(small.k_hat) && std::isfinite(large.k_hat) &&
              small.k_hat > 0.0 && large.k_hat > 0.0;
    double ratio = std::max(small.k_hat / large.k_hat, large.k_hat / small.k_hat);
    ok = ok && ratio < 2.0;
    char d[96];
    std::snprintf(d, sizeof(d), "k_hat %.4g vs %.4g, ratio %.3f", small.k_hat,
                  large.k_hat, ratio);
    report(6, "norm growth probe", ok, d);
}

// ---- criteria 7-10 run the experiment drivers ----------------------------

ExperimentSpec base_spec(const std::string& dir) {
    ExperimentSpec spec;
    spec.output_dir = dir;
    spec.subset_size = 10000;
    if (const char* img = std::getenv("MNIST_IMAGES")) spec.mnist_images = img;
    if (const char* lab = std::getenv("MNIST_LABELS")) spec.mnist_labels = lab;
    return spec;
}

fs::path g_workdir;

void criterion7() {
    ExperimentSpec spec = base_spec((g_workdir / "c7").string());
    spec.name = "convergence";
    spec.arch_labels = {'a'};
    spec.k_values = {1};
    spec.seeds = {0};
    exp_convergence(spec);

    CsvTable corr =
        read_csv((g_workdir / "c7" / "convergence_archa_k1_seed0_corr.csv").string());
    bool ok = !corr.rows.empty();
    double cu = 0.0, cl = 0.0;
    if (ok) {
        cu = corr.column("corr_upper").back();
        cl = corr.column("corr_lower").back();
        ok = cu > 0.9 && cl > 0.9;
    }
    char d[96];
    std::snprintf(d, sizeof(d), "final window corr upper %.4f, lower %.4f", cu, cl);
    report(7, "bound correlation during training", ok, d);
}

bool decreasing_with_one_inversion(const std::vector<double>& v) {
    int inversions = 0;
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (v[i] > v[i - 1]) ++inversions;
    }
    return inversions <= 1;
}

void criterion8() {
    ExperimentSpec spec = base_spec((g_workdir / "c8").string());
    spec.name = "depth-init";
    spec.arch_labels = {'a', 'b'};
    spec.k_values = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    spec.seeds = {0};
    spec.subset_size = 64;
    exp_depth_init(spec);

    CsvTable ta = read_csv((g_workdir / "c8" / "depth_init_archa.csv").string());
    CsvTable tb = read_csv((g_workdir / "c8" / "depth_init_archb.csv").string());
    bool mono = decreasing_with_one_inversion(ta.column("U")) &&
                decreasing_with_one_inversion(ta.column("L")) &&
                decreasing_with_one_inversion(ta.column("G"));
    bool jac = true;
    auto ja = ta.column("mean_abs_jacobian");
    auto jb = tb.column("mean_abs_jacobian");
    auto ks = ta.column("k");
    for (std::size_t i = 0; i < ks.size(); ++i) {
        if (ks[i] >= 4.0 && !(jb[i] > ja[i])) jac = false;
    }
    char d[128];
    std::snprintf(d, sizeof(d),
                  "U/L/G decreasing: %s; skip jacobian dominance k>=4: %s",
                  mono ? "yes" : "no", jac ? "yes" : "no");
    report(8, "depth sweep at initialization", mono && jac, d);
}

void criterion9() {
    ExperimentSpec spec = base_spec((g_workdir / "c9").string());
    spec.name = "depth-train";
    spec.arch_labels = {'a'};
    spec.k_values = {0, 1, 2, 3, 4, 5};
    spec.seeds = {0};
    exp_depth_train(spec);

    CsvTable s = read_csv((g_workdir / "c9" / "depth_train_archa_summary.csv").string());
    auto onset = s.column("onset_step");
    // -1 means the drop never happened; order it after every real step
    for (double& v : onset) {
        if (v < 0.0) v = 1e9;
    }
    int ties = 0;
    bool ok = true;
    for (std::size_t i = 1; i < onset.size(); ++i) {
        if (onset[i] < onset[i - 1]) ok = false;
        if (onset[i] == onset[i - 1]) ++ties;
    }
    ok = ok && ties <= 1;
    std::string d = "onsets";
    for (double v : onset) d += " " + std::to_string(static_cast<long>(v));
    report(9, "fitting onset delayed by depth", ok, d);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) return "<unreadable>";
    return std::string((std::istreambuf_iterator<char>(in)), {});
}

void criterion10() {
    bool ok = true;
    for (int run = 0; run < 2; ++run) {
        ExperimentSpec spec = base_spec((g_workdir / ("c10_" + std::to_string(run))).string());
        spec.name = "convergence";
        spec.arch_labels = {'a'};
        spec.k_values = {1};
        spec.seeds = {3};
        spec.subset_size = 320;
        exp_convergence(spec);
    }
    int compared = 0;
    for (const auto& entry : fs::directory_iterator(g_workdir / "c10_0")) {
        if (entry.path().extension() != ".csv") continue;
        ++compared;
        fs::path other = g_workdir / "c10_1" / entry.path().filename();
        if (slurp(entry.path()) != slurp(other)) ok = false;
    }
    ok = ok && compared > 0;
    char d[64];
    std::snprintf(d, sizeof(d), "%d csv files compared", compared);
    report(10, "byte-identical reruns", ok, d);
}

}  // namespace

int main() {
    g_workdir = fs::temp_directory_path() /
                ("fylab-acceptance-" + std::to_string(std::random_device{}()));
    fs::create_directories(g_workdir);

    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    criterion9();
    criterion10();

    fs::remove_all(g_workdir);
    std::printf("%d of 10 criteria failed\n", g_failures);
    return g_failures;
}
