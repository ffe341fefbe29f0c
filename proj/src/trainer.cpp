#include "fylab/trainer.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

namespace fylab {

void Dataset::validate() const {
    if (inputs.empty() || inputs.size() != labels.size() || K < 2) {
        throw std::invalid_argument("Dataset: empty or inconsistent");
    }
    const std::size_t dim = inputs.front().size();
    for (const auto& x : inputs) {
        if (x.size() != dim) throw std::invalid_argument("Dataset: ragged inputs");
        for (double v : x) {
            if (!std::isfinite(v)) throw std::invalid_argument("Dataset: non-finite input");
        }
    }
    for (int y : labels) {
        if (y < 0 || y >= K) throw std::invalid_argument("Dataset: label out of range");
    }
}

namespace {

std::vector<unsigned char> read_file_maybe_gzip(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<unsigned char> raw((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
    if (raw.size() >= 2 && raw[0] == 0x1f && raw[1] == 0x8b) {
        // gzip; inflate in chunks
        std::vector<unsigned char> out;
        z_stream zs;
        std::memset(&zs, 0, sizeof(zs));
        if (inflateInit2(&zs, 16 + MAX_WBITS) != Z_OK) {
            throw std::runtime_error("gzip init failed for " + path);
        }
        zs.next_in = raw.data();
        zs.avail_in = static_cast<uInt>(raw.size());
        std::vector<unsigned char> buf(1 << 16);
        int ret = Z_OK;
        do {
            zs.next_out = buf.data();
            zs.avail_out = static_cast<uInt>(buf.size());
            ret = inflate(&zs, Z_NO_FLUSH);
            if (ret != Z_OK && ret != Z_STREAM_END) {
                inflateEnd(&zs);
                throw std::runtime_error("gzip decode failed for " + path);
            }
            out.insert(out.end(), buf.data(), buf.data() + (buf.size() - zs.avail_out));
        } while (ret != Z_STREAM_END);
        inflateEnd(&zs);
        return out;
    }
    return raw;
}

std::uint32_t be32(const unsigned char* p) {
    return (std::uint32_t(p[0]) << 24) | (std::uint32_t(p[1]) << 16) |
           (std::uint32_t(p[2]) << 8) | std::uint32_t(p[3]);
}

void put_be32(std::ofstream& out, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v >> 24),
                          static_cast<unsigned char>(v >> 16),
                          static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

}  // namespace

Dataset load_mnist_idx(const std::string& image_path, const std::string& label_path) {
    auto img = read_file_maybe_gzip(image_path);
    auto lab = read_file_maybe_gzip(label_path);
    if (img.size() < 16) throw std::runtime_error("truncated image file " + image_path);
    if (lab.size() < 8) throw std::runtime_error("truncated label file " + label_path);
    if (be32(img.data()) != 2051) {
        throw std::runtime_error("bad image magic in " + image_path);
    }
    if (be32(lab.data()) != 2049) {
        throw std::runtime_error("bad label magic in " + label_path);
    }
    const std::uint32_t n = be32(img.data() + 4);
    const std::uint32_t rows = be32(img.data() + 8);
    const std::uint32_t cols = be32(img.data() + 12);
    const std::uint32_t nl = be32(lab.data() + 4);
    if (n != nl) {
        throw std::runtime_error("image/label count mismatch: " + image_path);
    }
    const std::size_t px = static_cast<std::size_t>(rows) * cols;
    if (img.size() != 16 + static_cast<std::size_t>(n) * px) {
        throw std::runtime_error("truncated image data in " + image_path);
    }
    if (lab.size() != 8 + n) {
        throw std::runtime_error("truncated label data in " + label_path);
    }
    Dataset ds;
    ds.K = 10;
    ds.inputs.reserve(n);
    ds.labels.reserve(n);
    const unsigned char* p = img.data() + 16;
    for (std::uint32_t i = 0; i < n; ++i) {
        Vec x(px);
        for (std::size_t j = 0; j < px; ++j) x[j] = p[j] / 255.0;
        ds.inputs.push_back(std::move(x));
        p += px;
        int y = lab[8 + i];
        if (y < 0 || y > 9) throw std::runtime_error("label out of range in " + label_path);
        ds.labels.push_back(y);
    }
    ds.validate();
    return ds;
}

void write_idx(const Dataset& ds, int rows, int cols, const std::string& image_path,
               const std::string& label_path) {
    ds.validate();
    if (rows * cols != ds.input_dim()) {
        throw std::invalid_argument("write_idx: rows*cols != input_dim");
    }
    std::ofstream img(image_path, std::ios::binary);
    if (!img) throw std::runtime_error("cannot write " + image_path);
    put_be32(img, 2051);
    put_be32(img, static_cast<std::uint32_t>(ds.size()));
    put_be32(img, static_cast<std::uint32_t>(rows));
    put_be32(img, static_cast<std::uint32_t>(cols));
    for (const auto& x : ds.inputs) {
        for (double v : x) {
            double c = std::clamp(v, 0.0, 1.0);
            unsigned char b = static_cast<unsigned char>(std::lround(c * 255.0));
            img.write(reinterpret_cast<const char*>(&b), 1);
        }
    }
    std::ofstream lab(label_path, std::ios::binary);
    if (!lab) throw std::runtime_error("cannot write " + label_path);
    put_be32(lab, 2049);
    put_be32(lab, static_cast<std::uint32_t>(ds.size()));
    for (int y : ds.labels) {
        unsigned char b = static_cast<unsigned char>(y);
        lab.write(reinterpret_cast<const char*>(&b), 1);
    }
}

Dataset synthetic_dataset(const SyntheticSpec& spec) {
    if (spec.n_points < spec.K || spec.K < 2 || spec.input_dim < 1) {
        throw std::invalid_argument("synthetic_dataset: bad spec");
    }
    std::mt19937_64 rng(spec.noise_seed);
    Dataset ds;
    ds.K = spec.K;
    if (spec.discrete_exact) {
        // Finite set of distinct feature vectors; conditionals fixed and
        // recoverable by frequency counting.
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        std::vector<Vec> xs(spec.distinct_x);
        std::vector<Vec> cond(spec.distinct_x);
        for (int i = 0; i < spec.distinct_x; ++i) {
            Vec x(spec.input_dim);
            for (double& v : x) {
                // quantized so repeated x compare bit-equal
                v = std::round(unif(rng) * 16.0) / 16.0;
            }
            xs[i] = std::move(x);
            Vec q(spec.K);
            double s = 0.0;
            for (double& v : q) {
                v = 0.1 + unif(rng);
                s += v;
            }
            for (double& v : q) v /= s;
            cond[i] = std::move(q);
        }
        std::uniform_int_distribution<int> pick(0, spec.distinct_x - 1);
        for (int i = 0; i < spec.n_points; ++i) {
            int xi = pick(rng);
            double u = unif(rng), acc = 0.0;
            int y = spec.K - 1;
            for (int c = 0; c < spec.K; ++c) {
                acc += cond[xi][c];
                if (u <= acc) { y = c; break; }
            }
            ds.inputs.push_back(xs[xi]);
            ds.labels.push_back(y);
        }
    } else {
        std::normal_distribution<double> gauss(0.0, 1.0);
        std::vector<Vec> centers(spec.K, Vec(spec.input_dim));
        for (auto& c : centers) {
            for (double& v : c) v = gauss(rng) * spec.separation / std::sqrt(2.0);
        }
        std::uniform_int_distribution<int> pick(0, spec.K - 1);
        for (int i = 0; i < spec.n_points; ++i) {
            int y = pick(rng);
            Vec x(spec.input_dim);
            for (int d = 0; d < spec.input_dim; ++d) {
                x[d] = centers[y][d] + gauss(rng);
            }
            ds.inputs.push_back(std::move(x));
            ds.labels.push_back(y);
        }
    }
    ds.validate();
    return ds;
}

EmpiricalJoint empirical_joint(const Dataset& ds) {
    ds.validate();
    EmpiricalJoint out;
    std::vector<std::vector<int>> counts;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        std::size_t idx = out.xs.size();
        for (std::size_t j = 0; j < out.xs.size(); ++j) {
            if (out.xs[j] == ds.inputs[i]) { idx = j; break; }
        }
        if (idx == out.xs.size()) {
            out.xs.push_back(ds.inputs[i]);
            counts.emplace_back(ds.K, 0);
        }
        counts[idx][ds.labels[i]] += 1;
    }
    const double n = static_cast<double>(ds.size());
    for (std::size_t j = 0; j < out.xs.size(); ++j) {
        int tot = std::accumulate(counts[j].begin(), counts[j].end(), 0);
        Vec q(ds.K);
        for (int c = 0; c < ds.K; ++c) q[c] = counts[j][c] / static_cast<double>(tot);
        out.joint.cond.push_back(std::move(q));
        out.joint.x_mass.push_back(tot / n);
    }
    return out;
}

void sgd_momentum_step(ParamVector& theta, const ParamVector& grad, ParamVector& velocity,
                       double lr, double momentum) {
    if (theta.size() != grad.size() || theta.size() != velocity.size()) {
        throw std::invalid_argument("sgd_momentum_step: size mismatch");
    }
    for (std::size_t i = 0; i < theta.size(); ++i) {
        velocity[i] = momentum * velocity[i] + grad[i];
        theta[i] -= lr * velocity[i];
    }
}

void TrainConfig::validate() const {
    if (lr <= 0.0 || momentum < 0.0 || momentum >= 1.0 || batch_size < 1 || epochs < 1 ||
        diag_samples < 1 || diag_every < 1 || label_smoothing < 0.0 || label_smoothing >= 1.0) {
        throw std::invalid_argument("TrainConfig: bad values");
    }
}

namespace {

Vec smoothed_onehot(int y, int K, double smoothing) {
    Vec q(K, smoothing / K);
    q[y] += 1.0 - smoothing;
    return q;
}

}  // namespace

MetricLog train(const ModelConfig& cfg, Generator gen, const Dataset& ds,
                const TrainConfig& tcfg, ParamVector* theta_out,
                const ParamVector* theta_init) {
    cfg.validate();
    tcfg.validate();
    ds.validate();
    if (ds.K != cfg.output_dim || ds.input_dim() != cfg.input_dim) {
        throw std::invalid_argument("train: dataset does not match model shape");
    }
    if (ds.size() < static_cast<std::size_t>(tcfg.batch_size)) {
        throw std::invalid_argument("train: batch size exceeds dataset size");
    }

    ParamVector theta = theta_init ? *theta_init
                                   : init_params(cfg, InitScheme::He, tcfg.seed);
    if (theta.size() != param_count(cfg)) {
        throw std::invalid_argument("train: theta_init has wrong length");
    }
    ParamVector velocity(theta.size(), 0.0);

    std::vector<std::size_t> order(ds.size());
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 shuffle_rng(tcfg.seed ^ 0x9e3779b97f4a7c15ULL);

    MetricLog log;
    long step = 0;
    const std::size_t steps_per_epoch = ds.size() / tcfg.batch_size;  // partial batch dropped
    for (int epoch = 0; epoch < tcfg.epochs; ++epoch) {
        if (tcfg.shuffle) {
            std::shuffle(order.begin(), order.end(), shuffle_rng);
        }
        for (std::size_t b = 0; b < steps_per_epoch; ++b) {
            const std::size_t base = b * tcfg.batch_size;
            ParamVector grad(theta.size(), 0.0);
            double loss = 0.0;
            for (int s = 0; s < tcfg.batch_size; ++s) {
                std::size_t i = order[base + s];
                Vec target = smoothed_onehot(ds.labels[i], ds.K, tcfg.label_smoothing);
                Vec f = forward(cfg, theta, ds.inputs[i]);
                loss += fy_loss(gen, target, f);
                ParamVector g = backprop(cfg, theta, ds.inputs[i],
                                         fy_loss_grad(gen, target, f));
                for (std::size_t p = 0; p < grad.size(); ++p) grad[p] += g[p];
            }
            const double inv = 1.0 / tcfg.batch_size;
            loss *= inv;
            for (double& g : grad) g *= inv;
            if (!std::isfinite(loss)) {
                std::ostringstream os;
                os << "train: non-finite loss at step " << step;
                throw std::runtime_error(os.str());
            }

            StepRecord rec;
            rec.step = step;
            rec.loss = loss;
            if (step % tcfg.diag_every == 0) {
                // Diagnostics on the first diag_samples samples of the batch,
                // averaged arithmetically in the logged quantities.
                int d = std::min(tcfg.diag_samples, tcfg.batch_size);
                DiagnosticsRecord avg;
                int used = 0;
                bool all_ok = true;
                for (int s = 0; s < d; ++s) {
                    std::size_t i = order[base + s];
                    Vec target = smoothed_onehot(ds.labels[i], ds.K, tcfg.label_smoothing);
                    DiagnosticsRecord r =
                        sandwich_check(target, cfg, gen, theta, ds.inputs[i]);
                    if (r.degenerate) continue;
                    avg.fit_err_log += r.fit_err_log;
                    avg.grad_norm_log += r.grad_norm_log;
                    avg.U += r.U;
                    avg.L += r.L;
                    avg.G += r.G;
                    avg.S += r.S;
                    avg.upper_bound += r.upper_bound;
                    avg.lower_bound += r.lower_bound;
                    all_ok = all_ok && r.sandwich_ok;
                    ++used;
                }
                if (used > 0) {
                    const double du = 1.0 / used;
                    avg.fit_err_log *= du;
                    avg.grad_norm_log *= du;
                    avg.U *= du;
                    avg.L *= du;
                    avg.G *= du;
                    avg.S *= du;
                    avg.upper_bound *= du;
                    avg.lower_bound *= du;
                    avg.sandwich_ok = all_ok;
                    avg.samples_used = used;
                    avg.step = step;
                    rec.diag = avg;
                    rec.has_diag = true;
                }
            }
            log.records.push_back(std::move(rec));

            sgd_momentum_step(theta, grad, velocity, tcfg.lr, tcfg.momentum);
            ++step;
        }
    }
    if (theta_out) *theta_out = std::move(theta);
    return log;
}

namespace {

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void write_csv(const MetricLog& log, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "step,loss,fit_err_log,grad_norm_log,U,L,G,S,upper_bound,lower_bound,"
           "sandwich_ok,samples_used\n";
    for (const auto& r : log.records) {
        out << r.step << ',' << fmt17(r.loss) << ',';
        if (r.has_diag) {
            const auto& d = r.diag;
            out << fmt17(d.fit_err_log) << ',' << fmt17(d.grad_norm_log) << ','
                << fmt17(d.U) << ',' << fmt17(d.L) << ',' << fmt17(d.G) << ','
                << fmt17(d.S) << ',' << fmt17(d.upper_bound) << ','
                << fmt17(d.lower_bound) << ',' << (d.sandwich_ok ? 1 : 0) << ','
                << d.samples_used << '\n';
        } else {
            out << "nan,nan,nan,nan,nan,nan,nan,nan,0,0\n";
        }
    }
    if (!out) throw std::runtime_error("write failed for " + path);
}

int CsvTable::column_index(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i] == name) return static_cast<int>(i);
    }
    return -1;
}

std::vector<double> CsvTable::column(const std::string& name) const {
    int idx = column_index(name);
    if (idx < 0) throw std::invalid_argument("missing column: " + name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r[idx]);
    return out;
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    CsvTable t;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty csv " + path);
    std::stringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) t.columns.push_back(cell);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ls(line);
        while (std::getline(ls, cell, ',')) {
            row.push_back(cell == "nan" || cell.empty()
                              ? std::numeric_limits<double>::quiet_NaN()
                              : std::stod(cell));
        }
        if (row.size() != t.columns.size()) {
            throw std::runtime_error("ragged csv row in " + path);
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

void write_csv_table(const CsvTable& t, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
        out << (i ? "," : "") << t.columns[i];
    }
    out << '\n';
    for (const auto& r : t.rows) {
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (i) out << ',';
            if (std::isnan(r[i])) {
                out << "nan";
            } else {
                out << fmt17(r[i]);
            }
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error("write failed for " + path);
}

}  // namespace fylab
