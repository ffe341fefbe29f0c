#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fylab/diagnostics.hpp"

namespace fylab {

struct Dataset {
    std::vector<Vec> inputs;  // pixel values scaled to [0, 1]
    std::vector<int> labels;
    int K = 0;

    std::size_t size() const { return inputs.size(); }
    int input_dim() const { return inputs.empty() ? 0 : static_cast<int>(inputs.front().size()); }
    void validate() const;
};

// IDX image/label pair, gzip-transparent (detected by magic bytes).
Dataset load_mnist_idx(const std::string& image_path, const std::string& label_path);

// Writes a dataset back out as an IDX image/label pair (uncompressed).
// Pixel values are clamped to [0,1] and quantized to bytes.
void write_idx(const Dataset& ds, int rows, int cols, const std::string& image_path,
               const std::string& label_path);

struct SyntheticSpec {
    int n_points = 100;
    int input_dim = 2;
    int K = 2;
    std::uint64_t noise_seed = 0;
    // Cluster mode: K Gaussian clusters, one label each; `separation` is
    // the mean distance between cluster centers in units of the noise sigma.
    double separation = 10.0;
    // Discrete-exact mode: `distinct_x` repeated feature vectors with known
    // conditionals, labels sampled from them.
    bool discrete_exact = false;
    int distinct_x = 5;
};

Dataset synthetic_dataset(const SyntheticSpec& spec);

// Empirical joint of a dataset: groups identical inputs and estimates
// q_{Y|x} by label frequencies. Also returns the distinct inputs.
struct EmpiricalJoint {
    DiscreteJoint joint;
    std::vector<Vec> xs;
};
EmpiricalJoint empirical_joint(const Dataset& ds);

// Heavy-ball update: v' = momentum * v + grad; theta' = theta - lr * v'.
void sgd_momentum_step(ParamVector& theta, const ParamVector& grad, ParamVector& velocity,
                       double lr, double momentum);

struct TrainConfig {
    double lr = 0.01;
    double momentum = 0.9;
    int batch_size = 64;
    int epochs = 1;
    std::uint64_t seed = 0;
    int diag_samples = 8;
    int diag_every = 1;
    bool shuffle = true;
    double label_smoothing = 0.0;

    void validate() const;
};

struct StepRecord {
    long step = 0;
    double loss = 0.0;
    DiagnosticsRecord diag;
    bool has_diag = false;
};

struct MetricLog {
    std::vector<StepRecord> records;
};

// One-epoch-style SGD training with per-step diagnostic hooks. Final
// partial batch is dropped. Deterministic given seeds.
MetricLog train(const ModelConfig& cfg, Generator gen, const Dataset& ds,
                const TrainConfig& tcfg, ParamVector* theta_out = nullptr,
                const ParamVector* theta_init = nullptr);

void write_csv(const MetricLog& log, const std::string& path);

// Parse-back of write_csv output; used by plotting and round-trip checks.
struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    int column_index(const std::string& name) const;  // -1 if absent
    std::vector<double> column(const std::string& name) const;
};
CsvTable read_csv(const std::string& path);
void write_csv_table(const CsvTable& t, const std::string& path);

}  // namespace fylab
