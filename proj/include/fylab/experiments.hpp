#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "fylab/trainer.hpp"

namespace fylab {

struct ExperimentSpec {
    std::string name;                       // convergence | depth-init | depth-train
    std::vector<char> arch_labels = {'a'};
    std::vector<int> k_values = {1};
    std::vector<std::uint64_t> seeds = {0};
    std::string output_dir = ".";
    int subset_size = 10000;                // 0 = full dataset
    std::string mnist_images;               // empty: deterministic surrogate set
    std::string mnist_labels;
    Generator gen = Generator::NegEntropySimplex;
    int pearson_window = 50;

    void validate() const;
};

// MNIST when paths are given, otherwise a deterministic 10-class 28x28
// surrogate written to and re-read through the IDX code path.
Dataset load_experiment_dataset(const ExperimentSpec& spec);

// Trains each requested arch at k = 1, writes per-run metric CSVs plus
// window-50 correlation CSVs; returns the written paths.
std::vector<std::string> exp_convergence(const ExperimentSpec& spec);

// U/L/G and independence statistics at He init over a depth sweep.
std::vector<std::string> exp_depth_init(const ExperimentSpec& spec);

// Full training per (arch, k) with bound trajectories and correlations.
std::vector<std::string> exp_depth_train(const ExperimentSpec& spec);

// Minimal line chart: one polyline per requested column, x = row index.
void plot_svg(const std::string& csv_path, const std::vector<std::string>& columns,
              const std::string& out_path);

// Condensed property suite (loss identities, eigen oracles, sandwich,
// Monte-Carlo bounds); prints one line per check, returns failure count.
int validate_suite(std::ostream& os);

}  // namespace fylab
