// Experiment driver for the fylab shared library. Uses only the C API.

#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fylab.h"

namespace {

int fail(fylab_status st) {
    std::fprintf(stderr, "error: code=%d msg=%s\n", static_cast<int>(st),
                 fylab_last_error());
    return 1;
}

struct CommonOpts {
    std::string archs = "a";
    std::vector<int> ks = {1};
    std::vector<unsigned long long> seeds = {0};
    int subset = 10000;
    std::string out = "out";
    std::string mnist_images;
    std::string mnist_labels;
    std::string generator = "entropy";
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--arch", o.archs, "arch labels, e.g. ab");
    cmd->add_option("--k", o.ks, "block counts");
    cmd->add_option("--seed", o.seeds, "seeds");
    cmd->add_option("--subset", o.subset, "dataset subset size (0 = full)");
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--mnist-images", o.mnist_images, "IDX image file (optionally .gz)");
    cmd->add_option("--mnist-labels", o.mnist_labels, "IDX label file (optionally .gz)");
    cmd->add_option("--generator", o.generator, "entropy|squared")
        ->check(CLI::IsMember({"entropy", "squared"}));
}

int run_experiment(const char* name, const CommonOpts& o) {
    fylab_experiment_spec spec{};
    spec.name = name;
    spec.arch_labels = o.archs.c_str();
    spec.k_values = o.ks.data();
    spec.k_count = static_cast<int>(o.ks.size());
    spec.seeds = o.seeds.data();
    spec.seed_count = static_cast<int>(o.seeds.size());
    spec.output_dir = o.out.c_str();
    spec.subset_size = o.subset;
    spec.mnist_images = o.mnist_images.empty() ? nullptr : o.mnist_images.c_str();
    spec.mnist_labels = o.mnist_labels.empty() ? nullptr : o.mnist_labels.c_str();
    spec.generator = o.generator == "squared" ? FYLAB_GEN_SQUARED_L2 : FYLAB_GEN_NEG_ENTROPY;
    fylab_status st = fylab_run_experiment(&spec);
    return st == FYLAB_OK ? 0 : fail(st);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fenchel-Young loss optimization diagnostics lab"};
    app.require_subcommand(1);

    CommonOpts conv, dinit, dtrain;
    auto* c1 = app.add_subcommand("convergence", "train at k=1 and log bound correlations");
    add_common(c1, conv);
    auto* c2 = app.add_subcommand("depth-init", "U/L/G and independence over a depth sweep");
    dinit.ks = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    add_common(c2, dinit);
    auto* c3 = app.add_subcommand("depth-train", "train over a depth sweep (archs a, b)");
    dtrain.ks = {0, 1, 2, 3, 4, 5};
    add_common(c3, dtrain);

    std::string csv, columns, svg_out;
    auto* c4 = app.add_subcommand("plot", "render CSV columns as an SVG line chart");
    c4->add_option("csv", csv, "input CSV")->required();
    c4->add_option("columns", columns, "comma-separated column names")->required();
    c4->add_option("--out", svg_out, "output SVG path")->required();

    auto* c5 = app.add_subcommand("validate", "run the property suite");

    CLI11_PARSE(app, argc, argv);

    if (c1->parsed()) return run_experiment("convergence", conv);
    if (c2->parsed()) return run_experiment("depth-init", dinit);
    if (c3->parsed()) return run_experiment("depth-train", dtrain);
    if (c4->parsed()) {
        fylab_status st = fylab_plot_svg(csv.c_str(), columns.c_str(), svg_out.c_str());
        return st == FYLAB_OK ? 0 : fail(st);
    }
    if (c5->parsed()) {
        int failures = 0;
        fylab_status st = fylab_validate(&failures);
        if (st != FYLAB_OK) return fail(st);
        std::printf("%d failing checks\n", failures);
        return failures == 0 ? 0 : 1;
    }
    return 1;
}
