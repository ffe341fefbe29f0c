/* C interface to the fylab shared library.
 *
 * All functions return fylab_status; FYLAB_OK is 0. On failure,
 * fylab_last_error() describes the most recent error on the calling
 * thread. Handles are opaque and freed with their _destroy function.
 */
#ifndef FYLAB_H
#define FYLAB_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
    FYLAB_OK = 0,
    FYLAB_ERR_INVALID_ARGUMENT = 1,
    FYLAB_ERR_DOMAIN = 2,
    FYLAB_ERR_IO = 3,
    FYLAB_ERR_NUMERIC = 4,
    FYLAB_ERR_UNKNOWN = 5
} fylab_status;

typedef enum {
    FYLAB_GEN_SQUARED_L2 = 0,
    FYLAB_GEN_NEG_ENTROPY = 1
} fylab_generator;

typedef enum {
    FYLAB_ACT_RELU = 0,
    FYLAB_ACT_TANH = 1,
    FYLAB_ACT_IDENTITY = 2
} fylab_activation;

typedef enum {
    FYLAB_INIT_HE = 0,
    FYLAB_INIT_XAVIER = 1,
    FYLAB_INIT_ZERO = 2
} fylab_init_scheme;

const char* fylab_version_string(void);
const char* fylab_last_error(void);

/* ---- Fenchel-Young losses -------------------------------------------- */

fylab_status fylab_fy_loss(int gen, int k, const double* mu, const double* nu,
                           double* out);
fylab_status fylab_fy_loss_grad(int gen, int k, const double* mu, const double* nu,
                                double* grad_out);
fylab_status fylab_link(int gen, int k, const double* nu, double* prob_out);
fylab_status fylab_omega_value(int gen, int k, const double* mu, double* out);
fylab_status fylab_omega_conjugate(int gen, int k, const double* nu, double* out);

/* ---- small linear algebra / diagnostics ------------------------------ */

/* a: row-major n x n symmetric matrix; eigenvalues ascending. */
fylab_status fylab_sym_eig(int n, const double* a, double* eigenvalues,
                           double* offdiag_residual);
fylab_status fylab_ulg(int n, const double* a, double* u, double* l, double* g);
fylab_status fylab_theorem3_bounds(long long m, int n, double epsilon, int printed_z,
                                   double* u_bound, double* g_bound, double* z);

/* ---- model handle ---------------------------------------------------- */

typedef struct fylab_model fylab_model;

fylab_status fylab_model_create(char arch_label, int block_count, int input_dim,
                                int output_dim, int width, int activation,
                                fylab_model** out);
void fylab_model_destroy(fylab_model* model);
fylab_status fylab_model_init(fylab_model* model, int scheme,
                              unsigned long long seed);
fylab_status fylab_model_param_count(const fylab_model* model, long long* out);
fylab_status fylab_model_forward(const fylab_model* model, const double* x,
                                 double* scores_out);
/* jac_out: row-major |theta| x output_dim. */
fylab_status fylab_model_jacobian(const fylab_model* model, const double* x,
                                  double* jac_out);

/* ---- dataset handle -------------------------------------------------- */

typedef struct fylab_dataset fylab_dataset;

fylab_status fylab_dataset_load_idx(const char* image_path, const char* label_path,
                                    fylab_dataset** out);
fylab_status fylab_dataset_synthetic(int n_points, int input_dim, int k,
                                     unsigned long long seed, int discrete_exact,
                                     fylab_dataset** out);
void fylab_dataset_destroy(fylab_dataset* ds);
fylab_status fylab_dataset_info(const fylab_dataset* ds, long long* n, int* input_dim,
                                int* k);

/* ---- training -------------------------------------------------------- */

typedef struct {
    double lr;              /* default 0.01 */
    double momentum;        /* default 0.9 */
    int batch_size;         /* default 64 */
    int epochs;             /* default 1 */
    unsigned long long seed;
    int diag_samples;       /* default 8 */
    int diag_every;         /* default 1 */
    int shuffle;            /* default 1 */
} fylab_train_config;

void fylab_train_config_defaults(fylab_train_config* cfg);

/* Trains in place (model must be initialized) and writes the metric CSV. */
fylab_status fylab_train_csv(fylab_model* model, int gen, const fylab_dataset* ds,
                             const fylab_train_config* cfg, const char* csv_path);

/* ---- experiment drivers ---------------------------------------------- */

typedef struct {
    const char* name;              /* convergence | depth-init | depth-train */
    const char* arch_labels;       /* e.g. "ab" */
    const int* k_values;
    int k_count;
    const unsigned long long* seeds;
    int seed_count;
    const char* output_dir;
    int subset_size;               /* 0 = full dataset */
    const char* mnist_images;      /* NULL: deterministic surrogate set */
    const char* mnist_labels;
    int generator;                 /* fylab_generator */
} fylab_experiment_spec;

fylab_status fylab_run_experiment(const fylab_experiment_spec* spec);

/* columns: comma-separated list of CSV column names. */
fylab_status fylab_plot_svg(const char* csv_path, const char* columns,
                            const char* out_path);

/* Runs the condensed property suite; writes one line per check to stdout.
 * failures receives the number of failed checks. */
fylab_status fylab_validate(int* failures);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* FYLAB_H */
