#pragma once

#include "kanlab/datagen.hpp"
#include "kanlab/fastkan.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace kanlab {

struct TrainConfig {
    double learning_rate = 0.005;
    std::size_t batch_size = 256;
    std::size_t epochs = 150;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::uint64_t seed = 0;

    void validate() const;
};

struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    std::size_t step = 0;

    explicit AdamState(std::size_t n) : m(n, 0.0), v(n, 0.0) {}
};

/// One bias-corrected Adam update in place. Rejects non-finite gradients.
void adam_step(AdamState& state, std::vector<double>& params,
               const std::vector<double>& grads, const TrainConfig& cfg);

/// Clipped covariance ratio: clip(Cov(pred, comp) / (Var(comp) + 1e-8), 0, 1),
/// population convention.
double recovered_amplitude(const std::vector<double>& pred, const std::vector<double>& component);

/// (1 - recovered_amplitude)^2, in [0, 1].
double component_error(const std::vector<double>& pred, const std::vector<double>& component);

struct EpochRecord {
    std::size_t epoch = 0;
    double test_mse = 0.0;
    double e_low = 0.0;
    double e_mid = 0.0;
    double e_high = 0.0;
};

struct RunMeta {
    std::string variant; // "kan" | "dct-kan"
    std::size_t order = 1;
    double rho1 = 0.0;
    std::uint64_t seed = 0;
};

struct RunHistory {
    RunMeta meta;
    double initial_test_mse = 0.0; // before the first update
    std::vector<EpochRecord> epochs;
    std::vector<double> final_params;
};

/// Minibatch MSE training: per epoch the training rows are reshuffled from the
/// run's shuffle substream, every minibatch triggers one Adam update, and the
/// full test split is evalued afterwards. Aborts if the test MSE goes
/// non-finite. The network's input matrix is passed explicitly so callers can
/// substitute a transformed representation while keeping dataset targets.
RunHistory train(KanNetwork& net, const Matrix& inputs, const Dataset& ds,
                 const TrainConfig& cfg, const RunMeta& meta);

/// Mean/sd aggregation of homogeneous runs, keyed (variant, rho1, epoch).
struct SweepRow {
    std::string variant;
    std::size_t order = 0;
    double rho1 = 0.0;
    std::size_t epoch = 0;
    std::size_t runs = 0;
    double test_mse_mean = 0.0, test_mse_sd = 0.0;
    double e_low_mean = 0.0, e_low_sd = 0.0;
    double e_mid_mean = 0.0, e_mid_sd = 0.0;
    double e_high_mean = 0.0, e_high_sd = 0.0;
};

struct SweepTable {
    std::vector<SweepRow> rows; // sorted by (variant, rho1, epoch)
};

SweepTable aggregate_runs(const std::vector<RunHistory>& histories);

/// History CSV: variant,N,rho1,seed,epoch,test_mse,e_low,e_mid,e_high.
void write_history_csv(const std::vector<RunHistory>& histories, const std::string& path);
std::vector<RunHistory> read_history_csv(const std::string& path);

/// Sweep CSV: variant,N,rho1,epoch,runs plus _mean/_sd columns per metric.
void write_sweep_csv(const SweepTable& table, const std::string& path);

} // namespace kanlab
