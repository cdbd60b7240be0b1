#pragma once

#include "kanlab/matrix.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace kanlab {

/// AR(N) generator parameters: x_t = rho1*x_{t-1} + rho2*sum_{i=2..N} x_{t-i}
/// + sqrt(1 - rho1^2 - (N-1)*rho2^2) * eps_t.
struct ArConfig {
    std::size_t order = 1; // N
    double rho1 = 0.0;
    double rho2 = 0.0;
    std::size_t length = 5000;
    std::uint64_t seed = 0;

    std::size_t lags() const { return 3 * order; } // p = 3N

    void validate() const;
};

/// Target construction: y = sin(w_low*V_easy) + sin(w_mid*V_hard)
/// + sin(w_high*V_hard) + noise.
struct TargetSpec {
    double omega_low = 1.0;
    double omega_mid = 3.0;
    double omega_high = 6.0;
    double noise_sd = 0.05;

    void validate() const;
};

/// Column-wise affine map fitted on training rows (population variance).
struct Standardizer {
    std::vector<double> means;
    std::vector<double> sds;

    Matrix apply(const Matrix& x) const;
};

/// Fits means/sds on the first `train_rows` rows of x. Rejects zero-variance
/// columns.
Standardizer fit_standardizer(const Matrix& x, std::size_t train_rows);

struct TargetBundle {
    std::vector<double> y;
    std::vector<double> c_low;
    std::vector<double> c_mid;
    std::vector<double> c_high;
    std::vector<double> noise;
    std::vector<double> v_easy;
    std::vector<double> v_hard;
};

/// Windowed, standardized, target-annotated dataset with a chronological
/// train/test split at `split_index` (first test row).
struct Dataset {
    Matrix windows;       // raw lag windows, newest lag first
    Matrix inputs;        // standardized windows (the KAN input)
    Standardizer standardizer;
    TargetBundle targets;
    std::vector<std::size_t> window_time; // series index of each row's newest lag
    std::size_t split_index = 0;

    std::size_t rows() const { return windows.rows(); }
    std::size_t lag_count() const { return windows.cols(); }
    std::size_t train_rows() const { return split_index; }
    std::size_t test_rows() const { return rows() - split_index; }

    void export_csv(const std::string& path) const;
    static Dataset import_csv(const std::string& path);
};

/// Generates `cfg.length` AR(N) samples after discarding a 10*N burn-in from a
/// zero initial state. Deterministic per seed.
std::vector<double> generate_ar(const ArConfig& cfg);

/// Lagged windows: row t holds [x_t, x_{t-1}, ..., x_{t-p+1}]; one row per
/// supervised time step, so row count = length - p.
struct WindowSet {
    Matrix x;
    std::vector<std::size_t> time; // newest-lag index per row
};
WindowSet build_windows(const std::vector<double>& series, std::size_t p);

/// Projection targets built from standardized windows; V_easy/V_hard are
/// normalized with statistics from the first `train_rows` rows.
TargetBundle build_targets(const Matrix& x_std, const TargetSpec& spec, std::uint64_t seed,
                           std::size_t train_rows);

/// Biased sample autocorrelation r(0..max_lag) with r(0) = 1.
std::vector<double> sample_acf(const std::vector<double>& series, std::size_t max_lag);

/// floor(ratio * rows); rejects splits that leave either side empty.
std::size_t chronological_split(std::size_t rows, double ratio);

/// Full pipeline: series -> windows -> split -> standardize (train stats) ->
/// targets (train-row projection normalization).
Dataset make_dataset(const ArConfig& cfg, const TargetSpec& spec, double split_ratio = 0.8);

} // namespace kanlab
