#pragma once

#include "kanlab/matrix.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace kanlab {

/// Equally spaced Gaussian RBF centers; the bandwidth equals the spacing.
struct RbfGrid {
    double lo = -2.0;
    double hi = 2.0;
    std::size_t count = 8; // m

    double bandwidth() const { return (hi - lo) / static_cast<double>(count - 1); }
    double center(std::size_t i) const { return lo + bandwidth() * static_cast<double>(i); }
    void validate() const;
};

/// phi_i(z) = exp(-((z - c_i)/h)^2).
std::vector<double> rbf_basis(double z, const RbfGrid& grid);

double silu(double z);

struct KanOptions {
    bool layernorm = true; // per-sample normalization of hidden-layer inputs
    bool base_path = true; // SiLU residual path on every edge
};

/// Per-layer activations retained by forward() for the exact backward pass.
struct LayerCache {
    Matrix z;                   // batch x in, post-normalization layer input
    std::vector<double> inv_sd; // per sample, layernorm layers only
    Matrix phi;                 // batch x (in*m), RBF values at z
    Matrix sigma;               // batch x in, logistic(z), base path only
};

struct ForwardCache {
    std::vector<LayerCache> layers;
    std::vector<double> predictions;
    std::uint64_t params_hash = 0; // lets backward() reject stale caches
};

/// Stack of KAN layers. Each edge (out j, in i) carries m trainable RBF
/// coefficients plus (optionally) a SiLU base weight; node outputs are edge
/// sums. All parameters live in one flat vector ordered per layer as
/// coefficients [out][in][basis] followed by base weights [out][in].
class KanNetwork {
public:
    KanNetwork(std::vector<std::size_t> widths, RbfGrid grid, KanOptions options);

    /// Coefficients ~ Normal(0, sd = 1/sqrt(in*m)), base weights
    /// ~ Normal(0, sd = 1/sqrt(in)); deterministic per seed.
    static KanNetwork initialized(std::vector<std::size_t> widths, const RbfGrid& grid,
                                  const KanOptions& options, std::uint64_t seed);

    const std::vector<std::size_t>& widths() const { return widths_; }
    const RbfGrid& grid() const { return grid_; }
    const KanOptions& options() const { return options_; }
    std::size_t layer_count() const { return widths_.size() - 1; }
    std::size_t parameter_count() const { return params_.size(); }

    std::vector<double>& parameters() { return params_; }
    const std::vector<double>& parameters() const { return params_; }

    std::size_t coeff_index(std::size_t layer, std::size_t out, std::size_t in,
                            std::size_t basis) const;
    std::size_t base_index(std::size_t layer, std::size_t out, std::size_t in) const;

    /// Forward pass over a batch (rows = samples, cols = widths()[0]).
    ForwardCache forward(const Matrix& batch) const;

    /// d(sum_i residuals[i] * prediction_i)/d(theta) for every parameter; pass
    /// residuals[i] = dLoss/dprediction_i to get the loss gradient. Rejects a
    /// cache produced under different parameter values.
    std::vector<double> backward(const ForwardCache& cache,
                                 const std::vector<double>& residuals) const;

    void save_checkpoint(const std::string& path) const;
    static KanNetwork load_checkpoint(const std::string& path);

private:
    std::vector<std::size_t> widths_;
    RbfGrid grid_;
    KanOptions options_;
    std::vector<double> params_;
    std::vector<std::size_t> layer_offsets_;

    std::uint64_t params_hash() const;
};

} // namespace kanlab
