#include "kanlab/fastkan.hpp"

#include "kanlab/csv.hpp"
#include "kanlab/rng.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace kanlab {

namespace {

constexpr double kLnEps = 1e-5;

// All m RBF values at z, evaluated outward from the nearest center: with
// u = (z - lo)/h the ratio phi_{l+1}/phi_l is exp(2(u-l) - 1), which shrinks
// by e^{-2} per step away from the peak, so the recurrence needs two exp()
// calls, never overflows, and keeps every value accurate to a few ulps.
void rbf_row(double z, const RbfGrid& grid, double* out) {
    const std::size_t m = grid.count;
    const double u = (z - grid.lo) / grid.bandwidth();
    std::size_t peak = 0;
    if (u + 0.5 >= static_cast<double>(m - 1))
        peak = m - 1;
    else if (u > 0.0)
        peak = static_cast<std::size_t>(u + 0.5);
    const double d = u - static_cast<double>(peak);
    out[peak] = std::exp(-d * d);
    const double e2 = std::exp(-2.0);
    if (peak + 1 < m) {
        double g = std::exp(2.0 * d - 1.0);
        for (std::size_t l = peak + 1; l < m; ++l) {
            out[l] = out[l - 1] * g;
            g *= e2;
        }
    }
    if (peak > 0) {
        double g = e2 / std::exp(2.0 * d - 1.0); // exp(-2d - 1)
        for (std::size_t l = peak; l-- > 0;) {
            out[l] = out[l + 1] * g;
            g *= e2;
        }
    }
}

} // namespace

void RbfGrid::validate() const {
    if (count < 2) throw std::invalid_argument("RbfGrid: need at least 2 centers");
    if (!(hi > lo)) throw std::invalid_argument("RbfGrid: domain must satisfy hi > lo");
}

std::vector<double> rbf_basis(double z, const RbfGrid& grid) {
    grid.validate();
    if (!std::isfinite(z)) throw std::invalid_argument("rbf_basis: non-finite input");
    const double h = grid.bandwidth();
    std::vector<double> out(grid.count);
    for (std::size_t i = 0; i < grid.count; ++i) {
        const double t = (z - grid.center(i)) / h;
        out[i] = std::exp(-t * t);
    }
    return out;
}

double silu(double z) { return z / (1.0 + std::exp(-z)); }

KanNetwork::KanNetwork(std::vector<std::size_t> widths, RbfGrid grid, KanOptions options)
    : widths_(std::move(widths)), grid_(grid), options_(options) {
    grid_.validate();
    if (widths_.size() < 2) throw std::invalid_argument("KanNetwork: need at least 2 widths");
    for (std::size_t w : widths_)
        if (w == 0) throw std::invalid_argument("KanNetwork: zero layer width");
    if (widths_.back() != 1)
        throw std::invalid_argument("KanNetwork: output width must be 1");

    layer_offsets_.resize(layer_count() + 1);
    layer_offsets_[0] = 0;
    for (std::size_t l = 0; l < layer_count(); ++l) {
        const std::size_t edges = widths_[l] * widths_[l + 1];
        std::size_t block = edges * grid_.count;
        if (options_.base_path) block += edges;
        layer_offsets_[l + 1] = layer_offsets_[l] + block;
    }
    params_.assign(layer_offsets_.back(), 0.0);
}

KanNetwork KanNetwork::initialized(std::vector<std::size_t> widths, const RbfGrid& grid,
                                   const KanOptions& options, std::uint64_t seed) {
    KanNetwork net(std::move(widths), grid, options);
    RandomStream rng(mix_seed(seed, stream::net_init));
    const std::size_t m = grid.count;
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
        const std::size_t in = net.widths_[l];
        const std::size_t out = net.widths_[l + 1];
        const double coeff_sd = 1.0 / std::sqrt(static_cast<double>(in * m));
        const double base_sd = 1.0 / std::sqrt(static_cast<double>(in));
        double* block = net.params_.data() + net.layer_offsets_[l];
        for (std::size_t t = 0; t < out * in * m; ++t) block[t] = coeff_sd * rng.normal();
        if (options.base_path)
            for (std::size_t t = 0; t < out * in; ++t)
                block[out * in * m + t] = base_sd * rng.normal();
    }
    return net;
}

std::size_t KanNetwork::coeff_index(std::size_t layer, std::size_t out, std::size_t in,
                                    std::size_t basis) const {
    return layer_offsets_[layer] + (out * widths_[layer] + in) * grid_.count + basis;
}

std::size_t KanNetwork::base_index(std::size_t layer, std::size_t out, std::size_t in) const {
    if (!options_.base_path)
        throw std::invalid_argument("KanNetwork: base path disabled, no base weights");
    return layer_offsets_[layer] + widths_[layer + 1] * widths_[layer] * grid_.count +
           out * widths_[layer] + in;
}

std::uint64_t KanNetwork::params_hash() const {
    std::uint64_t h = 1469598103934665603ull; // FNV-1a over the raw bit patterns
    for (double v : params_) {
        h ^= std::bit_cast<std::uint64_t>(v);
        h *= 1099511628211ull;
    }
    return h;
}

ForwardCache KanNetwork::forward(const Matrix& batch) const {
    if (batch.cols() != widths_.front())
        throw std::invalid_argument("KanNetwork::forward: input width mismatch");
    const std::size_t bsz = batch.rows();
    const std::size_t m = grid_.count;

    ForwardCache cache;
    cache.params_hash = params_hash();
    cache.layers.reserve(layer_count());

    Matrix x = batch;
    for (std::size_t l = 0; l < layer_count(); ++l) {
        const std::size_t in = widths_[l];
        const std::size_t out = widths_[l + 1];
        const bool ln = options_.layernorm && l > 0;

        LayerCache lc;
        if (ln) {
            lc.z = Matrix(bsz, in);
            lc.inv_sd.resize(bsz);
            const double inv_n = 1.0 / static_cast<double>(in);
            for (std::size_t i = 0; i < bsz; ++i) {
                double mean = 0.0;
                for (std::size_t c = 0; c < in; ++c) mean += x(i, c);
                mean *= inv_n;
                double var = 0.0;
                for (std::size_t c = 0; c < in; ++c) {
                    const double d = x(i, c) - mean;
                    var += d * d;
                }
                var *= inv_n;
                const double inv_sd = 1.0 / std::sqrt(var + kLnEps);
                lc.inv_sd[i] = inv_sd;
                for (std::size_t c = 0; c < in; ++c) lc.z(i, c) = (x(i, c) - mean) * inv_sd;
            }
        } else {
            lc.z = std::move(x);
        }

        lc.phi = Matrix(bsz, in * m);
        for (std::size_t i = 0; i < bsz; ++i) {
            double* prow = lc.phi.row(i).data();
            for (std::size_t c = 0; c < in; ++c) rbf_row(lc.z(i, c), grid_, prow + c * m);
        }
        if (options_.base_path) {
            lc.sigma = Matrix(bsz, in);
            for (std::size_t i = 0; i < bsz; ++i)
                for (std::size_t c = 0; c < in; ++c)
                    lc.sigma(i, c) = 1.0 / (1.0 + std::exp(-lc.z(i, c)));
        }

        Matrix next(bsz, out);
        const double* coeffs = params_.data() + layer_offsets_[l];
        const double* bases = coeffs + out * in * m;
        for (std::size_t i = 0; i < bsz; ++i) {
            const double* prow = lc.phi.row(i).data();
            for (std::size_t j = 0; j < out; ++j) {
                const double* cj = coeffs + j * in * m;
                double acc = 0.0;
                for (std::size_t t = 0; t < in * m; ++t) acc += cj[t] * prow[t];
                if (options_.base_path) {
                    const double* wj = bases + j * in;
                    for (std::size_t c = 0; c < in; ++c)
                        acc += wj[c] * lc.z(i, c) * lc.sigma(i, c);
                }
                next(i, j) = acc;
            }
        }
        x = std::move(next);
        cache.layers.push_back(std::move(lc));
    }

    cache.predictions.resize(bsz);
    for (std::size_t i = 0; i < bsz; ++i) cache.predictions[i] = x(i, 0);
    return cache;
}

std::vector<double> KanNetwork::backward(const ForwardCache& cache,
                                         const std::vector<double>& residuals) const {
    if (cache.params_hash != params_hash())
        throw std::invalid_argument("KanNetwork::backward: stale forward cache");
    if (cache.layers.size() != layer_count())
        throw std::invalid_argument("KanNetwork::backward: cache layer count mismatch");
    const std::size_t bsz = cache.predictions.size();
    if (residuals.size() != bsz)
        throw std::invalid_argument("KanNetwork::backward: residual length mismatch");

    const std::size_t m = grid_.count;
    const double h = grid_.bandwidth();
    std::vector<double> grads(params_.size(), 0.0);

    Matrix dout(bsz, 1);
    for (std::size_t i = 0; i < bsz; ++i) dout(i, 0) = residuals[i];

    std::vector<double> sphi;
    std::vector<double> sbase;
    for (std::size_t l = layer_count(); l-- > 0;) {
        const LayerCache& lc = cache.layers[l];
        const std::size_t in = widths_[l];
        const std::size_t out = widths_[l + 1];
        const bool ln = options_.layernorm && l > 0;

        const double* coeffs = params_.data() + layer_offsets_[l];
        const double* bases = coeffs + out * in * m;
        double* gcoeffs = grads.data() + layer_offsets_[l];
        double* gbases = gcoeffs + out * in * m;

        Matrix dz(bsz, in);
        sphi.assign(in * m, 0.0);
        sbase.assign(in, 0.0);
        for (std::size_t i = 0; i < bsz; ++i) {
            const double* prow = lc.phi.row(i).data();
            const double* drow = dout.row(i).data();
            std::fill(sphi.begin(), sphi.end(), 0.0);
            if (options_.base_path) std::fill(sbase.begin(), sbase.end(), 0.0);

            for (std::size_t j = 0; j < out; ++j) {
                const double dj = drow[j];
                if (dj == 0.0) continue;
                const double* cj = coeffs + j * in * m;
                double* gj = gcoeffs + j * in * m;
                for (std::size_t t = 0; t < in * m; ++t) {
                    gj[t] += dj * prow[t];
                    sphi[t] += dj * cj[t];
                }
                if (options_.base_path) {
                    const double* wj = bases + j * in;
                    double* gwj = gbases + j * in;
                    for (std::size_t c = 0; c < in; ++c) {
                        gwj[c] += dj * lc.z(i, c) * lc.sigma(i, c);
                        sbase[c] += dj * wj[c];
                    }
                }
            }

            for (std::size_t c = 0; c < in; ++c) {
                const double z = lc.z(i, c);
                const double u = (z - grid_.lo) / h;
                double acc = 0.0;
                for (std::size_t b = 0; b < m; ++b)
                    acc += sphi[c * m + b] * prow[c * m + b] * (u - static_cast<double>(b));
                acc *= -2.0 / h;
                if (options_.base_path) {
                    const double s = lc.sigma(i, c);
                    acc += sbase[c] * s * (1.0 + z * (1.0 - s));
                }
                dz(i, c) = acc;
            }
        }

        if (ln) {
            Matrix dx(bsz, in);
            const double inv_n = 1.0 / static_cast<double>(in);
            for (std::size_t i = 0; i < bsz; ++i) {
                double mean_dz = 0.0;
                double mean_dzz = 0.0;
                for (std::size_t c = 0; c < in; ++c) {
                    mean_dz += dz(i, c);
                    mean_dzz += dz(i, c) * lc.z(i, c);
                }
                mean_dz *= inv_n;
                mean_dzz *= inv_n;
                for (std::size_t c = 0; c < in; ++c)
                    dx(i, c) = lc.inv_sd[i] * (dz(i, c) - mean_dz - lc.z(i, c) * mean_dzz);
            }
            dout = std::move(dx);
        } else {
            dout = std::move(dz);
        }
    }
    return grads;
}

void KanNetwork::save_checkpoint(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_checkpoint: cannot open " + path);
    out << "widths,";
    for (std::size_t i = 0; i < widths_.size(); ++i)
        out << (i ? ";" : "") << widths_[i];
    out << "\n";
    out << "grid_lo," << format_double(grid_.lo) << "\n";
    out << "grid_hi," << format_double(grid_.hi) << "\n";
    out << "grid_count," << grid_.count << "\n";
    out << "layernorm," << (options_.layernorm ? 1 : 0) << "\n";
    out << "base_path," << (options_.base_path ? 1 : 0) << "\n";
    out << "param_count," << params_.size() << "\n";
    for (double v : params_) out << format_double(v) << "\n";
    if (!out) throw std::runtime_error("save_checkpoint: write failed for " + path);
}

KanNetwork KanNetwork::load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_checkpoint: cannot open " + path);

    auto next_field = [&](const std::string& key) {
        std::string line;
        if (!std::getline(in, line))
            throw std::runtime_error("load_checkpoint: truncated header in " + path);
        const auto comma = line.find(',');
        if (comma == std::string::npos || line.substr(0, comma) != key)
            throw std::runtime_error("load_checkpoint: expected '" + key + "' in " + path);
        return line.substr(comma + 1);
    };

    std::vector<std::size_t> widths;
    {
        std::istringstream ws(next_field("widths"));
        std::string tok;
        while (std::getline(ws, tok, ';')) widths.push_back(std::stoull(tok));
    }
    RbfGrid grid;
    grid.lo = std::stod(next_field("grid_lo"));
    grid.hi = std::stod(next_field("grid_hi"));
    grid.count = std::stoull(next_field("grid_count"));
    KanOptions options;
    options.layernorm = next_field("layernorm") == "1";
    options.base_path = next_field("base_path") == "1";
    const std::size_t count = std::stoull(next_field("param_count"));

    KanNetwork net(widths, grid, options);
    if (net.params_.size() != count)
        throw std::runtime_error("load_checkpoint: parameter count mismatch in " + path);
    std::string line;
    for (std::size_t i = 0; i < count; ++i) {
        if (!std::getline(in, line))
            throw std::runtime_error("load_checkpoint: truncated parameters in " + path);
        net.params_[i] = std::stod(line);
    }
    for (double v : net.params_)
        if (!std::isfinite(v))
            throw std::runtime_error("load_checkpoint: non-finite parameter in " + path);
    return net;
}

} // namespace kanlab
