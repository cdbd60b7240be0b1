#pragma once

#include "kanlab/datagen.hpp"
#include "kanlab/fastkan.hpp"
#include "kanlab/theory.hpp"
#include "kanlab/trainer.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace kanlab {

/// One AR process family from the experiment table; p = 3 * order.
struct ArVariant {
    std::size_t order = 1;
    double rho2 = 0.0;
};

/// Full experiment description. Defaults are the reference protocol: AR
/// configurations (1,3,0), (2,6,0.1), (5,15,0.01), rho1 in {0.1..0.8},
/// FastKAN [p,50,1] with grid 8, Adam lr 0.005, batch 256, 150 epochs, series
/// length 5000, 80/20 chronological split, and 10 seeds.
struct ExperimentConfig {
    std::vector<ArVariant> ar_configs{{1, 0.0}, {2, 0.1}, {5, 0.01}};
    std::vector<double> rho_grid{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8};
    std::vector<std::string> variants{"kan", "dct-kan"};
    TargetSpec target;
    TrainConfig train;
    std::size_t length = 5000;
    double split_ratio = 0.8;
    std::size_t seeds = 10;
    std::uint64_t base_seed = 1;
    std::size_t hidden = 50;
    RbfGrid grid;
    KanOptions options;
    std::size_t jobs = 0; // 0 = all hardware threads

    void validate() const;

    /// Canonical key=value serialization (one line per field, fixed order);
    /// identical configs produce identical strings.
    std::string canonical() const;

    std::vector<std::uint64_t> seed_list() const;
};

/// One training run: generate the AR dataset for (ar, rho1, seed), build the
/// requested input representation ("kan" = standardized lags, "dct-kan" =
/// re-standardized DCT of them), train a fresh network.
RunHistory run_single(const ExperimentConfig& cfg, const ArVariant& ar, double rho1,
                      const std::string& variant, std::uint64_t seed);

/// Every (variant, rho1, seed) run for one AR family, fanned out to a worker
/// pool and returned in deterministic (variant, rho1, seed) order.
std::vector<RunHistory> run_grid(const ExperimentConfig& cfg, const ArVariant& ar);

/// Appendix-style residual study row: empirical Hessian of AR(1) data versus
/// the leading-order Hessian built from the truncated-normal moments and the
/// sample-ACF Toeplitz matrix.
struct ResidualStudyRow {
    double rho1 = 0.0;
    std::size_t samples = 0;
    std::size_t p = 0;
    ResidualReport report;
    double clamp_fraction = 0.0;
    bool clamp_warning = false;
};

ResidualStudyRow residual_study(double rho1, std::size_t samples, std::size_t p,
                                const SplineBasisSpec& spec, std::uint64_t seed);

/// FNV-1a of a byte string, as a 16-digit hex string.
std::string fnv1a_hex(const std::string& bytes);

/// FNV-1a of a file's contents.
std::string file_checksum(const std::string& path);

/// Run manifest: config hash, seed list, and artifact checksums, as JSON.
void write_manifest(const std::string& path, const std::string& command,
                    const std::string& canonical_config,
                    const std::vector<std::uint64_t>& seeds,
                    const std::map<std::string, std::string>& artifact_checksums);

/// Minimal SVG line chart; a convenience view over the CSVs.
struct SvgSeries {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

void write_svg_lines(const std::string& path, const std::string& title,
                     const std::string& x_label, const std::string& y_label,
                     const std::vector<SvgSeries>& series, bool log_y = false);

} // namespace kanlab
