#pragma once

#include "kanlab/bspline.hpp"
#include "kanlab/matrix.hpp"
#include "kanlab/sym_eig.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace kanlab {

/// Marginal density for the basis moments: uniform on the spline domain, or a
/// standard normal truncated to it (for standardized data on a wide domain).
enum class Density { uniform, gaussian };

std::string density_name(Density d);
Density density_from_name(const std::string& name);

/// First and second moments of the B-spline basis under a marginal density:
/// nu = E[b], C = E[b b^T], D = nu nu^T, S = C - D. The all-ones direction v0
/// satisfies S v0 = 0 by partition of unity.
struct MomentBundle {
    SplineBasisSpec spec;
    Density density = Density::uniform;
    std::vector<double> nu;
    Matrix c;
    Matrix d;
    Matrix s;
};

MomentBundle basis_moments(const SplineBasisSpec& spec, Density density);

/// AR(1) correlation Toeplitz matrix, r(h) = rho^h.
Matrix ar1_correlation(double rho, std::size_t p);

/// Leading-order training Hessian M = J_p (x) D + R (x) (C - D) together with
/// its eigenstructure and the conditioning quantities derived from it.
struct HessianBundle {
    std::size_t p = 0;
    Matrix r;
    Matrix m;
    EigenDecomposition eig;
    std::size_t degenerate_count = 0; // eigenvalues below 1e-8 * lambda_max
    bool degeneracy_matches = false;  // degenerate_count == p - 1
    double lambda_max = 0.0;
    double lambda_p = 0.0;  // p-th smallest eigenvalue (first past the null space)
    double kappa_tsf = 0.0; // lambda_max / lambda_p
};

HessianBundle leading_order_hessian(const MomentBundle& bundle, const Matrix& r);

/// One two-sided inequality: lo <= value <= hi within slack 1e-9 * scale.
struct BoundCheck {
    double lo = 0.0;
    double hi = 0.0;
    double value = 0.0;
    bool pass = false;
};

/// Spectral bounds on lambda_max(M), lambda_p(M) and kappa in terms of the
/// spectra of R and C, plus the structural side conditions.
struct BoundsReport {
    double lmax_r = 0.0;
    double lmin_r = 0.0;
    double lmax_c = 0.0;
    double lmin_c = 0.0;
    double cond_c = 0.0;         // C_k = lmax_c / lmin_c
    BoundCheck lambda_max_bound; // lmax(R)lmax(C)/2 <= lmax(M) <= p lmax(C)
    BoundCheck lambda_p_bound;   // lmin(R)lmin(C) <= lambda_p <= lmin(R)lmax(C)
    BoundCheck kappa_bound;      // lmax(R)/(2 lmin(R)) <= kappa <= p C_k / lmin(R)
    bool trace_ok = false;       // lmax(R) <= p (trace argument)
    bool consistent = false;     // every lower bound <= its upper bound
    bool null_dim_ok = false;    // degenerate_count == p - 1
    bool pass = false;           // conjunction of all checks
};

BoundsReport theorem_bounds(const Matrix& r, const MomentBundle& bundle,
                            const HessianBundle& hess);

/// Exact data Hessian of the linear-in-coefficients single-edge-layer model:
/// block (j, j') = sample mean of b(x_j) b(x_j')^T over rows of x_std.
struct EmpiricalHessian {
    Matrix m;
    std::size_t clamped = 0; // basis evaluations outside the spline domain
    std::size_t evaluations = 0;
    double clamp_fraction = 0.0;
    bool clamp_warning = false; // fraction above 0.1%
};

EmpiricalHessian empirical_hessian(const Matrix& x_std, const SplineBasisSpec& spec);

/// Spectral-norm residual between an empirical Hessian and a leading-order one,
/// with the per-index eigenvalue-deviation (Weyl) check.
struct ResidualReport {
    double res_norm = 0.0;    // ||E||_2 with E = M_emp - M_leading
    double rel_res = 0.0;     // ||E||_2 / ||M_leading||_2
    double max_eig_dev = 0.0; // max_i |lambda_i(M_emp) - lambda_i(M_leading)|
    bool weyl_ok = false;     // max_eig_dev <= res_norm + 1e-8
};

ResidualReport residual_report(const Matrix& m_emp, const Matrix& m_leading);

/// Gradient descent on the quadratic 0.5 theta^T M theta - b^T theta from a
/// random start, with the error projected onto each eigenvector and a
/// log-linear decay-rate fit per mode. Discrete theory rate: -ln(1 - eta*lambda).
struct ModeDecayResult {
    double eta = 0.0;
    std::size_t steps = 0;
    std::vector<double> eigenvalues;     // ascending, as in the bundle
    std::vector<double> fitted_rates;    // least-squares slope of -ln|a_m(t)|
    std::vector<double> predicted_rates; // -ln(1 - eta*lambda_m)
    std::vector<double> relative_errors; // |fit - pred| / pred where included
    std::vector<bool> included;          // lambda_m > 1e-6 * lambda_max
};

ModeDecayResult mode_decay_sim(const HessianBundle& hess, double eta, std::size_t steps,
                               std::uint64_t seed);

/// One bounds evaluation per rho with the analytic AR(1) correlation matrix.
struct ConditionRow {
    double rho = 0.0;
    std::size_t p = 0;
    double lmax_m = 0.0;
    double lambda_p = 0.0;
    double kappa = 0.0;
    BoundsReport report;
};

std::vector<ConditionRow> condition_sweep(const std::vector<double>& rho_grid, std::size_t p,
                                          const SplineBasisSpec& spec, Density density);

} // namespace kanlab
