#include "kanlab/theory.hpp"

#include "kanlab/quadrature.hpp"
#include "kanlab/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace kanlab {

std::string density_name(Density d) {
    return d == Density::uniform ? "uniform" : "gaussian";
}

Density density_from_name(const std::string& name) {
    if (name == "uniform") return Density::uniform;
    if (name == "gaussian") return Density::gaussian;
    throw std::invalid_argument("unknown density '" + name + "' (uniform | gaussian)");
}

namespace {

// Standard normal truncated to [lo, hi], renormalized to integrate to 1.
double truncated_normal_pdf(double z, double lo, double hi) {
    const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
    const double mass = 0.5 * (std::erf(hi * inv_sqrt2) - std::erf(lo * inv_sqrt2));
    const double phi = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
    return phi / mass;
}

// a <= b within slack 1e-9 * scale.
bool leq_with_slack(double a, double b) {
    const double scale = std::max({std::abs(a), std::abs(b), 1.0});
    return a <= b + 1e-9 * scale;
}

} // namespace

MomentBundle basis_moments(const SplineBasisSpec& spec, Density density) {
    spec.validate();
    const std::size_t m = spec.basis_count();
    const Quadrature quad = gauss_legendre_aligned(spec.breakpoints());

    MomentBundle mb;
    mb.spec = spec;
    mb.density = density;
    mb.nu.assign(m, 0.0);
    mb.c = Matrix(m, m);

    std::vector<double> basis;
    for (std::size_t q = 0; q < quad.nodes.size(); ++q) {
        const double z = quad.nodes[q];
        const double w = quad.weights[q] *
                         (density == Density::uniform
                              ? 1.0 / (spec.hi - spec.lo)
                              : truncated_normal_pdf(z, spec.lo, spec.hi));
        basis = bspline_basis(z, spec);
        for (std::size_t l = 0; l < m; ++l) {
            if (basis[l] == 0.0) continue;
            mb.nu[l] += w * basis[l];
            for (std::size_t l2 = l; l2 < m; ++l2)
                mb.c(l, l2) += w * basis[l] * basis[l2];
        }
    }
    for (std::size_t l = 0; l < m; ++l)
        for (std::size_t l2 = 0; l2 < l; ++l2) mb.c(l, l2) = mb.c(l2, l);

    mb.d = Matrix(m, m);
    for (std::size_t l = 0; l < m; ++l)
        for (std::size_t l2 = 0; l2 < m; ++l2) mb.d(l, l2) = mb.nu[l] * mb.nu[l2];
    mb.s = mb.c - mb.d;
    return mb;
}

Matrix ar1_correlation(double rho, std::size_t p) {
    if (!(std::abs(rho) < 1.0))
        throw std::invalid_argument("ar1_correlation: |rho| must be < 1");
    if (p < 1) throw std::invalid_argument("ar1_correlation: p must be >= 1");
    std::vector<double> r(p);
    r[0] = 1.0;
    for (std::size_t h = 1; h < p; ++h) r[h] = r[h - 1] * rho;
    return toeplitz_from_acf(r);
}

HessianBundle leading_order_hessian(const MomentBundle& bundle, const Matrix& r) {
    const std::size_t m = bundle.nu.size();
    if (bundle.c.rows() != m || bundle.c.cols() != m)
        throw std::invalid_argument("leading_order_hessian: inconsistent moment bundle");
    if (r.rows() != r.cols() || r.rows() == 0)
        throw std::invalid_argument("leading_order_hessian: R must be square");

    const EigenDecomposition r_eig = sym_eig(r);
    if (r_eig.min() < -1e-10)
        throw std::invalid_argument("leading_order_hessian: R is not positive semidefinite "
                                    "(min eigenvalue " + std::to_string(r_eig.min()) + ")");

    HessianBundle hb;
    hb.p = r.rows();
    hb.r = r;
    const Matrix ones(hb.p, hb.p, 1.0);
    hb.m = kron(ones, bundle.d) + kron(r, bundle.s);
    hb.eig = sym_eig(hb.m);

    hb.lambda_max = hb.eig.max();
    const double cut = 1e-8 * hb.lambda_max;
    hb.degenerate_count = 0;
    for (double v : hb.eig.values)
        if (v < cut) ++hb.degenerate_count;
    hb.degeneracy_matches = (hb.degenerate_count == hb.p - 1);
    hb.lambda_p = hb.eig.values[hb.p - 1];
    hb.kappa_tsf = hb.lambda_max / hb.lambda_p;
    return hb;
}

BoundsReport theorem_bounds(const Matrix& r, const MomentBundle& bundle,
                            const HessianBundle& hess) {
    if (r.rows() != hess.p)
        throw std::invalid_argument("theorem_bounds: R dimension mismatch with Hessian bundle");
    const auto p = static_cast<double>(hess.p);

    const EigenDecomposition r_eig = sym_eig(r);
    const EigenDecomposition c_eig = sym_eig(bundle.c);

    BoundsReport rep;
    rep.lmax_r = r_eig.max();
    rep.lmin_r = r_eig.min();
    rep.lmax_c = c_eig.max();
    rep.lmin_c = c_eig.min();
    rep.cond_c = rep.lmax_c / rep.lmin_c;

    rep.lambda_max_bound.lo = 0.5 * rep.lmax_r * rep.lmax_c;
    rep.lambda_max_bound.hi = p * rep.lmax_c;
    rep.lambda_max_bound.value = hess.lambda_max;

    rep.lambda_p_bound.lo = rep.lmin_r * rep.lmin_c;
    rep.lambda_p_bound.hi = rep.lmin_r * rep.lmax_c;
    rep.lambda_p_bound.value = hess.lambda_p;

    rep.kappa_bound.lo = rep.lmax_r / (2.0 * rep.lmin_r);
    rep.kappa_bound.hi = p * rep.cond_c / rep.lmin_r;
    rep.kappa_bound.value = hess.kappa_tsf;

    for (BoundCheck* b : {&rep.lambda_max_bound, &rep.lambda_p_bound, &rep.kappa_bound})
        b->pass = leq_with_slack(b->lo, b->value) && leq_with_slack(b->value, b->hi);

    rep.trace_ok = leq_with_slack(rep.lmax_r, p);
    rep.consistent = leq_with_slack(rep.lambda_max_bound.lo, rep.lambda_max_bound.hi) &&
                     leq_with_slack(rep.lambda_p_bound.lo, rep.lambda_p_bound.hi) &&
                     leq_with_slack(rep.kappa_bound.lo, rep.kappa_bound.hi);
    rep.null_dim_ok = hess.degeneracy_matches;
    rep.pass = rep.lambda_max_bound.pass && rep.lambda_p_bound.pass && rep.kappa_bound.pass &&
               rep.trace_ok && rep.consistent && rep.null_dim_ok;
    return rep;
}

EmpiricalHessian empirical_hessian(const Matrix& x_std, const SplineBasisSpec& spec) {
    spec.validate();
    if (x_std.rows() == 0 || x_std.cols() == 0)
        throw std::invalid_argument("empirical_hessian: empty sample matrix");
    const std::size_t rows = x_std.rows();
    const std::size_t p = x_std.cols();
    const std::size_t m = spec.basis_count();
    const std::size_t n = p * m;

    EmpiricalHessian eh;
    eh.m = Matrix(n, n);
    eh.evaluations = rows * p;

    // Only degree+1 basis values are nonzero per evaluation; accumulate the
    // upper triangle over that sparse support.
    std::vector<std::pair<std::size_t, double>> nz;
    nz.reserve(p * (spec.degree + 1));
    bool clamped = false;
    for (std::size_t i = 0; i < rows; ++i) {
        nz.clear();
        for (std::size_t j = 0; j < p; ++j) {
            const std::vector<double> b = bspline_basis(x_std(i, j), spec, &clamped);
            if (clamped) ++eh.clamped;
            for (std::size_t l = 0; l < m; ++l)
                if (b[l] != 0.0) nz.emplace_back(j * m + l, b[l]);
        }
        for (std::size_t a = 0; a < nz.size(); ++a)
            for (std::size_t b2 = a; b2 < nz.size(); ++b2) {
                const auto [ia, va] = nz[a];
                const auto [ib, vb] = nz[b2];
                if (ia <= ib)
                    eh.m(ia, ib) += va * vb;
                else
                    eh.m(ib, ia) += va * vb;
            }
    }
    const double inv_rows = 1.0 / static_cast<double>(rows);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a; b < n; ++b) {
            eh.m(a, b) *= inv_rows;
            eh.m(b, a) = eh.m(a, b);
        }

    eh.clamp_fraction = static_cast<double>(eh.clamped) / static_cast<double>(eh.evaluations);
    eh.clamp_warning = eh.clamp_fraction > 1e-3;
    return eh;
}

ResidualReport residual_report(const Matrix& m_emp, const Matrix& m_leading) {
    if (m_emp.rows() != m_leading.rows() || m_emp.cols() != m_leading.cols())
        throw std::invalid_argument("residual_report: shape mismatch");

    Matrix e = m_emp - m_leading;
    // Exact symmetrization guards against asymmetric rounding in the inputs.
    for (std::size_t i = 0; i < e.rows(); ++i)
        for (std::size_t j = i + 1; j < e.cols(); ++j) {
            const double v = 0.5 * (e(i, j) + e(j, i));
            e(i, j) = v;
            e(j, i) = v;
        }

    const EigenDecomposition e_eig = sym_eig(e);
    const EigenDecomposition emp_eig = sym_eig(m_emp);
    const EigenDecomposition lead_eig = sym_eig(m_leading);

    ResidualReport rr;
    rr.res_norm = std::max(std::abs(e_eig.min()), std::abs(e_eig.max()));
    const double lead_norm = std::max(std::abs(lead_eig.min()), std::abs(lead_eig.max()));
    rr.rel_res = rr.res_norm / lead_norm;
    rr.max_eig_dev = 0.0;
    for (std::size_t i = 0; i < emp_eig.values.size(); ++i)
        rr.max_eig_dev = std::max(rr.max_eig_dev,
                                  std::abs(emp_eig.values[i] - lead_eig.values[i]));
    rr.weyl_ok = rr.max_eig_dev <= rr.res_norm + 1e-8;
    return rr;
}

ModeDecayResult mode_decay_sim(const HessianBundle& hess, double eta, std::size_t steps,
                               std::uint64_t seed) {
    const std::size_t n = hess.m.rows();
    if (!(eta > 0.0) || !(eta * hess.lambda_max < 1.0))
        throw std::invalid_argument("mode_decay_sim: eta must satisfy 0 < eta < 1/lambda_max");
    if (steps < 4) throw std::invalid_argument("mode_decay_sim: need at least 4 steps");

    RandomStream rng(mix_seed(seed, stream::mode_decay));
    std::vector<double> theta_star(n), theta(n);
    for (double& v : theta_star) v = rng.normal();
    for (double& v : theta) v = rng.normal();
    const std::vector<double> b = hess.m * theta_star;

    // Record the eigenmode projections of the error along the descent path.
    Matrix a(steps + 1, n); // a(t, m) = v_m . (theta_t - theta_star)
    std::vector<double> err(n);
    for (std::size_t t = 0; t <= steps; ++t) {
        for (std::size_t i = 0; i < n; ++i) err[i] = theta[i] - theta_star[i];
        for (std::size_t mm = 0; mm < n; ++mm) {
            double dot = 0.0;
            for (std::size_t i = 0; i < n; ++i) dot += hess.eig.vectors(i, mm) * err[i];
            a(t, mm) = dot;
        }
        if (t == steps) break;
        const std::vector<double> grad_plus_b = hess.m * theta;
        for (std::size_t i = 0; i < n; ++i) theta[i] -= eta * (grad_plus_b[i] - b[i]);
    }

    ModeDecayResult res;
    res.eta = eta;
    res.steps = steps;
    res.eigenvalues = hess.eig.values;
    res.fitted_rates.assign(n, 0.0);
    res.predicted_rates.assign(n, 0.0);
    res.relative_errors.assign(n, 0.0);
    res.included.assign(n, false);

    for (std::size_t mm = 0; mm < n; ++mm) {
        const double lambda = hess.eig.values[mm];
        const double pred = -std::log1p(-eta * lambda);
        res.predicted_rates[mm] = pred;
        res.included[mm] = lambda > 1e-6 * hess.lambda_max;

        // Fit only while the mode is far above the rounding floor: stop once
        // the predicted amplitude has shrunk by 1e8.
        std::size_t window = steps + 1;
        if (pred > 0.0) {
            const double t_floor = std::log(1e8) / pred;
            if (t_floor < static_cast<double>(steps))
                window = std::max<std::size_t>(4, static_cast<std::size_t>(t_floor) + 1);
        }

        double sum_t = 0.0, sum_y = 0.0, sum_tt = 0.0, sum_ty = 0.0;
        std::size_t count = 0;
        for (std::size_t t = 0; t < window; ++t) {
            const double amp = std::abs(a(t, mm));
            if (amp == 0.0) continue;
            const double y = std::log(amp);
            const auto td = static_cast<double>(t);
            sum_t += td;
            sum_y += y;
            sum_tt += td * td;
            sum_ty += td * y;
            ++count;
        }
        if (count >= 2) {
            const auto cd = static_cast<double>(count);
            const double denom = sum_tt - sum_t * sum_t / cd;
            if (denom > 0.0)
                res.fitted_rates[mm] = -(sum_ty - sum_t * sum_y / cd) / denom;
        }
        if (res.included[mm] && pred > 0.0)
            res.relative_errors[mm] = std::abs(res.fitted_rates[mm] - pred) / pred;
    }
    return res;
}

std::vector<ConditionRow> condition_sweep(const std::vector<double>& rho_grid, std::size_t p,
                                          const SplineBasisSpec& spec, Density density) {
    if (rho_grid.empty()) throw std::invalid_argument("condition_sweep: empty rho grid");
    const MomentBundle mb = basis_moments(spec, density);
    std::vector<ConditionRow> rows;
    rows.reserve(rho_grid.size());
    for (double rho : rho_grid) {
        const Matrix r = ar1_correlation(rho, p);
        const HessianBundle hb = leading_order_hessian(mb, r);
        ConditionRow row;
        row.rho = rho;
        row.p = p;
        row.lmax_m = hb.lambda_max;
        row.lambda_p = hb.lambda_p;
        row.kappa = hb.kappa_tsf;
        row.report = theorem_bounds(r, mb, hb);
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace kanlab
