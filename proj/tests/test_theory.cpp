#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "kanlab/bspline.hpp"
#include "kanlab/rng.hpp"
#include "kanlab/theory.hpp"

#include <cmath>
#include <stdexcept>

using namespace kanlab;

namespace {

// Textbook Cox-de Boor recursion, evaluated naively from degree 0 upward.
// Used only away from knots, where the half-open convention is irrelevant.
double naive_bspline(double z, std::size_t i, std::size_t k, const std::vector<double>& t) {
    if (k == 0) return (t[i] <= z && z < t[i + 1]) ? 1.0 : 0.0;
    double left = 0.0, right = 0.0;
    if (t[i + k] > t[i])
        left = (z - t[i]) / (t[i + k] - t[i]) * naive_bspline(z, i, k - 1, t);
    if (t[i + k + 1] > t[i + 1])
        right = (t[i + k + 1] - z) / (t[i + k + 1] - t[i + 1]) *
                naive_bspline(z, i + 1, k - 1, t);
    return left + right;
}

} // namespace

TEST_CASE("spline spec geometry") {
    const SplineBasisSpec spec{8, 3, -1.0, 1.0};
    CHECK(spec.basis_count() == 10);
    const std::vector<double> bp = spec.breakpoints();
    REQUIRE(bp.size() == 8);
    CHECK(bp.front() == -1.0);
    CHECK(bp.back() == 1.0);
    CHECK(bp[1] - bp[0] == doctest::Approx(2.0 / 7.0).epsilon(1e-14));

    const std::vector<double> knots = spec.knot_vector();
    REQUIRE(knots.size() == spec.basis_count() + spec.degree + 1);
    for (std::size_t i = 0; i <= spec.degree; ++i) {
        CHECK(knots[i] == -1.0);
        CHECK(knots[knots.size() - 1 - i] == 1.0);
    }
    for (std::size_t i = 1; i < knots.size(); ++i) CHECK(knots[i] >= knots[i - 1]);

    CHECK_THROWS_AS((SplineBasisSpec{1, 3, -1.0, 1.0}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((SplineBasisSpec{8, 3, 1.0, -1.0}.validate()), std::invalid_argument);
}

TEST_CASE("partition of unity, positivity and local support") {
    RandomStream rs(7);
    for (std::size_t g : {4, 8, 16})
        for (std::size_t k : {1, 2, 3}) {
            const SplineBasisSpec spec{g, k, -1.0, 1.0};
            for (int trial = 0; trial < 1000; ++trial) {
                const double z = 2.0 * rs.uniform() - 1.0;
                const std::vector<double> b = bspline_basis(z, spec);
                REQUIRE(b.size() == spec.basis_count());
                double sum = 0.0;
                std::size_t nonzero = 0;
                for (double v : b) {
                    CHECK(v >= 0.0);
                    sum += v;
                    if (v != 0.0) ++nonzero;
                }
                CHECK(std::abs(sum - 1.0) < 1e-10);
                CHECK(nonzero <= k + 1);
            }
        }
}

TEST_CASE("boundary behavior and clamping") {
    const SplineBasisSpec spec{6, 3, -1.0, 1.0};
    bool clamped = false;

    const std::vector<double> at_lo = bspline_basis(-1.0, spec, &clamped);
    CHECK(!clamped);
    CHECK(at_lo.front() == doctest::Approx(1.0).epsilon(1e-14));
    const std::vector<double> at_hi = bspline_basis(1.0, spec, &clamped);
    CHECK(!clamped);
    CHECK(at_hi.back() == doctest::Approx(1.0).epsilon(1e-14));

    const std::vector<double> beyond = bspline_basis(3.5, spec, &clamped);
    CHECK(clamped);
    CHECK(beyond == at_hi);
    const std::vector<double> below = bspline_basis(-2.0, spec, &clamped);
    CHECK(clamped);
    CHECK(below == at_lo);

    CHECK_THROWS_AS((void)bspline_basis(std::nan(""), spec), std::invalid_argument);
}

TEST_CASE("basis values match the textbook recursion") {
    RandomStream rs(19);
    for (std::size_t g : {3, 8})
        for (std::size_t k : {1, 2, 3}) {
            const SplineBasisSpec spec{g, k, -1.0, 1.0};
            const std::vector<double> t = spec.knot_vector();
            for (int trial = 0; trial < 100; ++trial) {
                const double z = 1.98 * rs.uniform() - 0.99;
                const std::vector<double> b = bspline_basis(z, spec);
                for (std::size_t i = 0; i < spec.basis_count(); ++i)
                    CHECK(std::abs(b[i] - naive_bspline(z, i, k, t)) < 1e-12);
            }
        }
}

TEST_CASE("degree-zero moments on three grid points by hand") {
    // Two half-interval indicators on [-1, 1]: nu = (1/2, 1/2),
    // C = diag(1/2, 1/2), S has entries +-1/4.
    const SplineBasisSpec spec{3, 0, -1.0, 1.0};
    REQUIRE(spec.basis_count() == 2);
    const MomentBundle mb = basis_moments(spec, Density::uniform);
    CHECK(mb.nu[0] == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(mb.nu[1] == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(mb.c(0, 0) == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(mb.c(0, 1) == doctest::Approx(0.0).epsilon(1e-13));
    CHECK(mb.s(0, 0) == doctest::Approx(0.25).epsilon(1e-13));
    CHECK(mb.s(0, 1) == doctest::Approx(-0.25).epsilon(1e-13));
    CHECK(mb.s(1, 1) == doctest::Approx(0.25).epsilon(1e-13));
}

TEST_CASE("moment invariants for both densities") {
    for (Density density : {Density::uniform, Density::gaussian}) {
        const double lim = density == Density::uniform ? 1.0 : 4.0;
        const SplineBasisSpec spec{8, 3, -lim, lim};
        const MomentBundle mb = basis_moments(spec, density);
        const std::size_t m = spec.basis_count();

        double nu_sum = 0.0;
        for (double v : mb.nu) nu_sum += v;
        CHECK(std::abs(nu_sum - 1.0) < 1e-12);

        // Row sums of C equal nu because the basis sums to one.
        for (std::size_t i = 0; i < m; ++i) {
            double row = 0.0;
            for (std::size_t j = 0; j < m; ++j) row += mb.c(i, j);
            CHECK(std::abs(row - mb.nu[i]) < 1e-10);
        }

        // S annihilates the all-ones direction and C is positive definite.
        const std::vector<double> sv = mb.s * std::vector<double>(m, 1.0);
        for (double v : sv) CHECK(std::abs(v) < 1e-10);
        const EigenDecomposition ec = sym_eig(mb.c);
        CHECK(ec.min() > 0.0);
    }
    CHECK(density_from_name("gaussian") == Density::gaussian);
    CHECK(density_name(Density::uniform) == "uniform");
    CHECK_THROWS_AS((void)density_from_name("cauchy"), std::invalid_argument);
}

TEST_CASE("ar1 correlation matrix") {
    const Matrix id = ar1_correlation(0.0, 4);
    CHECK(id == Matrix::identity(4));
    const Matrix r = ar1_correlation(0.5, 3);
    CHECK(r(0, 1) == 0.5);
    CHECK(r(0, 2) == 0.25);
    CHECK(r(2, 2) == 1.0);
    CHECK_THROWS_AS((void)ar1_correlation(1.0, 3), std::invalid_argument);
}

TEST_CASE("hessian blocks follow the kronecker structure") {
    const SplineBasisSpec spec{4, 2, -1.0, 1.0};
    const MomentBundle mb = basis_moments(spec, Density::uniform);
    const std::size_t m = spec.basis_count();
    const std::size_t p = 3;
    const HessianBundle hb = leading_order_hessian(mb, ar1_correlation(0.0, p));

    // At rho = 0 the diagonal blocks are C and the off-diagonal blocks are D.
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < m; ++b) {
            CHECK(hb.m(a, b) == doctest::Approx(mb.c(a, b)).epsilon(1e-13));
            CHECK(hb.m(a, m + b) == doctest::Approx(mb.d(a, b)).epsilon(1e-13));
        }
    CHECK(hb.degenerate_count == p - 1);
    CHECK(hb.degeneracy_matches);
    CHECK(hb.kappa_tsf == doctest::Approx(hb.lambda_max / hb.lambda_p).epsilon(1e-14));
}

TEST_CASE("four-by-four hessian with hand-computed spectrum") {
    // p = 2 lags, two indicator bases, rho = 1/2: D = J/4, S = (1,-1;-1,1)/4,
    // M has eigenvalues {0, 1/4, 3/4, 1} and every theorem bound is tight at
    // one end or the other.
    const SplineBasisSpec spec{3, 0, -1.0, 1.0};
    const MomentBundle mb = basis_moments(spec, Density::uniform);
    const Matrix r = ar1_correlation(0.5, 2);
    const HessianBundle hb = leading_order_hessian(mb, r);

    REQUIRE(hb.m.rows() == 4);
    CHECK(hb.m(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(hb.m(0, 1) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(hb.m(0, 2) == doctest::Approx(0.375).epsilon(1e-12));
    CHECK(hb.m(0, 3) == doctest::Approx(0.125).epsilon(1e-12));

    CHECK(hb.eig.values[0] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(hb.eig.values[1] == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(hb.eig.values[2] == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(hb.eig.values[3] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(hb.degenerate_count == 1);
    CHECK(hb.lambda_p == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(hb.kappa_tsf == doctest::Approx(4.0).epsilon(1e-11));

    const BoundsReport rep = theorem_bounds(r, mb, hb);
    CHECK(rep.lmax_r == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(rep.lmin_r == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(rep.cond_c == doctest::Approx(1.0).epsilon(1e-12));
    // lambda_max: 0.375 <= 1 <= 1 (upper end tight).
    CHECK(rep.lambda_max_bound.lo == doctest::Approx(0.375).epsilon(1e-12));
    CHECK(rep.lambda_max_bound.hi == doctest::Approx(1.0).epsilon(1e-12));
    // lambda_p: 0.25 <= 0.25 <= 0.25 (tight on both ends; needs the slack).
    CHECK(rep.lambda_p_bound.lo == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(rep.lambda_p_bound.hi == doctest::Approx(0.25).epsilon(1e-12));
    // kappa: 1.5 <= 4 <= 4.
    CHECK(rep.kappa_bound.lo == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(rep.kappa_bound.hi == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(rep.trace_ok);
    CHECK(rep.null_dim_ok);
    CHECK(rep.pass);
}

TEST_CASE("independent inputs keep kappa within p times the basis condition") {
    for (std::size_t p : {3, 6}) {
        const SplineBasisSpec spec{8, 3, -1.0, 1.0};
        const MomentBundle mb = basis_moments(spec, Density::uniform);
        const HessianBundle hb = leading_order_hessian(mb, ar1_correlation(0.0, p));
        const BoundsReport rep = theorem_bounds(ar1_correlation(0.0, p), mb, hb);
        CHECK(rep.pass);
        CHECK(hb.kappa_tsf <=
              static_cast<double>(p) * rep.cond_c * (1.0 + 1e-9) + 1e-9);
    }
}

TEST_CASE("condition sweep rows and monotonicity") {
    const SplineBasisSpec spec{4, 2, -1.0, 1.0};
    const std::vector<double> rhos{0.1, 0.4, 0.8};
    const std::vector<ConditionRow> rows = condition_sweep(rhos, 3, spec, Density::uniform);
    REQUIRE(rows.size() == 3);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].rho == rhos[i]);
        CHECK(rows[i].report.pass);
        CHECK(rows[i].kappa == doctest::Approx(rows[i].lmax_m / rows[i].lambda_p));
        if (i > 0) CHECK(rows[i].kappa >= rows[i - 1].kappa * (1.0 - 1e-12));
    }
}

TEST_CASE("empirical hessian converges to the leading-order one for iid data") {
    const SplineBasisSpec spec{4, 2, -1.0, 1.0};
    const MomentBundle mb = basis_moments(spec, Density::uniform);
    const std::size_t p = 2, n = 50000;

    RandomStream rs(3);
    Matrix x(n, p);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < p; ++j) x(i, j) = 2.0 * rs.uniform() - 1.0;

    const EmpiricalHessian emp = empirical_hessian(x, spec);
    CHECK(emp.clamped == 0);
    CHECK(!emp.clamp_warning);
    const std::size_t m = spec.basis_count();
    REQUIRE(emp.m.rows() == p * m);

    // Diagonal blocks estimate C; off-diagonal blocks estimate D.
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < m; ++b) {
            CHECK(std::abs(emp.m(a, b) - mb.c(a, b)) < 0.01);
            CHECK(std::abs(emp.m(a, m + b) - mb.d(a, b)) < 0.01);
        }

    const HessianBundle hb = leading_order_hessian(mb, ar1_correlation(0.0, p));
    const ResidualReport rep = residual_report(emp.m, hb.m);
    CHECK(rep.rel_res < 0.05);
    CHECK(rep.weyl_ok);

    // Out-of-domain samples are counted.
    Matrix wide(100, 1, 3.0);
    const EmpiricalHessian clamped = empirical_hessian(wide, spec);
    CHECK(clamped.clamped == 100);
    CHECK(clamped.clamp_fraction == 1.0);
    CHECK(clamped.clamp_warning);
}

TEST_CASE("residual report on a known perturbation") {
    const SplineBasisSpec spec{4, 2, -1.0, 1.0};
    const MomentBundle mb = basis_moments(spec, Density::uniform);
    const HessianBundle hb = leading_order_hessian(mb, ar1_correlation(0.3, 2));

    const ResidualReport zero = residual_report(hb.m, hb.m);
    CHECK(zero.res_norm == doctest::Approx(0.0).epsilon(1e-13));
    CHECK(zero.rel_res == doctest::Approx(0.0).epsilon(1e-13));
    CHECK(zero.weyl_ok);

    Matrix shifted = hb.m;
    for (std::size_t i = 0; i < shifted.rows(); ++i) shifted(i, i) += 1e-3;
    const ResidualReport eps = residual_report(shifted, hb.m);
    CHECK(eps.res_norm == doctest::Approx(1e-3).epsilon(1e-9));
    CHECK(eps.max_eig_dev == doctest::Approx(1e-3).epsilon(1e-6));
    CHECK(eps.weyl_ok);
}

TEST_CASE("mode decay recovers the discrete rates on a diagonal system") {
    HessianBundle hb;
    hb.p = 1;
    hb.m = Matrix(2, 2);
    hb.m(0, 0) = 1.0;
    hb.m(1, 1) = 10.0;
    hb.eig.values = {1.0, 10.0};
    hb.eig.vectors = Matrix::identity(2);
    hb.lambda_max = 10.0;

    const ModeDecayResult res = mode_decay_sim(hb, 0.05, 200, 5);
    REQUIRE(res.eigenvalues.size() == 2);
    CHECK(res.included[0]);
    CHECK(res.included[1]);
    CHECK(res.predicted_rates[0] == doctest::Approx(-std::log(0.95)).epsilon(1e-12));
    CHECK(res.predicted_rates[1] == doctest::Approx(-std::log(0.5)).epsilon(1e-12));
    CHECK(res.relative_errors[0] < 1e-8);
    CHECK(res.relative_errors[1] < 1e-8);

    CHECK_THROWS_AS((void)mode_decay_sim(hb, 0.2, 200, 5), std::invalid_argument);
    CHECK_THROWS_AS((void)mode_decay_sim(hb, 0.05, 2, 5), std::invalid_argument);
}

TEST_CASE("mode decay on a leading-order hessian") {
    const SplineBasisSpec spec{4, 2, -1.0, 1.0};
    const MomentBundle mb = basis_moments(spec, Density::uniform);
    const HessianBundle hb = leading_order_hessian(mb, ar1_correlation(0.5, 3));
    const double eta = 0.5 / hb.lambda_max;
    const ModeDecayResult res = mode_decay_sim(hb, eta, 400, 1);

    std::size_t included = 0;
    for (std::size_t m = 0; m < res.eigenvalues.size(); ++m)
        if (res.included[m]) {
            ++included;
            CHECK(res.relative_errors[m] <= 0.05);
        }
    // Everything but the p-1 = 2 degenerate modes decays measurably.
    CHECK(included == res.eigenvalues.size() - 2);
}
