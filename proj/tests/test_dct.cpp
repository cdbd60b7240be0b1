#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "kanlab/dct.hpp"
#include "kanlab/rng.hpp"

#include <cmath>
#include <stdexcept>

using namespace kanlab;

namespace {

double offdiag_frobenius(const Matrix& a) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            if (i != j) sum += a(i, j) * a(i, j);
    return std::sqrt(sum);
}

} // namespace

TEST_CASE("small transforms by hand") {
    CHECK(dct_matrix(1).w(0, 0) == doctest::Approx(1.0).epsilon(1e-15));

    const DctMatrix d2 = dct_matrix(2);
    const double h = std::sqrt(0.5);
    CHECK(d2.w(0, 0) == doctest::Approx(h).epsilon(1e-14));
    CHECK(d2.w(0, 1) == doctest::Approx(h).epsilon(1e-14));
    CHECK(d2.w(1, 0) == doctest::Approx(h).epsilon(1e-14));
    CHECK(d2.w(1, 1) == doctest::Approx(-h).epsilon(1e-14));

    // A constant vector lands entirely on the DC row.
    const DctMatrix d3 = dct_matrix(3);
    const std::vector<double> out = d3.apply({1.0, 1.0, 1.0});
    CHECK(out[0] == doctest::Approx(std::sqrt(3.0)).epsilon(1e-14));
    CHECK(std::abs(out[1]) < 1e-14);
    CHECK(std::abs(out[2]) < 1e-14);

    CHECK_THROWS_AS((void)dct_matrix(0), std::invalid_argument);
}

TEST_CASE("orthonormality to machine precision") {
    for (std::size_t p : {3, 6, 15}) {
        const DctMatrix d = dct_matrix(p);
        const Matrix gram = d.w.transposed() * d.w;
        const Matrix defect = gram - Matrix::identity(p);
        CHECK(defect.max_abs() < 1e-12);
    }
}

TEST_CASE("energy conservation and round-trip") {
    RandomStream rs(31);
    const std::size_t p = 9;
    const DctMatrix d = dct_matrix(p);
    std::vector<double> x(p);
    for (double& v : x) v = rs.normal();

    const std::vector<double> y = d.apply(x);
    double ex = 0.0, ey = 0.0;
    for (std::size_t i = 0; i < p; ++i) {
        ex += x[i] * x[i];
        ey += y[i] * y[i];
    }
    CHECK(ey == doctest::Approx(ex).epsilon(1e-13));

    const std::vector<double> back = d.w.transposed() * y;
    for (std::size_t i = 0; i < p; ++i)
        CHECK(back[i] == doctest::Approx(x[i]).epsilon(1e-12));
}

TEST_CASE("apply_dct transforms rows and rejects mismatches") {
    const DctMatrix d = dct_matrix(3);
    Matrix x(2, 3);
    RandomStream rs(8);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 3; ++j) x(i, j) = rs.normal();

    const Matrix y = apply_dct(d, x);
    for (std::size_t i = 0; i < 2; ++i) {
        const std::vector<double> row(x.row(i).begin(), x.row(i).end());
        const std::vector<double> expect = d.apply(row);
        for (std::size_t j = 0; j < 3; ++j)
            CHECK(y(i, j) == doctest::Approx(expect[j]).epsilon(1e-14));
    }
    CHECK_THROWS_AS((void)apply_dct(d, Matrix(2, 4)), std::invalid_argument);
}

TEST_CASE("dct approximately diagonalizes ar(1) correlation matrices") {
    for (std::size_t p : {6, 15})
        for (double rho : {0.4, 0.6, 0.8}) {
            std::vector<double> r(p);
            for (std::size_t h = 0; h < p; ++h) r[h] = std::pow(rho, double(h));
            const Matrix corr = toeplitz_from_acf(r);
            const DctMatrix d = dct_matrix(p);
            const Matrix rotated = d.w * corr * d.w.transposed();

            // Off-diagonal mass shrinks by at least half, and the DC row keeps
            // the largest variance.
            CHECK(offdiag_frobenius(rotated) < 0.5 * offdiag_frobenius(corr));
            for (std::size_t i = 1; i < p; ++i)
                CHECK(rotated(0, 0) > rotated(i, i));
        }
}
