#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "kanlab/csv.hpp"
#include "kanlab/matrix.hpp"
#include "kanlab/quadrature.hpp"
#include "kanlab/rng.hpp"
#include "kanlab/sym_eig.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <stdexcept>

using namespace kanlab;

TEST_CASE("matrix multiply, transpose, identity") {
    const Matrix a(2, 2, {1.0, 2.0, 3.0, 4.0});
    const Matrix b(2, 2, {0.0, 1.0, 1.0, 0.0});
    const Matrix ab = a * b;
    CHECK(ab(0, 0) == 2.0);
    CHECK(ab(0, 1) == 1.0);
    CHECK(ab(1, 0) == 4.0);
    CHECK(ab(1, 1) == 3.0);

    const Matrix at = a.transposed();
    CHECK(at(0, 1) == 3.0);
    CHECK(at(1, 0) == 2.0);

    const Matrix id = Matrix::identity(3);
    CHECK(id * id == id);
    CHECK((a * Matrix::identity(2)) == a);

    const std::vector<double> v{1.0, -1.0};
    const std::vector<double> av = a * v;
    CHECK(av[0] == -1.0);
    CHECK(av[1] == -1.0);
}

TEST_CASE("kronecker product block structure") {
    const Matrix a(2, 2, {1.0, 2.0, 3.0, 4.0});
    const Matrix b(2, 2, {0.0, 5.0, 6.0, 0.0});
    const Matrix k = kron(a, b);
    REQUIRE(k.rows() == 4);
    REQUIRE(k.cols() == 4);
    for (std::size_t bi = 0; bi < 2; ++bi)
        for (std::size_t bj = 0; bj < 2; ++bj)
            for (std::size_t i = 0; i < 2; ++i)
                for (std::size_t j = 0; j < 2; ++j)
                    CHECK(k(2 * bi + i, 2 * bj + j) == a(bi, bj) * b(i, j));
}

TEST_CASE("toeplitz from acf") {
    const Matrix t = toeplitz_from_acf({1.0, 0.5, 0.25});
    CHECK(t(0, 0) == 1.0);
    CHECK(t(0, 1) == 0.5);
    CHECK(t(1, 0) == 0.5);
    CHECK(t(0, 2) == 0.25);
    CHECK(t.symmetry_defect() == 0.0);

    CHECK_THROWS_AS((void)toeplitz_from_acf({0.9, 0.5}), std::invalid_argument);
    CHECK_THROWS_AS((void)toeplitz_from_acf({1.0, 1.5}), std::invalid_argument);
}

TEST_CASE("sym_eig on a diagonal matrix") {
    Matrix a(3, 3);
    a(0, 0) = 3.0;
    a(1, 1) = 1.0;
    a(2, 2) = 2.0;
    const EigenDecomposition eig = sym_eig(a);
    REQUIRE(eig.values.size() == 3);
    CHECK(eig.values[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(eig.values[1] == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(eig.values[2] == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(eig.vectors(1, 0) == doctest::Approx(1.0));
    CHECK(eig.vectors(2, 1) == doctest::Approx(1.0));
    CHECK(eig.vectors(0, 2) == doctest::Approx(1.0));
}

TEST_CASE("sym_eig matches the closed form for the AR(1) Toeplitz at rho=0.5") {
    // Characteristic polynomial factors as (x - 3/4)(x^2 - 9x/4 + 3/4), so the
    // eigenvalues are 3/4 and (9/4 +- sqrt(33)/4)/2.
    const Matrix t = toeplitz_from_acf({1.0, 0.5, 0.25});
    const EigenDecomposition eig = sym_eig(t);
    const double root = std::sqrt(33.0) / 4.0;
    CHECK(eig.values[0] == doctest::Approx((2.25 - root) / 2.0).epsilon(1e-12));
    CHECK(eig.values[1] == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(eig.values[2] == doctest::Approx((2.25 + root) / 2.0).epsilon(1e-12));

    // The middle eigenvector is (1, 0, -1)/sqrt(2), first component positive.
    const std::vector<double> v = eig.vector(1);
    CHECK(v[0] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-10));
    CHECK(v[1] == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(v[2] == doctest::Approx(-1.0 / std::sqrt(2.0)).epsilon(1e-10));
}

TEST_CASE("sym_eig reconstructs a random symmetric matrix") {
    RandomStream rs(42);
    const std::size_t n = 10;
    Matrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            const double x = rs.normal();
            a(i, j) = x;
            a(j, i) = x;
        }
    const EigenDecomposition eig = sym_eig(a);
    for (std::size_t k = 1; k < n; ++k) CHECK(eig.values[k] >= eig.values[k - 1]);

    // A v_k = lambda_k v_k and V^T V = I.
    for (std::size_t k = 0; k < n; ++k) {
        const std::vector<double> v = eig.vector(k);
        const std::vector<double> av = a * v;
        for (std::size_t i = 0; i < n; ++i)
            CHECK(av[i] == doctest::Approx(eig.values[k] * v[i]).epsilon(1e-9).scale(1.0));
    }
    const Matrix vtv = eig.vectors.transposed() * eig.vectors;
    const Matrix defect = vtv - Matrix::identity(n);
    CHECK(defect.max_abs() < 1e-10);
}

TEST_CASE("sym_eig rejects asymmetric input") {
    Matrix a(2, 2, {1.0, 0.5, 0.2, 1.0});
    CHECK_THROWS_AS((void)sym_eig(a), std::invalid_argument);
    CHECK_THROWS_AS((void)sym_eig(Matrix(2, 3)), std::invalid_argument);
}

TEST_CASE("gauss-legendre weights and polynomial exactness") {
    const Quadrature q = gauss_legendre(-1.0, 3.0, 4);
    double wsum = 0.0;
    for (double w : q.weights) {
        CHECK(w > 0.0);
        wsum += w;
    }
    CHECK(wsum == doctest::Approx(4.0).epsilon(1e-14));
    for (std::size_t i = 1; i < q.nodes.size(); ++i) CHECK(q.nodes[i] > q.nodes[i - 1]);

    // One 10-point panel integrates degree-19 polynomials exactly.
    const Quadrature q1 = gauss_legendre(0.0, 1.0, 1);
    const double v = integrate([](double x) { return std::pow(x, 19.0); }, q1);
    CHECK(v == doctest::Approx(0.05).epsilon(1e-13));
}

TEST_CASE("aligned quadrature is exact across breakpoints") {
    // Piecewise quadratic with a kink at 0.5; a rule aligned to the kink
    // integrates it exactly: 2 * int_0^1/2 x^2 dx = 1/12.
    const Quadrature q = gauss_legendre_aligned({0.0, 0.5, 1.0}, 8);
    const double v = integrate(
        [](double x) { return x < 0.5 ? x * x : (1.0 - x) * (1.0 - x); }, q);
    CHECK(v == doctest::Approx(1.0 / 12.0).epsilon(1e-14));
}

TEST_CASE("integrate rejects non-finite integrands") {
    const Quadrature q = gauss_legendre(0.0, 1.0, 2);
    CHECK_THROWS_AS((void)integrate([](double) { return std::nan(""); }, q),
                    std::domain_error);
}

TEST_CASE("mix_seed separates streams deterministically") {
    CHECK(mix_seed(7, stream::series) == mix_seed(7, stream::series));
    CHECK(mix_seed(7, stream::series) != mix_seed(7, stream::target_noise));
    CHECK(mix_seed(7, stream::series) != mix_seed(8, stream::series));
}

TEST_CASE("uniform draws have the right range and moments") {
    RandomStream rs(123);
    const std::size_t n = 100000;
    double sum = 0.0, sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double u = rs.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        sum += u;
        sq += u * u;
    }
    const double mean = sum / n;
    const double var = sq / n - mean * mean;
    CHECK(mean == doctest::Approx(0.5).epsilon(0.01));
    CHECK(var == doctest::Approx(1.0 / 12.0).epsilon(0.03));
}

TEST_CASE("normal draws are deterministic with matching moments") {
    RandomStream a(99), b(99);
    for (int i = 0; i < 1000; ++i) CHECK(a.normal() == b.normal());

    RandomStream rs(5);
    const std::size_t n = 100000;
    double sum = 0.0, sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double z = rs.normal();
        sum += z;
        sq += z * z;
    }
    CHECK(std::abs(sum / n) < 0.02);
    CHECK(sq / n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("below and shuffle") {
    RandomStream rs(17);
    for (int i = 0; i < 1000; ++i) CHECK(rs.below(13) < 13);

    std::vector<int> items{0, 1, 2, 3, 4, 5, 6, 7};
    std::vector<int> copy = items;
    RandomStream s1(3), s2(3);
    s1.shuffle(items);
    s2.shuffle(copy);
    CHECK(items == copy);
    std::vector<int> sorted = items;
    std::sort(sorted.begin(), sorted.end());
    CHECK(sorted == std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7});
}

TEST_CASE("format_double round-trips exactly") {
    for (double v : {0.1, 1.0 / 3.0, 1e-17, -2.5e300, 0.0, 123456789.123456789}) {
        const std::string s = format_double(v);
        CHECK(std::strtod(s.c_str(), nullptr) == v);
    }
}

TEST_CASE("csv round-trip preserves cells") {
    namespace fs = std::filesystem;
    const fs::path path = fs::temp_directory_path() / "kanlab_test_table.csv";
    CsvTable t;
    t.header = {"a", "b"};
    t.rows = {{format_double(0.1), "x"}, {format_double(-3.0), "y"}};
    t.write(path.string());

    const CsvTable r = CsvTable::read(path.string());
    CHECK(r.header == t.header);
    CHECK(r.rows == t.rows);
    CHECK(r.column("b") == 1);
    CHECK_THROWS_AS((void)r.column("missing"), std::out_of_range);
    fs::remove(path);
}
