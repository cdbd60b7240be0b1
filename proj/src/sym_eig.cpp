#include "kanlab/sym_eig.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace kanlab {

std::vector<double> EigenDecomposition::vector(std::size_t k) const {
    std::vector<double> v(vectors.rows());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = vectors(i, k);
    return v;
}

namespace {

double off_diagonal_norm(const Matrix& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = i + 1; j < a.cols(); ++j) s += a(i, j) * a(i, j);
    return std::sqrt(2.0 * s);
}

// One Jacobi rotation zeroing a(p,q), accumulating the rotation into v.
void rotate(Matrix& a, Matrix& v, std::size_t p, std::size_t q) {
    const double apq = a(p, q);
    if (apq == 0.0) return;
    const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
    double t;
    if (std::abs(theta) > 1e150) {
        t = 1.0 / (2.0 * theta);
    } else {
        t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        if (theta < 0.0) t = -t;
    }
    const double c = 1.0 / std::sqrt(t * t + 1.0);
    const double s = t * c;
    const double tau = s / (1.0 + c);

    const std::size_t n = a.rows();
    const double app = a(p, p);
    const double aqq = a(q, q);
    a(p, p) = app - t * apq;
    a(q, q) = aqq + t * apq;
    a(p, q) = 0.0;
    a(q, p) = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (i == p || i == q) continue;
        const double aip = a(i, p);
        const double aiq = a(i, q);
        a(i, p) = aip - s * (aiq + tau * aip);
        a(p, i) = a(i, p);
        a(i, q) = aiq + s * (aip - tau * aiq);
        a(q, i) = a(i, q);
    }
    for (std::size_t i = 0; i < n; ++i) {
        const double vip = v(i, p);
        const double viq = v(i, q);
        v(i, p) = vip - s * (viq + tau * vip);
        v(i, q) = viq + s * (vip - tau * viq);
    }
}

} // namespace

EigenDecomposition sym_eig(const Matrix& a) {
    if (a.rows() != a.cols())
        throw std::invalid_argument("sym_eig: matrix is " + std::to_string(a.rows()) + "x" +
                                    std::to_string(a.cols()) + ", not square");
    const double scale = a.max_abs();
    if (a.symmetry_defect() > 1e-10 * std::max(scale, 1e-300))
        throw std::invalid_argument("sym_eig: matrix asymmetric beyond 1e-10 relative (defect " +
                                    std::to_string(a.symmetry_defect()) + ")");
    if (!a.all_finite()) throw std::invalid_argument("sym_eig: non-finite entries");

    const std::size_t n = a.rows();
    Matrix work = a;
    // Symmetrize exactly so rotations preserve symmetry bit-for-bit.
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double m = 0.5 * (work(i, j) + work(j, i));
            work(i, j) = m;
            work(j, i) = m;
        }
    Matrix v = Matrix::identity(n);

    const double tol = 1e-15 * std::max(scale, 1e-300) * static_cast<double>(n);
    const int max_sweeps = 64;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        if (off_diagonal_norm(work) <= tol) break;
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q)
                if (std::abs(work(p, q)) > tol / static_cast<double>(n * n)) rotate(work, v, p, q);
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return work(i, i) < work(j, j); });

    EigenDecomposition eig;
    eig.values.resize(n);
    eig.vectors = Matrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t src = order[k];
        eig.values[k] = work(src, src);
        // Sign convention: first component exceeding the noise floor is positive.
        double sign = 1.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (std::abs(v(i, src)) > 1e-12) {
                sign = v(i, src) > 0.0 ? 1.0 : -1.0;
                break;
            }
        }
        for (std::size_t i = 0; i < n; ++i) eig.vectors(i, k) = sign * v(i, src);
    }
    return eig;
}

} // namespace kanlab
