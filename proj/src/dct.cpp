#include "kanlab/dct.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace kanlab {

DctMatrix dct_matrix(std::size_t p) {
    if (p < 1) throw std::invalid_argument("dct_matrix: p must be >= 1");
    DctMatrix d;
    d.p = p;
    d.w = Matrix(p, p);
    const double s0 = std::sqrt(1.0 / static_cast<double>(p));
    const double sk = std::sqrt(2.0 / static_cast<double>(p));
    for (std::size_t k = 0; k < p; ++k) {
        const double scale = (k == 0) ? s0 : sk;
        for (std::size_t n = 0; n < p; ++n)
            d.w(k, n) = scale * std::cos(std::numbers::pi * (static_cast<double>(n) + 0.5) *
                                         static_cast<double>(k) / static_cast<double>(p));
    }
    return d;
}

std::vector<double> DctMatrix::apply(const std::vector<double>& in) const {
    if (in.size() != p) throw std::invalid_argument("DctMatrix: vector length mismatch");
    std::vector<double> out(p, 0.0);
    for (std::size_t k = 0; k < p; ++k) {
        double acc = 0.0;
        for (std::size_t n = 0; n < p; ++n) acc += w(k, n) * in[n];
        out[k] = acc;
    }
    return out;
}

Matrix apply_dct(const DctMatrix& d, const Matrix& x) {
    if (x.cols() != d.p) throw std::invalid_argument("apply_dct: column count mismatch");
    Matrix out(x.rows(), x.cols());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        for (std::size_t k = 0; k < d.p; ++k) {
            double acc = 0.0;
            for (std::size_t n = 0; n < d.p; ++n) acc += d.w(k, n) * x(i, n);
            out(i, k) = acc;
        }
    }
    return out;
}

} // namespace kanlab
