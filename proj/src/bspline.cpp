#include "kanlab/bspline.hpp"

#include <cmath>
#include <stdexcept>

namespace kanlab {

void SplineBasisSpec::validate() const {
    if (grid < 2) throw std::invalid_argument("SplineBasisSpec: grid must be >= 2");
    if (!(hi > lo)) throw std::invalid_argument("SplineBasisSpec: domain must satisfy hi > lo");
}

std::vector<double> SplineBasisSpec::breakpoints() const {
    validate();
    std::vector<double> b(grid);
    const double step = (hi - lo) / static_cast<double>(grid - 1);
    for (std::size_t i = 0; i < grid; ++i) b[i] = lo + step * static_cast<double>(i);
    b.back() = hi; // exact endpoint regardless of rounding
    return b;
}

std::vector<double> SplineBasisSpec::knot_vector() const {
    const std::vector<double> bp = breakpoints();
    std::vector<double> t;
    t.reserve(grid + 2 * degree);
    for (std::size_t i = 0; i < degree; ++i) t.push_back(lo);
    t.insert(t.end(), bp.begin(), bp.end());
    for (std::size_t i = 0; i < degree; ++i) t.push_back(hi);
    return t;
}

std::vector<double> bspline_basis(double z, const SplineBasisSpec& spec, bool* clamped) {
    spec.validate();
    if (!std::isfinite(z)) throw std::invalid_argument("bspline_basis: non-finite input");
    bool hit_boundary = false;
    if (z < spec.lo) {
        z = spec.lo;
        hit_boundary = true;
    } else if (z > spec.hi) {
        z = spec.hi;
        hit_boundary = true;
    }
    if (clamped) *clamped = hit_boundary;

    const std::size_t k = spec.degree;
    const std::size_t m = spec.basis_count();
    const std::vector<double> t = spec.knot_vector();

    // Knot span index: largest i with t[i] <= z, capped so z = hi lands in the
    // last nonempty span (right-closed there by convention).
    std::size_t span = k;
    while (span + 1 < m && z >= t[span + 1]) ++span;

    // Triangular scheme: after round j, n[r] = B_{span-j+r, j}(z).
    std::vector<double> n(k + 1, 0.0);
    std::vector<double> left(k + 1, 0.0);
    std::vector<double> right(k + 1, 0.0);
    n[0] = 1.0;
    for (std::size_t j = 1; j <= k; ++j) {
        left[j] = z - t[span + 1 - j];
        right[j] = t[span + j] - z;
        double saved = 0.0;
        for (std::size_t r = 0; r < j; ++r) {
            const double denom = right[r + 1] + left[j - r];
            const double tmp = n[r] / denom;
            n[r] = saved + right[r + 1] * tmp;
            saved = left[j - r] * tmp;
        }
        n[j] = saved;
    }

    std::vector<double> out(m, 0.0);
    for (std::size_t j = 0; j <= k; ++j) out[span - k + j] = n[j];
    return out;
}

} // namespace kanlab
