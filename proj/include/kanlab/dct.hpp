#pragma once

#include "kanlab/matrix.hpp"

#include <cstddef>
#include <vector>

namespace kanlab {

/// Orthonormal DCT-II matrix: W_{k,n} = s_k * cos(pi*(n+1/2)*k/p) with
/// s_0 = sqrt(1/p) and s_k = sqrt(2/p) for k >= 1. Row 0 is the DC direction.
struct DctMatrix {
    std::size_t p = 0;
    Matrix w;

    /// out = W * in for a single length-p vector.
    std::vector<double> apply(const std::vector<double>& in) const;
};

DctMatrix dct_matrix(std::size_t p);

/// Applies W to every row of x (each row is a lag window); returns the
/// transformed matrix. Rejects a column-count mismatch.
Matrix apply_dct(const DctMatrix& w, const Matrix& x);

} // namespace kanlab
