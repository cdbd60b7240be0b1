#pragma once

#include "kanlab/matrix.hpp"

#include <vector>

namespace kanlab {

/// Eigendecomposition of a symmetric matrix. Eigenvalues ascending, the k-th
/// column of `vectors` is the unit eigenvector of values[k], sign-normalized so
/// that its first nonzero component is positive.
struct EigenDecomposition {
    std::vector<double> values;
    Matrix vectors;

    std::vector<double> vector(std::size_t k) const;

    double min() const { return values.front(); }
    double max() const { return values.back(); }
};

/// Dense symmetric eigensolver (cyclic Jacobi rotations). Rejects non-square or
/// asymmetric input (symmetry checked to 1e-10 relative).
EigenDecomposition sym_eig(const Matrix& a);

} // namespace kanlab
