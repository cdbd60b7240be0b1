#pragma once

#include <cstddef>
#include <vector>

namespace kanlab {

/// Clamped (open-uniform) B-spline basis on [lo, hi]: `grid` equally spaced
/// grid points define grid-1 intervals, and the degree-k basis has
/// m = grid + degree - 1 members. End knots carry multiplicity degree+1.
struct SplineBasisSpec {
    std::size_t grid = 8;   // G: number of grid points
    std::size_t degree = 3; // k
    double lo = -1.0;
    double hi = 1.0;

    std::size_t basis_count() const { return grid + degree - 1; } // m

    /// The G equally spaced grid points (quadrature breakpoints).
    std::vector<double> breakpoints() const;

    /// Knot vector with clamped ends: m + degree + 1 knots.
    std::vector<double> knot_vector() const;

    void validate() const;
};

/// All m basis values at z via the Cox-de Boor triangular recursion. Values
/// outside [lo, hi] are clamped to the boundary; `clamped` (when non-null)
/// reports whether that happened. At most degree+1 entries are nonzero.
std::vector<double> bspline_basis(double z, const SplineBasisSpec& spec,
                                  bool* clamped = nullptr);

} // namespace kanlab
