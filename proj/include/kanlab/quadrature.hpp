#pragma once

#include <functional>
#include <vector>

namespace kanlab {

/// 1-D quadrature rule: nodes strictly increasing in [a,b], positive weights
/// summing to b-a.
struct Quadrature {
    std::vector<double> nodes;
    std::vector<double> weights;

    double a = 0.0;
    double b = 0.0;
};

/// Composite 10-point Gauss-Legendre rule with `panels` equal panels on [a,b].
Quadrature gauss_legendre(double a, double b, std::size_t panels = 64);

/// Composite 10-point Gauss-Legendre rule whose panels align with the given
/// breakpoints; each breakpoint interval is subdivided so the total panel count
/// is at least `min_panels`.
Quadrature gauss_legendre_aligned(const std::vector<double>& breakpoints,
                                  std::size_t min_panels = 64);

/// Sum of weight_i * f(node_i). Throws std::domain_error if f is non-finite at
/// any node.
double integrate(const std::function<double(double)>& f, const Quadrature& quad);

} // namespace kanlab
