#include "kanlab/quadrature.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace kanlab {

namespace {

// 10-point Gauss-Legendre rule on [-1,1].
constexpr double kNodes[5] = {
    0.14887433898163121, 0.43339539412924719, 0.67940956829902441,
    0.86506336668898451, 0.97390652851717172,
};
constexpr double kWeights[5] = {
    0.29552422471475287, 0.26926671930999635, 0.21908636251598204,
    0.14945134915058059, 0.066671344308688138,
};

void append_panel(Quadrature& q, double lo, double hi) {
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    double nodes[10];
    double weights[10];
    for (int i = 0; i < 5; ++i) {
        nodes[4 - i] = mid - half * kNodes[i];
        nodes[5 + i] = mid + half * kNodes[i];
        weights[4 - i] = half * kWeights[i];
        weights[5 + i] = half * kWeights[i];
    }
    for (int i = 0; i < 10; ++i) {
        q.nodes.push_back(nodes[i]);
        q.weights.push_back(weights[i]);
    }
}

} // namespace

Quadrature gauss_legendre(double a, double b, std::size_t panels) {
    if (!(a < b)) throw std::invalid_argument("gauss_legendre: requires a < b");
    if (panels == 0) throw std::invalid_argument("gauss_legendre: requires at least one panel");
    Quadrature q;
    q.a = a;
    q.b = b;
    q.nodes.reserve(10 * panels);
    q.weights.reserve(10 * panels);
    for (std::size_t i = 0; i < panels; ++i) {
        const double lo = a + (b - a) * static_cast<double>(i) / static_cast<double>(panels);
        const double hi = a + (b - a) * static_cast<double>(i + 1) / static_cast<double>(panels);
        append_panel(q, lo, hi);
    }
    return q;
}

Quadrature gauss_legendre_aligned(const std::vector<double>& breakpoints,
                                  std::size_t min_panels) {
    if (breakpoints.size() < 2)
        throw std::invalid_argument("gauss_legendre_aligned: need at least two breakpoints");
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i)
        if (!(breakpoints[i] < breakpoints[i + 1]))
            throw std::invalid_argument("gauss_legendre_aligned: breakpoints not increasing");

    const std::size_t intervals = breakpoints.size() - 1;
    const std::size_t per_interval =
        std::max<std::size_t>(1, (min_panels + intervals - 1) / intervals);

    Quadrature q;
    q.a = breakpoints.front();
    q.b = breakpoints.back();
    for (std::size_t i = 0; i < intervals; ++i) {
        const double lo = breakpoints[i];
        const double hi = breakpoints[i + 1];
        for (std::size_t s = 0; s < per_interval; ++s) {
            const double plo = lo + (hi - lo) * static_cast<double>(s) / static_cast<double>(per_interval);
            const double phi = lo + (hi - lo) * static_cast<double>(s + 1) / static_cast<double>(per_interval);
            append_panel(q, plo, phi);
        }
    }
    return q;
}

double integrate(const std::function<double(double)>& f, const Quadrature& quad) {
    double s = 0.0;
    for (std::size_t i = 0; i < quad.nodes.size(); ++i) {
        const double v = f(quad.nodes[i]);
        if (!std::isfinite(v))
            throw std::domain_error("integrate: non-finite integrand value at node " +
                                    std::to_string(quad.nodes[i]));
        s += quad.weights[i] * v;
    }
    return s;
}

} // namespace kanlab
