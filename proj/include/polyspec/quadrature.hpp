#ifndef POLYSPEC_QUADRATURE_HPP
#define POLYSPEC_QUADRATURE_HPP

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "geometry.hpp"

namespace polyspec {

struct QuadratureRule1D {
    std::vector<double> nodes;   ///< on [-1, 1]
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule by Newton iteration on P_n.
inline QuadratureRule1D gauss_legendre(int n)
{
    if (n < 1) throw std::invalid_argument("Gauss-Legendre rule needs at least one node");
    QuadratureRule1D q;
    q.nodes.resize(static_cast<std::size_t>(n));
    q.weights.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 1.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        q.nodes[static_cast<std::size_t>(i)] = -x;
        q.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
        q.weights[static_cast<std::size_t>(i)] = q.weights[static_cast<std::size_t>(n - 1 - i)] = w;
    }
    return q;
}

/// Integral of f over [a, b] with the given rule.
template <class F>
double integrate(const QuadratureRule1D &q, double a, double b, F &&f)
{
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    double s = 0.0;
    for (std::size_t i = 0; i < q.nodes.size(); ++i) s += q.weights[i] * f(mid + half * q.nodes[i]);
    return half * s;
}

/// Barycentric point with weight (weights sum to 1).
struct TrianglePoint {
    std::array<double, 3> bary;
    double weight;
};

/// Seven-point degree-5 rule.
inline const std::array<TrianglePoint, 7> &triangle_rule_degree5()
{
    static const std::array<TrianglePoint, 7> rule = [] {
        constexpr double a1 = 0.059715871789770, b1 = 0.470142064105115, w1 = 0.132394152788506;
        constexpr double a2 = 0.797426985353087, b2 = 0.101286507323456, w2 = 0.125939180544827;
        return std::array<TrianglePoint, 7>{{
            {{1.0 / 3, 1.0 / 3, 1.0 / 3}, 0.225},
            {{a1, b1, b1}, w1},
            {{b1, a1, b1}, w1},
            {{b1, b1, a1}, w1},
            {{a2, b2, b2}, w2},
            {{b2, a2, b2}, w2},
            {{b2, b2, a2}, w2},
        }};
    }();
    return rule;
}

template <class F>
double integrate_triangle(const Vec2 &a, const Vec2 &b, const Vec2 &c, F &&f)
{
    const double area = 0.5 * std::abs(cross(b - a, c - a));
    double s = 0.0;
    for (const auto &p : triangle_rule_degree5()) s += p.weight * f(p.bary[0] * a + p.bary[1] * b + p.bary[2] * c);
    return area * s;
}

} // namespace polyspec

#endif // POLYSPEC_QUADRATURE_HPP
