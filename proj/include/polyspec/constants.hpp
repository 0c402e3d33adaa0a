#ifndef POLYSPEC_CONSTANTS_HPP
#define POLYSPEC_CONSTANTS_HPP

#include <numbers>

namespace polyspec {

/// First positive zero of the Bessel function J0. The disk of radius r has
/// first Dirichlet eigenvalue j0^2 / r^2.
inline constexpr double j0 = 2.404825557695773;
inline constexpr double j0_sq = j0 * j0;

namespace detail {

/// J0 by its power series; accurate to ~1e-16 for |x| <= 3.
constexpr double bessel_j0_series(double x)
{
    const double q = -0.25 * x * x;
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 40; ++k) {
        term *= q / (static_cast<double>(k) * k);
        sum += term;
    }
    return sum;
}

/// Sign-change bisection of J0 on [2, 3].
constexpr double bessel_j0_first_zero()
{
    double lo = 2.0, hi = 3.0;
    for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        (bessel_j0_series(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

constexpr double abs_diff(double a, double b) { return a > b ? a - b : b - a; }

} // namespace detail

static_assert(detail::abs_diff(detail::bessel_j0_first_zero(), j0) < 1e-14, "hard-coded j0 disagrees with the J0 series");

/// A < B is accepted only when B - A exceeds three times the combined error
/// estimates of both sides.
inline constexpr double certification_factor = 3.0;

struct Certified {
    double lhs;
    double rhs;
    double slack;  ///< rhs - lhs
    double budget; ///< 3 (err_lhs + err_rhs)
    bool certified;
};

constexpr Certified certify_less(double lhs, double err_lhs, double rhs, double err_rhs)
{
    const double slack = rhs - lhs;
    const double budget = certification_factor * (err_lhs + err_rhs);
    return {lhs, rhs, slack, budget, slack > budget};
}

} // namespace polyspec

#endif // POLYSPEC_CONSTANTS_HPP
