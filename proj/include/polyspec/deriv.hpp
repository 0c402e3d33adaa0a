// Shape derivative of the mixed eigenvalue mu(T(alpha, r)) with respect to
// the angle alpha: boundary-integral (Hadamard) evaluation from the
// eigenfunction trace on the hypotenuse, a finite-difference oracle, and the
// numerical checks of the trace-concavity and lower-bound statements.
#ifndef POLYSPEC_DERIV_HPP
#define POLYSPEC_DERIV_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "constants.hpp"
#include "femeig.hpp"
#include "parallel.hpp"
#include "quadrature.hpp"

namespace polyspec {

struct TraceSample {
    double s;       ///< arc parameter on gamma2, in [0, r]
    double g;       ///< v(s cos a, s sin a)
    double g_prime; ///< dg/ds from a local quadratic fit
};

namespace detail {

/// FEM trace on gamma2 as (s, value) breakpoints sorted by s.
inline std::vector<std::pair<double, double>> gamma2_breakpoints(const Mesh &m, const Eigen::VectorXd &nodal)
{
    std::map<int, double> nodes;
    for (const auto &e : m.boundary) {
        if (e.part != static_cast<int>(TrianglePart::gamma2)) continue;
        nodes.emplace(e.a, 0.0);
        nodes.emplace(e.b, 0.0);
    }
    if (nodes.size() < 2) throw std::invalid_argument("mesh has no hypotenuse (gamma2) edges");
    std::vector<std::pair<double, double>> pts;
    pts.reserve(nodes.size());
    for (const auto &[id, unused] : nodes) pts.emplace_back(m.nodes[static_cast<std::size_t>(id)].norm(), nodal[id]);
    std::sort(pts.begin(), pts.end());
    return pts;
}

inline double interpolate(const std::vector<std::pair<double, double>> &pts, double s)
{
    auto it = std::lower_bound(pts.begin(), pts.end(), std::make_pair(s, -std::numeric_limits<double>::infinity()));
    if (it == pts.begin()) return pts.front().second;
    if (it == pts.end()) return pts.back().second;
    const auto &[s1, v1] = *it;
    const auto &[s0, v0] = *(it - 1);
    const double t = (s - s0) / (s1 - s0);
    return (1.0 - t) * v0 + t * v1;
}

/// Slope at x[c] of the least-squares quadratic through points [lo, lo+5).
inline double quadratic_fit_slope(const std::vector<double> &x, const std::vector<double> &y, std::size_t lo, std::size_t c,
                                  double *residual = nullptr)
{
    const std::size_t w = std::min<std::size_t>(5, x.size());
    Eigen::MatrixXd a(static_cast<Eigen::Index>(w), 3);
    Eigen::VectorXd b(static_cast<Eigen::Index>(w));
    const double scale = std::max(std::abs(x[lo + w - 1] - x[lo]), 1e-300);
    for (std::size_t i = 0; i < w; ++i) {
        const double t = (x[lo + i] - x[c]) / scale;
        a.row(static_cast<Eigen::Index>(i)) << 1.0, t, t * t;
        b[static_cast<Eigen::Index>(i)] = y[lo + i];
    }
    const Eigen::Vector3d coef = a.colPivHouseholderQr().solve(b);
    if (residual) *residual = (a * coef - b).norm();
    return coef[1] / scale;
}

} // namespace detail

/// Samples the eigenfunction along the hypotenuse at Chebyshev-Lobatto points
/// s_i = r (1 - cos(pi i / (n-1))) / 2. Values are the exact FEM trace; slopes
/// come from quadratic fits over windows of five neighbouring samples.
inline std::vector<TraceSample> hypotenuse_trace(const LevelSolution &sol, double r, int samples, double *fit_residual = nullptr)
{
    if (samples < 5) throw std::invalid_argument("trace needs at least 5 samples");
    const auto nodal = nodal_values(sol.eig.vector, FreeNodeIndex::from_mesh(sol.mesh));
    const auto pts = detail::gamma2_breakpoints(sol.mesh, nodal);
    const auto n = static_cast<std::size_t>(samples);
    std::vector<double> s(n), g(n);
    for (std::size_t i = 0; i < n; ++i) {
        s[i] = 0.5 * r * (1.0 - std::cos(pi * static_cast<double>(i) / static_cast<double>(n - 1)));
        g[i] = detail::interpolate(pts, s[i]);
    }
    std::vector<TraceSample> out(n);
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = std::min(i >= 2 ? i - 2 : 0, n - 5);
        double res = 0.0;
        out[i] = {s[i], g[i], detail::quadratic_fit_slope(s, g, lo, i, &res)};
        worst = std::max(worst, res);
    }
    if (fit_residual) *fit_residual = worst;
    return out;
}

/// Integral over [0, r] of (g'^2 - mu g^2) s ds: composite Gauss-Legendre on
/// the sample intervals, g' linear between samples.
inline double trace_integral(const std::vector<TraceSample> &trace, double mu, const std::vector<std::pair<double, double>> *exact_trace = nullptr)
{
    static const auto rule = gauss_legendre(4);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < trace.size(); ++i) {
        const auto &a = trace[i], &b = trace[i + 1];
        if (b.s <= a.s) continue;
        total += integrate(rule, a.s, b.s, [&](double s) {
            const double t = (s - a.s) / (b.s - a.s);
            const double gp = (1.0 - t) * a.g_prime + t * b.g_prime;
            const double g = exact_trace ? detail::interpolate(*exact_trace, s) : (1.0 - t) * a.g + t * b.g;
            return (gp * gp - mu * g * g) * s;
        });
    }
    return total;
}

/// Lower bound for d mu / d alpha: mu tan a - (mu - j0^2 / (r^2 cos^2 a)) / tan a.
inline double angular_lower_bound(double mu, double alpha, double r)
{
    const double t = std::tan(alpha), c = std::cos(alpha);
    return mu * t - (mu - j0_sq / (r * r * c * c)) / t;
}

/// The same bound written as 2 mu tan a - (mu - j0^2 / r^2) / (sin a cos a).
inline double angular_lower_bound_alt(double mu, double alpha, double r)
{
    return 2.0 * mu * std::tan(alpha) - (mu - j0_sq / (r * r)) / (std::sin(alpha) * std::cos(alpha));
}

struct DerivativeOptions {
    LevelRange levels{3, 6};             ///< eigenfunction and mu at alpha
    std::optional<LevelRange> fd_levels; ///< levels for mu(alpha +- h); defaults to `levels`
    int samples = 256;
    double fd_step = 1e-3;
    SolverOptions solver{};
};

struct DerivativeReport {
    double alpha;
    double r;
    double mu;           ///< extrapolated mu(T(alpha, r))
    double mu_err;
    double line_integral; ///< integral of (g'^2 - mu g^2) s ds
    double dmu_formula;   ///< line_integral / int_T v^2 + 2 mu tan(alpha)
    double dmu_fd;        ///< central difference of extrapolated mu at fixed r
    double dmu_fd_err;    ///< |FD of finest-level values - FD of extrapolated values|
    double relative_discrepancy;
    double lower_bound_stmt;  ///< mu tan a - (mu - j0^2/(r^2 cos^2 a)) / tan a
    double lower_bound_proof; ///< 2 mu tan a - (mu - j0^2/r^2) / (sin a cos a)
    double lower_bound_err;
    bool lower_bound_ok;
    bool monotone_ok;         ///< dmu_fd > mu tan(alpha), certified
    double product_derivative_fd; ///< d/da [r^2 sin a cos a mu]
    bool product_bound_ok;        ///< product derivative >= j0^2, certified
    bool sector_ok;               ///< j0^2/r^2 < mu < j0^2/(r^2 cos^2 a), certified
    double fit_residual;
    int finest_level;
};

/// Hadamard-formula derivative versus finite differences at one angle.
inline DerivativeReport shape_derivative(double alpha, double r, const DerivativeOptions &opt = {})
{
    const TriangleSpec spec{alpha, r};
    spec.validate();
    const double h = opt.fd_step;
    if (!(alpha - h > 0.0 && alpha + h < pi / 2)) throw std::invalid_argument("finite-difference stencil leaves (0, pi/2)");
    const LevelRange fd_levels = opt.fd_levels.value_or(opt.levels);

    const auto centre = solve_triangle(spec, opt.levels, opt.solver);
    const auto plus = solve_triangle({alpha + h, r}, fd_levels, opt.solver);
    const auto minus = solve_triangle({alpha - h, r}, fd_levels, opt.solver);

    DerivativeReport rep{};
    rep.alpha = alpha;
    rep.r = r;
    rep.mu = centre.extrapolated;
    rep.mu_err = centre.error_estimate;
    rep.finest_level = centre.levels.back().level;

    const auto &sol = *centre.finest;
    const auto trace = hypotenuse_trace(sol, r, opt.samples, &rep.fit_residual);
    const auto exact = detail::gamma2_breakpoints(sol.mesh, nodal_values(sol.eig.vector, FreeNodeIndex::from_mesh(sol.mesh)));
    rep.line_integral = trace_integral(trace, rep.mu, &exact);
    const double mass = 1.0; // eigenvectors carry unit M-norm: int_T v^2 = 1 exactly
    const double ta = std::tan(alpha);
    rep.dmu_formula = rep.line_integral / mass + 2.0 * rep.mu * ta;

    rep.dmu_fd = (plus.extrapolated - minus.extrapolated) / (2.0 * h);
    const double fd_last = (plus.levels.back().eigenvalue - minus.levels.back().eigenvalue) / (2.0 * h);
    rep.dmu_fd_err = std::abs(fd_last - rep.dmu_fd);
    rep.relative_discrepancy = std::abs(rep.dmu_formula - rep.dmu_fd) / std::abs(rep.dmu_fd);

    const double ca = std::cos(alpha);
    const double disk = j0_sq / (r * r);
    rep.lower_bound_stmt = angular_lower_bound(rep.mu, alpha, r);
    rep.lower_bound_proof = angular_lower_bound_alt(rep.mu, alpha, r);
    rep.lower_bound_err = std::abs(ta - 1.0 / ta) * rep.mu_err;
    rep.lower_bound_ok = rep.dmu_fd >= rep.lower_bound_stmt - certification_factor * (rep.dmu_fd_err + rep.lower_bound_err);
    rep.monotone_ok = certify_less(rep.mu * ta, ta * rep.mu_err, rep.dmu_fd, rep.dmu_fd_err).certified;

    auto product = [&](double a, double mu) { return r * r * std::sin(a) * std::cos(a) * mu; };
    rep.product_derivative_fd = (product(alpha + h, plus.extrapolated) - product(alpha - h, minus.extrapolated)) / (2.0 * h);
    const double product_last = (product(alpha + h, plus.levels.back().eigenvalue) - product(alpha - h, minus.levels.back().eigenvalue)) / (2.0 * h);
    rep.product_bound_ok = rep.product_derivative_fd - j0_sq > -certification_factor * std::abs(product_last - rep.product_derivative_fd);

    rep.sector_ok = certify_less(disk, 0.0, rep.mu, rep.mu_err).certified &&
                    certify_less(rep.mu, rep.mu_err, disk / (ca * ca), 0.0).certified;
    return rep;
}

struct ConcavityPoint {
    double x;
    double trace_sq;   ///< v^2(x, x tan a)
    double average_sq; ///< mean of v^2 over the vertical segment below
    bool pass;
};

struct ConcavityReport {
    double alpha;
    double r;
    int level;
    double h;       ///< max element edge length
    double margin;  ///< excluded band at both ends of the x grid
    std::vector<ConcavityPoint> points;
    int gradient_checked = 0;
    int gradient_failures = 0;
    double worst_gradient = -std::numeric_limits<double>::infinity(); ///< max dv/dy over checked barycenters
    Vec2 worst_location = Vec2::Zero();

    bool all_pass() const
    {
        return gradient_failures == 0 && std::all_of(points.begin(), points.end(), [](const auto &p) { return p.pass; });
    }
};

/// Trace-versus-average inequality on an x grid and the sign of dv/dy at
/// element barycenters farther than 2h from the boundary.
inline ConcavityReport check_concavity_lemma(double alpha, double r, int level, int grid, const SolverOptions &solver = {})
{
    const TriangleSpec spec{alpha, r};
    spec.validate();
    if (grid < 1) throw std::invalid_argument("concavity grid needs at least one point");
    const auto series = solve_triangle(spec, {level, level}, solver);
    const auto &sol = *series.finest;
    const FemFunction v(sol.mesh, sol.eig);

    ConcavityReport rep;
    rep.alpha = alpha;
    rep.r = r;
    rep.level = level;
    rep.h = sol.mesh.max_edge_length();
    rep.margin = 2.0 * rep.h;
    const double ta = std::tan(alpha), xmax = r * std::cos(alpha);
    if (xmax <= 2.0 * rep.margin) throw std::invalid_argument("mesh too coarse for the concavity grid");

    static const auto rule = gauss_legendre(2);
    for (int i = 0; i < grid; ++i) {
        const double x = rep.margin + (xmax - 2.0 * rep.margin) * (i + 0.5) / grid;
        const double top = x * ta;
        const double hv = v.eval({x, top}).value;
        const int pieces = std::max(64, static_cast<int>(std::ceil(16.0 * top / rep.h)));
        double integral = 0.0;
        for (int k = 0; k < pieces; ++k)
            integral += integrate(rule, top * k / pieces, top * (k + 1) / pieces, [&](double y) {
                const double val = v.eval({x, y}).value;
                return val * val;
            });
        const double avg = integral / top;
        rep.points.push_back({x, hv * hv, avg, hv * hv < avg});
    }

    const auto &m = sol.mesh;
    const Vec2 a(0, 0), b(xmax, 0), c(xmax, r * std::sin(alpha));
    auto line_distance = [](const Vec2 &p, const Vec2 &q0, const Vec2 &q1) { return std::abs(cross(q1 - q0, p - q0)) / (q1 - q0).norm(); };
    for (std::size_t e = 0; e < m.elements.size(); ++e) {
        const auto &t = m.elements[e];
        const Vec2 bc = (m.nodes[t[0]] + m.nodes[t[1]] + m.nodes[t[2]]) / 3.0;
        const double dist = std::min({line_distance(bc, a, b), line_distance(bc, b, c), line_distance(bc, c, a)});
        if (dist <= rep.margin) continue;
        ++rep.gradient_checked;
        const double dy = v.gradient(e).y();
        if (dy > rep.worst_gradient) {
            rep.worst_gradient = dy;
            rep.worst_location = bc;
        }
        if (!(dy < 0.0)) ++rep.gradient_failures;
    }
    return rep;
}

/// Product of side length and apothem of P_N^r.
inline double side_times_apothem(int n, double r) { return r * r * std::sin(2.0 * pi / n); }

struct TheoremRecord {
    int n;
    double lambda_n;    ///< lambda(P_N^r) via the triangle reduction
    double lambda_next; ///< lambda(P_{N+1}^r)
    Certified thm2;     ///< lambda_{N+1} < lambda_N cos(pi/N) / cos(pi/(N+1))
    Certified thm3;     ///< l rho lambda at N+1 < l rho lambda at N - 2 pi j0^2 / (N (N+1))
};

/// The integrated forms of the angular monotonicity statements, for
/// N = n_min..n_max. Each polygon eigenvalue is a separate job.
inline std::vector<TheoremRecord> integrate_theorems(int n_min, int n_max, double r, LevelRange levels, const SolverOptions &solver = {})
{
    if (n_min < 3 || n_max < n_min) throw std::invalid_argument("theorem range needs 3 <= n_min <= n_max");
    if (!(r > 0.0)) throw std::invalid_argument("circumradius must be positive");
    SolverOptions inner = solver;
    inner.threads = 1;
    const auto count = static_cast<std::size_t>(n_max - n_min + 2);
    const auto series = parallel_map<ConvergenceSeries>(count, solver.threads, [&](std::size_t i) {
        const int n = n_min + static_cast<int>(i);
        auto s = solve_triangle({pi / n, r}, levels, inner);
        s.finest.reset();
        return s;
    });
    std::vector<TheoremRecord> out;
    for (int n = n_min; n <= n_max; ++n) {
        const auto &a = series[static_cast<std::size_t>(n - n_min)];
        const auto &b = series[static_cast<std::size_t>(n - n_min + 1)];
        const double factor = std::cos(pi / n) / std::cos(pi / (n + 1));
        const double pn = side_times_apothem(n, r), pn1 = side_times_apothem(n + 1, r);
        const double drop = 2.0 * pi * j0_sq / (n * (n + 1.0));
        out.push_back({n, a.extrapolated, b.extrapolated,
                       certify_less(b.extrapolated, b.error_estimate, a.extrapolated * factor, a.error_estimate * factor),
                       certify_less(pn1 * b.extrapolated, pn1 * b.error_estimate, pn * a.extrapolated - drop, pn * a.error_estimate)});
    }
    return out;
}

} // namespace polyspec

#endif // POLYSPEC_DERIV_HPP
