// Inequality suite over regular polygons P_N^1: strict monotonicity of the
// fundamental tone in N, the two angular bounds, the Faber-Krahn consequences
// and the numerical observations on Area * lambda.
#ifndef POLYSPEC_VERIFY_HPP
#define POLYSPEC_VERIFY_HPP

#include <cmath>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "constants.hpp"
#include "deriv.hpp"
#include "femeig.hpp"
#include "parallel.hpp"

namespace polyspec {

/// lambda(P_N^r) through the reduction to T(pi/N, r).
inline ConvergenceSeries regular_polygon_eigenvalue(int n, double r, LevelRange levels, const SolverOptions &opt = {})
{
    auto s = solve_triangle({pi / n, r}, levels, opt);
    s.finest.reset();
    return s;
}

struct RowFlags {
    Certified t1; ///< lambda_{N+1} < lambda_N
    Certified t2; ///< lambda_{N+1} < lambda_N cos(pi/N) / cos(pi/(N+1))
    Certified t3; ///< l rho lambda at N+1 < l rho lambda at N - 2 pi j0^2 / (N(N+1))
    Certified c1; ///< pi j0^2 < area_lambda
    Certified c2; ///< area_lambda(N+1) < area_lambda(N) + (area_lambda(N) - pi j0^2) / N
    Certified af1; ///< area_lambda(N+1) < area_lambda(N), observation only
    Certified af2; ///< ratio(N+1) < ratio(N), observation only
};

struct RowRecord {
    int n;
    double lambda = std::numeric_limits<double>::quiet_NaN();
    double err = std::numeric_limits<double>::quiet_NaN();
    double area = 0.0;
    double area_lambda = std::numeric_limits<double>::quiet_NaN();
    double area_lambda_err = std::numeric_limits<double>::quiet_NaN();
    double ratio = std::numeric_limits<double>::quiet_NaN(); ///< area_lambda(N) / area_lambda(N+1)
    double ratio_err = std::numeric_limits<double>::quiet_NaN();
    std::optional<RowFlags> flags;         ///< empty when N, N+1 or N+2 failed to solve
    std::optional<double> reduction_gap;   ///< |lambda_polygon - mu_triangle| / lambda for N <= 8
    std::string error;                     ///< solver failure message, if any
};

struct SuiteSummary {
    int rows = 0;
    int missing = 0;
    bool theorems_certified = false; ///< t1..c2 and the cross-checks on every row
    int af1_holds = 0;
    int af2_holds = 0;
};

struct SuiteResult {
    std::vector<RowRecord> rows;
    SuiteSummary summary;
    LevelRange levels;
};

namespace detail {

struct PolygonValue {
    std::optional<ConvergenceSeries> series;
    std::optional<double> reduction_gap;
    std::string error;
};

inline double area_of(int n) { return 0.5 * n * std::sin(2.0 * pi / n); }

} // namespace detail

/// Relative tolerance for the polygon/triangle cross-check.
inline constexpr double reduction_tolerance = 1e-3;
/// Polygon cross-check solves stop at this level; fan meshes hold N times more elements.
inline constexpr int cross_check_max_level = 6;

/// Computes lambda(P_N^1) for N = n_min..n_max+2 as independent jobs and
/// certifies every inequality for N = n_min..n_max.
inline SuiteResult run_suite(int n_min, int n_max, LevelRange levels, double tol = 1e-10, unsigned threads = 0)
{
    if (n_min < 3 || n_max <= n_min) throw std::invalid_argument("suite needs 3 <= n_min < n_max");
    levels.validate();
    SolverOptions inner;
    inner.tol = tol;
    inner.threads = 1;
    const auto count = static_cast<std::size_t>(n_max - n_min + 3);
    const auto values = parallel_map<detail::PolygonValue>(count, threads, [&](std::size_t i) {
        const int n = n_min + static_cast<int>(i);
        detail::PolygonValue v;
        try {
            v.series = regular_polygon_eigenvalue(n, 1.0, levels, inner);
            if (n <= 8 && n <= n_max) {
                LevelRange poly = levels;
                poly.last = std::min(poly.last, cross_check_max_level);
                poly.first = std::min(poly.first, poly.last - 1);
                const auto p = solve_polygon(RegularPolygonSpec{n, 1.0}, poly, inner);
                v.reduction_gap = std::abs(p.extrapolated - v.series->extrapolated) / p.extrapolated;
            }
        } catch (const std::exception &e) {
            v.series.reset();
            v.error = e.what();
        }
        return v;
    });

    SuiteResult out;
    out.levels = levels;
    std::vector<RowRecord> all;
    for (int n = n_min; n <= n_max + 2; ++n) {
        const auto &v = values[static_cast<std::size_t>(n - n_min)];
        RowRecord row;
        row.n = n;
        row.area = detail::area_of(n);
        row.reduction_gap = v.reduction_gap;
        row.error = v.error;
        if (v.series) {
            row.lambda = v.series->extrapolated;
            row.err = v.series->error_estimate;
            row.area_lambda = row.area * row.lambda;
            row.area_lambda_err = row.area * row.err;
        }
        all.push_back(std::move(row));
    }
    for (std::size_t i = 0; i + 1 < all.size(); ++i) {
        auto &a = all[i];
        const auto &b = all[i + 1];
        a.ratio = a.area_lambda / b.area_lambda;
        a.ratio_err = a.ratio * (a.err / a.lambda + b.err / b.lambda);
    }

    const double fk = pi * j0_sq;
    SuiteSummary &sum = out.summary;
    sum.theorems_certified = true;
    for (int n = n_min; n <= n_max; ++n) {
        const auto i = static_cast<std::size_t>(n - n_min);
        RowRecord row = all[i];
        const auto &b = all[i + 1], &c = all[i + 2];
        const bool complete = std::isfinite(row.lambda) && std::isfinite(b.lambda) && std::isfinite(c.lambda);
        if (complete) {
            RowFlags f;
            f.t1 = certify_less(b.lambda, b.err, row.lambda, row.err);
            const double factor = std::cos(pi / n) / std::cos(pi / (n + 1));
            f.t2 = certify_less(b.lambda, b.err, row.lambda * factor, row.err * factor);
            const double pn = side_times_apothem(n, 1.0), pn1 = side_times_apothem(n + 1, 1.0);
            f.t3 = certify_less(pn1 * b.lambda, pn1 * b.err, pn * row.lambda - 2.0 * pi * j0_sq / (n * (n + 1.0)), pn * row.err);
            f.c1 = certify_less(fk, 0.0, row.area_lambda, row.area_lambda_err);
            f.c2 = certify_less(b.area_lambda, b.area_lambda_err, row.area_lambda + (row.area_lambda - fk) / n,
                                row.area_lambda_err * (1.0 + 1.0 / n));
            f.af1 = certify_less(b.area_lambda, b.area_lambda_err, row.area_lambda, row.area_lambda_err);
            f.af2 = certify_less(b.ratio, b.ratio_err, row.ratio, row.ratio_err);
            row.flags = f;
            const bool ok = f.t1.certified && f.t2.certified && f.t3.certified && f.c1.certified && f.c2.certified;
            sum.af1_holds += f.af1.certified;
            sum.af2_holds += f.af2.certified;
            if (!ok) sum.theorems_certified = false;
        } else {
            ++sum.missing;
            sum.theorems_certified = false;
        }
        if (row.reduction_gap && !(*row.reduction_gap < reduction_tolerance)) sum.theorems_certified = false;
        out.rows.push_back(std::move(row));
    }
    sum.rows = static_cast<int>(out.rows.size());
    return out;
}

/// CSV with 12 significant digits; flags are 0/1 (0 on missing rows).
inline void write_suite_csv(std::ostream &os, const SuiteResult &s)
{
    os << "N,lambda,err,area,area_lambda,ratio,t1,t2,t3,c1,c2,af1,af2\n";
    std::ostringstream line;
    line << std::setprecision(12);
    for (const auto &r : s.rows) {
        line.str("");
        line << r.n << ',' << r.lambda << ',' << r.err << ',' << r.area << ',' << r.area_lambda << ',' << r.ratio;
        if (r.flags) {
            const auto &f = *r.flags;
            for (const auto *c : {&f.t1, &f.t2, &f.t3, &f.c1, &f.c2, &f.af1, &f.af2}) line << ',' << (c->certified ? 1 : 0);
        } else {
            line << ",0,0,0,0,0,0,0";
        }
        os << line.str() << '\n';
    }
}

/// Markdown report: one table per inequality with lhs, rhs, slack and the
/// certification budget, then the Area * lambda column with error bars.
inline void write_suite_markdown(std::ostream &os, const SuiteResult &s)
{
    os << std::setprecision(12);
    os << "# Inequality suite, r = 1, levels " << s.levels.first << ".." << s.levels.last << "\n\n";
    os << "Certification rule: lhs < rhs is accepted when rhs - lhs > 3 (err_lhs + err_rhs).\n\n";
    struct Column {
        const char *title;
        Certified RowFlags::*member;
        bool conjecture;
    };
    const Column columns[] = {
        {"T1: lambda(N+1) < lambda(N)", &RowFlags::t1, false},
        {"T2: lambda(N+1) < lambda(N) cos(pi/N) / cos(pi/(N+1))", &RowFlags::t2, false},
        {"T3: l rho lambda (N+1) < l rho lambda (N) - 2 pi j0^2 / (N(N+1))", &RowFlags::t3, false},
        {"C1: pi j0^2 < Area lambda (N)", &RowFlags::c1, false},
        {"C2: Area lambda (N+1) < Area lambda (N) + (Area lambda (N) - pi j0^2) / N", &RowFlags::c2, false},
        {"AF-1: Area lambda (N+1) < Area lambda (N), conjecture check (numerical only)", &RowFlags::af1, true},
        {"AF-2: ratio (N+1) < ratio (N), conjecture check (numerical only)", &RowFlags::af2, true},
    };
    for (const auto &c : columns) {
        os << "## " << c.title << "\n\n| N | lhs | rhs | slack | budget | " << (c.conjecture ? "observed" : "certified") << " |\n";
        os << "|---|---|---|---|---|---|\n";
        for (const auto &r : s.rows) {
            if (!r.flags) {
                os << "| " << r.n << " | missing | | | | " << r.error << " |\n";
                continue;
            }
            const Certified &v = (*r.flags).*c.member;
            os << "| " << r.n << " | " << v.lhs << " | " << v.rhs << " | " << v.slack << " | " << v.budget << " | "
               << (v.certified ? "yes" : "no") << " |\n";
        }
        os << '\n';
    }
    os << "## Area lambda and ratio with error bars\n\n| N | lambda | Area lambda | +- | ratio | +- | reduction gap |\n";
    os << "|---|---|---|---|---|---|---|\n";
    for (const auto &r : s.rows) {
        os << "| " << r.n << " | " << r.lambda << " | " << r.area_lambda << " | " << r.area_lambda_err << " | " << r.ratio << " | "
           << r.ratio_err << " | ";
        if (r.reduction_gap) os << *r.reduction_gap;
        os << " |\n";
    }
    os << "\nLimit: pi j0^2 = " << pi * j0_sq << "\n\n";
    os << "Summary: " << s.summary.rows << " rows, " << s.summary.missing << " missing, theorems "
       << (s.summary.theorems_certified ? "certified" : "NOT certified") << ", AF-1 observed on " << s.summary.af1_holds
       << " rows, AF-2 observed on " << s.summary.af2_holds << " rows\n";
}

struct TelescopeReport {
    int n;
    int k;
    double partial_sum;        ///< sum of 2 pi j0^2 / (m(m+1)) for m = n..k-1
    double partial_sum_closed; ///< 2 pi j0^2 (1/n - 1/k)
    double identity_error;     ///< |partial_sum - partial_sum_closed|
    Certified telescoped;      ///< partial sum < l rho lambda (n) - l rho lambda (k)
    double fk_gap;             ///< Area lambda (n) - pi j0^2
    double fk_gap_err;
    bool fk_ok;                ///< lambda(n) > pi j0^2 / Area(n), certified
};

/// Sums the per-step drops of the angular bound from N to K and compares
/// against the computed difference; the K -> infinity limit is the
/// Faber-Krahn bound for P_N.
inline TelescopeReport telescope_faber_krahn(int n, int k_max, LevelRange levels, const SolverOptions &opt = {})
{
    if (n < 3 || k_max <= n) throw std::invalid_argument("telescope needs 3 <= N < K");
    TelescopeReport rep{};
    rep.n = n;
    rep.k = k_max;
    const double c = 2.0 * pi * j0_sq;
    for (int m = n; m < k_max; ++m) rep.partial_sum += c / (m * (m + 1.0));
    rep.partial_sum_closed = c * (1.0 / n - 1.0 / k_max);
    rep.identity_error = std::abs(rep.partial_sum - rep.partial_sum_closed);

    SolverOptions inner = opt;
    inner.threads = 1;
    const auto s = parallel_map<ConvergenceSeries>(2, opt.threads, [&](std::size_t i) {
        return regular_polygon_eigenvalue(i == 0 ? n : k_max, 1.0, levels, inner);
    });
    const double pn = side_times_apothem(n, 1.0), pk = side_times_apothem(k_max, 1.0);
    rep.telescoped = certify_less(rep.partial_sum, 0.0, pn * s[0].extrapolated - pk * s[1].extrapolated,
                                  pn * s[0].error_estimate + pk * s[1].error_estimate);
    const double area = detail::area_of(n);
    rep.fk_gap = area * s[0].extrapolated - pi * j0_sq;
    rep.fk_gap_err = area * s[0].error_estimate;
    rep.fk_ok = certify_less(pi * j0_sq / area, 0.0, s[0].extrapolated, s[0].error_estimate).certified;
    return rep;
}

} // namespace polyspec

#endif // POLYSPEC_VERIFY_HPP
