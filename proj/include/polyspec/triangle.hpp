// Symmetry reduction of the regular polygon to the right triangle
// T(pi/N, r): the Dirichlet eigenvalue of P_N^r equals the mixed eigenvalue of
// the triangle, and triangle eigenfunctions unfold to the whole polygon.
#ifndef POLYSPEC_TRIANGLE_HPP
#define POLYSPEC_TRIANGLE_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "constants.hpp"
#include "femeig.hpp"
#include "geometry.hpp"
#include "quadrature.hpp"

namespace polyspec {

struct ReductionReport {
    int n;
    double r;
    ConvergenceSeries lambda_polygon;
    ConvergenceSeries mu_triangle;
    double relative_gap;
    bool certified;
};

/// Solves the polygon and the reduced triangle independently and compares the
/// extrapolated eigenvalues.
inline ReductionReport verify_reduction(int n, double r, LevelRange levels, const SolverOptions &opt = {})
{
    RegularPolygonSpec spec{n, r};
    spec.validate();
    ReductionReport rep{n, r, solve_polygon(spec, levels, opt), solve_triangle({pi / n, r}, levels, opt), 0.0, false};
    const double lambda = rep.lambda_polygon.extrapolated;
    rep.relative_gap = std::abs(lambda - rep.mu_triangle.extrapolated) / lambda;
    const double combined = rep.lambda_polygon.error_estimate + rep.mu_triangle.error_estimate;
    rep.certified = rep.relative_gap < std::max(1e-3, certification_factor * combined / lambda);
    return rep;
}

/// Result of folding a point of P_N^r (phase 0, centred at the origin) onto
/// the fundamental domain.
struct FoldResult {
    Vec2 canonical;         ///< image in the canonical frame of T(pi/N, r)
    DihedralElement element; ///< g with g x in the sector between vertex 0 and the midpoint of side 0
    Mat2 to_canonical;      ///< orthogonal map x -> canonical
};

/// Angle folding. The sector {O, vertex 0, midpoint of side 0} is mapped onto
/// T(pi/N, r) by the reflection across the line at angle pi/(2N), which sends
/// the vertex to B and the side midpoint to A.
inline FoldResult fold_to_triangle(const Vec2 &x, int n)
{
    const double sector = 2.0 * pi / n;
    double theta = std::atan2(x.y(), x.x());
    if (theta < 0.0) theta += 2.0 * pi;
    int k = static_cast<int>(std::floor(theta / sector));
    k = std::clamp(k, 0, n - 1);
    const double phi = theta - k * sector;
    DihedralElement g = phi > pi / n ? dihedral_reflection(n, k + 1) : dihedral_rotation(n, (n - k) % n == 0 ? n : n - k);
    const double t = pi / n;
    Mat2 half;
    half << std::cos(t), std::sin(t), std::sin(t), -std::cos(t);
    const Mat2 q = half * g.matrix;
    return {q * x, g, q};
}

/// A mixed-problem eigenfunction on T(pi/N, r) extended to P_N^r by the
/// dihedral group.
class UnfoldedFunction {
public:
    UnfoldedFunction(const Mesh &triangle_mesh, const EigenResult &eig, int n, double r)
        : f_(triangle_mesh, eig), n_(n), r_(r)
    {
        if (n < 3) throw std::invalid_argument("unfold needs N >= 3");
    }

    std::optional<FemFunction::Sample> try_eval(const Vec2 &x) const
    {
        const auto fold = fold_to_triangle(x, n_);
        const double apothem = r_ * std::cos(pi / n_);
        if (fold.canonical.x() > apothem * (1.0 + 1e-12)) return std::nullopt;
        Vec2 y = fold.canonical;
        // rounding can put boundary points a hair outside the triangle
        y.x() = std::min(y.x(), apothem);
        y.y() = std::clamp(y.y(), 0.0, y.x() * std::tan(pi / n_));
        auto s = f_.try_eval(y);
        if (!s) return std::nullopt;
        s->gradient = fold.to_canonical.transpose() * s->gradient;
        return s;
    }

    FemFunction::Sample eval(const Vec2 &x) const
    {
        auto s = try_eval(x);
        if (!s) throw std::out_of_range("point outside the regular polygon");
        return *s;
    }

    int n() const { return n_; }
    double r() const { return r_; }

private:
    FemFunction f_;
    int n_;
    double r_;
};

inline UnfoldedFunction unfold(const LevelSolution &triangle_solution, int n)
{
    const auto &nodes = triangle_solution.mesh.nodes;
    double r = 0.0;
    for (const auto &p : nodes) r = std::max(r, p.norm());
    return UnfoldedFunction(triangle_solution.mesh, triangle_solution.eig, n, r);
}

struct EnergyIntegrals {
    double gradient_sq; ///< integral of |Du|^2
    double value_sq;    ///< integral of u^2
    double rayleigh() const { return gradient_sq / value_sq; }
};

/// Quadrature of |Df|^2 and f^2 over the elements of `m`, with f evaluated
/// pointwise (degree-5 rule per element).
template <class Eval>
EnergyIntegrals integrate_energy(const Mesh &m, Eval &&eval)
{
    EnergyIntegrals e{0.0, 0.0};
    for (const auto &t : m.elements) {
        const Vec2 &a = m.nodes[t[0]], &b = m.nodes[t[1]], &c = m.nodes[t[2]];
        const double area = 0.5 * cross(b - a, c - a);
        for (const auto &q : triangle_rule_degree5()) {
            const Vec2 p = q.bary[0] * a + q.bary[1] * b + q.bary[2] * c;
            const FemFunction::Sample s = eval(p);
            e.gradient_sq += area * q.weight * s.gradient.squaredNorm();
            e.value_sq += area * q.weight * s.value * s.value;
        }
    }
    return e;
}

/// Rayleigh quotient of the unfolded function over P_N^r, by quadrature on an
/// independent polygon mesh of the given level.
inline EnergyIntegrals unfolded_energy(const UnfoldedFunction &f, int quadrature_level)
{
    const Mesh m = mesh_polygon(make_regular_polygon({f.n(), f.r()}), Vec2::Zero(), quadrature_level);
    return integrate_energy(m, [&](const Vec2 &p) { return f.eval(p); });
}

/// Relative L2 distance between the unfolded triangle eigenfunction and a
/// polygon eigenfunction, both normalized to unit L2 norm on P_N^r.
inline double unfold_discrepancy(const UnfoldedFunction &unfolded, const LevelSolution &polygon_solution)
{
    const FemFunction poly(polygon_solution.mesh, polygon_solution.eig);
    const Mesh &m = polygon_solution.mesh;
    double uu = 0.0, vv = 0.0, uv = 0.0;
    for (const auto &t : m.elements) {
        const Vec2 &a = m.nodes[t[0]], &b = m.nodes[t[1]], &c = m.nodes[t[2]];
        const double area = 0.5 * cross(b - a, c - a);
        for (const auto &q : triangle_rule_degree5()) {
            const Vec2 p = q.bary[0] * a + q.bary[1] * b + q.bary[2] * c;
            const double u = q.bary[0] * poly.nodal()[t[0]] + q.bary[1] * poly.nodal()[t[1]] + q.bary[2] * poly.nodal()[t[2]];
            const double v = unfolded.eval(p).value;
            const double w = area * q.weight;
            uu += w * u * u;
            vv += w * v * v;
            uv += w * u * v;
        }
    }
    // ||u/|u| - v/|v|||^2 = 2 - 2 <u,v>/(|u||v|)
    return std::sqrt(std::max(0.0, 2.0 - 2.0 * uv / std::sqrt(uu * vv)));
}

} // namespace polyspec

#endif // POLYSPEC_TRIANGLE_HPP
