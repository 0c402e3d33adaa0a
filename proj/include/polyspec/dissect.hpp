// Dissection of P_N^r into N isosceles triangles and N quadrilaterals that
// rotate about the centre into a polygon D of equal area inside P_{N+1}^r.
#ifndef POLYSPEC_DISSECT_HPP
#define POLYSPEC_DISSECT_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "constants.hpp"
#include "femeig.hpp"
#include "geometry.hpp"
#include "triangle.hpp"

namespace polyspec {

struct Piece {
    enum class Kind { triangle, quadrilateral };
    Kind kind;
    int index;        ///< 1-based label (T_i, Q_i)
    Polygon original;
    double rotation;  ///< radians, about the centre
    Polygon moved;

    std::string label() const { return (kind == Kind::triangle ? "T" : "Q") + std::to_string(index); }
};

struct DissectionCertificates {
    double area_match = 0.0;         ///< max relative error of piece-area sum and area(D) against area(P_N)
    double containment_margin = 0.0; ///< min over moved pieces of the signed margin inside P_{N+1}
    bool disjointness = false;       ///< moved pieces have pairwise disjoint interiors
    double cut_matching = 0.0;       ///< max discrepancy between glued cut segments

    double overlap_area = 0.0;       ///< |sum of moved piece areas - area(D)| / area(D)
    double strict_area_gap = 0.0;    ///< area(P_{N+1}) - area(D)
    int vertex_contacts = 0;         ///< piece vertices lying on a vertex of P_{N+1}
    double clearance_off_contacts = 0.0; ///< margin over all other piece vertices
    std::vector<std::string> failures;

    bool all_pass() const { return failures.empty(); }
};

struct DissectionResult {
    int n;
    double r;
    double delta;                 ///< cut angle actually used
    std::vector<Piece> triangles; ///< in assembly order inside the final sector
    std::vector<Piece> quads;
    Polygon assembled;            ///< D
    Polygon target;               ///< P_{N+1}^r, phase 0
    bool first_order_failed = false;
    DissectionCertificates certificates;

    std::vector<const Piece *> pieces() const
    {
        std::vector<const Piece *> out;
        for (const auto &q : quads) out.push_back(&q);
        for (const auto &t : triangles) out.push_back(&t);
        return out;
    }
};

inline double cut_angle(int n) { return 2.0 * pi / n - 2.0 * pi / (n + 1); }

namespace detail {

inline double wrap_angle(double a)
{
    a = std::fmod(a, 2.0 * pi);
    if (a <= -pi) a += 2.0 * pi;
    if (a > pi) a -= 2.0 * pi;
    return a;
}

/// Separating-axis test for convex polygons: true if the interiors are
/// disjoint up to `eps`.
inline bool interiors_disjoint(const Polygon &a, const Polygon &b, double eps)
{
    auto separated_by_edges_of = [&](const Polygon &p, const Polygon &q) {
        for (std::size_t i = 0; i < p.size(); ++i) {
            const Vec2 e = p[(i + 1) % p.size()] - p[i];
            const Vec2 nrm = Vec2(e.y(), -e.x()).normalized(); // outward for CCW
            double pmax = -std::numeric_limits<double>::infinity(), qmin = std::numeric_limits<double>::infinity();
            for (const auto &v : p.vertices()) pmax = std::max(pmax, nrm.dot(v));
            for (const auto &v : q.vertices()) qmin = std::min(qmin, nrm.dot(v));
            if (qmin >= pmax - eps) return true;
        }
        return false;
    };
    return separated_by_edges_of(a, b) || separated_by_edges_of(b, a);
}

/// Endpoints of the two cut segments of a piece with apex at the centre: the
/// vertex after the apex (lower cut) and the vertex before it (upper cut).
inline Vec2 lower_cut_end(const Polygon &p) { return p[1]; }
inline Vec2 upper_cut_end(const Polygon &p) { return p[p.size() - 1]; }

/// Max distance between points at equal distance from the centre on two
/// segments that both start at the centre.
inline double radial_segment_mismatch(const Vec2 &end_a, const Vec2 &end_b)
{
    const double la = end_a.norm(), lb = end_b.norm();
    return std::max(std::abs(la - lb), std::min(la, lb) * (end_a / la - end_b / lb).norm());
}

} // namespace detail

/// Checks disjointness, area bookkeeping, containment in P_{N+1} and matching
/// of glued cuts. Pieces must be listed in angular assembly order.
inline DissectionCertificates certify(const DissectionResult &d)
{
    DissectionCertificates c;
    const auto pieces = d.pieces();
    const double area_n = regular_metrics({d.n, d.r}).area;
    const double tol = 1e-12 * d.r;

    double piece_sum = 0.0;
    for (const auto *p : pieces) piece_sum += p->moved.area();
    c.area_match = std::max(std::abs(piece_sum - area_n), std::abs(d.assembled.area() - area_n)) / area_n;
    if (!(c.area_match < 1e-12)) c.failures.push_back("area mismatch " + std::to_string(c.area_match));

    c.disjointness = true;
    for (std::size_t i = 0; i < pieces.size(); ++i)
        for (std::size_t j = i + 1; j < pieces.size(); ++j)
            if (!detail::interiors_disjoint(pieces[i]->moved, pieces[j]->moved, tol)) {
                c.disjointness = false;
                c.failures.push_back("pieces " + pieces[i]->label() + " and " + pieces[j]->label() + " overlap");
            }
    c.overlap_area = std::abs(piece_sum - d.assembled.area()) / d.assembled.area();
    if (!(c.overlap_area < 1e-12)) {
        c.disjointness = false;
        c.failures.push_back("piece areas do not add up to area(D)");
    }

    c.containment_margin = std::numeric_limits<double>::infinity();
    c.clearance_off_contacts = std::numeric_limits<double>::infinity();
    std::size_t worst = 0;
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        const double m = contains_with_margin(d.target, pieces[i]->moved);
        if (m < c.containment_margin) {
            c.containment_margin = m;
            worst = i;
        }
        for (const auto &v : pieces[i]->moved.vertices()) {
            bool contact = false;
            for (const auto &w : d.target.vertices()) contact = contact || (v - w).norm() <= tol;
            if (contact) {
                ++c.vertex_contacts;
                continue;
            }
            c.clearance_off_contacts = std::min(c.clearance_off_contacts, point_margin(d.target, v));
        }
    }
    c.strict_area_gap = d.target.area() - d.assembled.area();
    if (c.containment_margin < -tol)
        c.failures.push_back("piece " + pieces[worst]->label() + " leaves P_" + std::to_string(d.n + 1) + " by " +
                             std::to_string(-c.containment_margin));
    if (!(c.strict_area_gap > tol * d.r)) c.failures.push_back("D is not a proper subset of P_" + std::to_string(d.n + 1));

    c.cut_matching = 0.0;
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        const auto &a = pieces[i]->moved, &b = pieces[(i + 1) % pieces.size()]->moved;
        const double mis = detail::radial_segment_mismatch(detail::upper_cut_end(a), detail::lower_cut_end(b));
        if (mis > c.cut_matching) c.cut_matching = mis;
        if (!(mis < 1e-10 * d.r))
            c.failures.push_back("cut between " + pieces[i]->label() + " and " + pieces[(i + 1) % pieces.size()]->label() +
                                 " mismatched by " + std::to_string(mis));
    }
    return c;
}

namespace detail {

inline DissectionResult assemble_dissection(int n, double r, double delta, const std::vector<int> &order)
{
    const double rho = r * std::cos(pi / n);
    const double cut = rho / std::cos(0.5 * delta);
    auto apothem = [&](int k) { return (2.0 * k + 1.0) * pi / n; };

    DissectionResult d{n, r, delta, {}, {}, Polygon(), make_regular_polygon({n + 1, r}), false, {}};
    for (int k = 0; k < n; ++k) {
        Polygon q({Vec2::Zero(), polar(cut, apothem(k - 1) + 0.5 * delta), polar(r, 2.0 * pi * k / n),
                   polar(cut, apothem(k) - 0.5 * delta)});
        const double rot = -k * delta;
        d.quads.push_back({Piece::Kind::quadrilateral, k + 1, q, rot, q.rotated(rot)});
    }
    const double start = apothem(n - 1) - 0.5 * delta - (n - 1) * delta;
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
        const int k = order[pos];
        Polygon t({Vec2::Zero(), polar(cut, apothem(k) - 0.5 * delta), polar(cut, apothem(k) + 0.5 * delta)});
        const double rot = wrap_angle(start + (static_cast<double>(pos) + 0.5) * delta - apothem(k));
        d.triangles.push_back({Piece::Kind::triangle, k + 1, t, rot, t.rotated(rot)});
    }

    // boundary of D, counter-clockwise from the lower cut of Q1
    std::vector<Vec2> boundary;
    for (const auto &q : d.quads) {
        boundary.push_back(q.moved[1]);
        boundary.push_back(q.moved[2]);
    }
    for (const auto &t : d.triangles) boundary.push_back(t.moved[1]);
    d.assembled = Polygon(std::move(boundary));
    d.certificates = certify(d);
    return d;
}

} // namespace detail

/// Builds and certifies the dissection. `delta_scale` multiplies the cut
/// angle (1 gives the exact construction; other values are for negative
/// controls). If the natural triangle order fails cut matching, the reversed
/// order is tried and `first_order_failed` is set.
inline DissectionResult build_dissection(int n, double r, double delta_scale = 1.0)
{
    RegularPolygonSpec{n, r}.validate();
    const double delta = cut_angle(n) * delta_scale;
    std::vector<int> order(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) order[static_cast<std::size_t>(k)] = k;
    auto d = detail::assemble_dissection(n, r, delta, order);
    if (d.certificates.cut_matching < 1e-10 * r) return d;
    std::reverse(order.begin(), order.end());
    auto alt = detail::assemble_dissection(n, r, delta, order);
    if (alt.certificates.cut_matching < 1e-10 * r) {
        alt.first_order_failed = true;
        return alt;
    }
    return d;
}

struct EigenSandwich {
    ConvergenceSeries lambda_next; ///< P_{N+1}^r
    ConvergenceSeries lambda_d;
    ConvergenceSeries lambda_n;    ///< P_N^r
    Certified lower;               ///< lambda(P_{N+1}) < lambda(D)
    Certified upper;               ///< lambda(D) < lambda(P_N)
    bool certified() const { return lower.certified && upper.certified; }
};

/// lambda(P_{N+1}^r) < lambda(D) < lambda(P_N^r). The regular polygons are
/// solved through their reduced triangles; D by a fan mesh about the centre.
inline EigenSandwich eigen_sandwich(const DissectionResult &d, LevelRange levels, const SolverOptions &opt = {})
{
    EigenSandwich s;
    s.lambda_next = solve_triangle({pi / (d.n + 1), d.r}, levels, opt);
    s.lambda_d = solve_polygon(d.assembled, Vec2::Zero(), levels, opt);
    s.lambda_n = solve_triangle({pi / d.n, d.r}, levels, opt);
    s.lower = certify_less(s.lambda_next.extrapolated, s.lambda_next.error_estimate, s.lambda_d.extrapolated, s.lambda_d.error_estimate);
    s.upper = certify_less(s.lambda_d.extrapolated, s.lambda_d.error_estimate, s.lambda_n.extrapolated, s.lambda_n.error_estimate);
    return s;
}

/// Integrals over D of the P_N eigenfunction carried by the piece rotations
/// (quadrature on a fan mesh of D) next to the same integrals over P_N.
struct TransplantCheck {
    EnergyIntegrals over_d;
    EnergyIntegrals over_polygon;
    double value_rel_diff;
    double gradient_rel_diff;
};

inline TransplantCheck transplant_energy(const DissectionResult &d, const UnfoldedFunction &u, int quadrature_level)
{
    const auto pieces = d.pieces();
    const double tol = 1e-12 * d.r;
    auto eval_on_d = [&](const Vec2 &x) {
        for (const auto *p : pieces) {
            if (!p->moved.contains(x, tol)) continue;
            auto s = u.eval(rotate(x, -p->rotation));
            s.gradient = rotate(s.gradient, p->rotation);
            return s;
        }
        throw std::out_of_range("quadrature point outside every moved piece");
    };
    TransplantCheck t;
    t.over_d = integrate_energy(mesh_polygon(d.assembled, Vec2::Zero(), quadrature_level), eval_on_d);
    t.over_polygon = unfolded_energy(u, quadrature_level);
    t.value_rel_diff = std::abs(t.over_d.value_sq - t.over_polygon.value_sq) / t.over_polygon.value_sq;
    t.gradient_rel_diff = std::abs(t.over_d.gradient_sq - t.over_polygon.gradient_sq) / t.over_polygon.gradient_sq;
    return t;
}

/// Writes every piece before and after its rotation, then D.
inline void write_dissection(std::ostream &os, const DissectionResult &d)
{
    os << "# dissection N=" << d.n << " r=" << d.r << " delta=" << d.delta << '\n';
    for (const auto *p : d.pieces()) {
        write_polygon(os, p->original, {"piece " + p->label() + " original"});
        os << '\n';
        write_polygon(os, p->moved, {"piece " + p->label() + " moved rotation=" + std::to_string(p->rotation)});
        os << '\n';
    }
    write_polygon(os, d.assembled, {"assembled D N=" + std::to_string(d.n) + " r=" + std::to_string(d.r) + " tags=Dirichlet"});
}

} // namespace polyspec

#endif // POLYSPEC_DISSECT_HPP
