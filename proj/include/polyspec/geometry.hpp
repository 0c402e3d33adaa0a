// Exact constructions for regular polygons, the reduced right triangle and
// general planar polygons.
#ifndef POLYSPEC_GEOMETRY_HPP
#define POLYSPEC_GEOMETRY_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace polyspec {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

inline constexpr double pi = std::numbers::pi;

inline double cross(const Vec2 &a, const Vec2 &b) { return a.x() * b.y() - a.y() * b.x(); }

inline Vec2 rotate(const Vec2 &p, double angle, const Vec2 &center = Vec2::Zero())
{
    const double c = std::cos(angle), s = std::sin(angle);
    const Vec2 d = p - center;
    return center + Vec2(c * d.x() - s * d.y(), s * d.x() + c * d.y());
}

inline Vec2 polar(double radius, double angle) { return {radius * std::cos(angle), radius * std::sin(angle)}; }

/// Parametric description of the regular polygon P_N^r.
struct RegularPolygonSpec {
    int n = 3;
    double r = 1.0;
    Vec2 center = Vec2::Zero();
    double phase = 0.0; ///< angle of the first vertex; 0 puts it on the positive x-axis

    void validate() const
    {
        if (n < 3) throw std::invalid_argument("regular polygon needs at least 3 sides, got " + std::to_string(n));
        if (!(r > 0.0) || !std::isfinite(r)) throw std::invalid_argument("circumradius must be positive");
    }
};

/// Closed-form quantities of a regular polygon.
struct RegularMetrics {
    double area;
    double side_length;  ///< 2 r sin(pi/N)
    double inradius;     ///< r cos(pi/N)
    double central_angle;
};

inline RegularMetrics regular_metrics(const RegularPolygonSpec &spec)
{
    spec.validate();
    const double half = pi / spec.n;
    const double side = 2.0 * spec.r * std::sin(half);
    const double rho = spec.r * std::cos(half);
    return {spec.n * spec.r * spec.r * std::sin(half) * std::cos(half), side, rho, 2.0 * pi / spec.n};
}

inline double signed_area(const std::vector<Vec2> &v)
{
    double a = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) a += cross(v[i], v[(i + 1) % v.size()]);
    return 0.5 * a;
}

namespace detail {

inline int orientation(const Vec2 &a, const Vec2 &b, const Vec2 &c, double eps)
{
    const double v = cross(b - a, c - a);
    return v > eps ? 1 : (v < -eps ? -1 : 0);
}

inline bool on_segment(const Vec2 &a, const Vec2 &b, const Vec2 &p, double eps)
{
    return std::min(a.x(), b.x()) - eps <= p.x() && p.x() <= std::max(a.x(), b.x()) + eps &&
           std::min(a.y(), b.y()) - eps <= p.y() && p.y() <= std::max(a.y(), b.y()) + eps;
}

inline bool segments_intersect(const Vec2 &p1, const Vec2 &p2, const Vec2 &q1, const Vec2 &q2, double eps)
{
    const int o1 = orientation(p1, p2, q1, eps), o2 = orientation(p1, p2, q2, eps);
    const int o3 = orientation(q1, q2, p1, eps), o4 = orientation(q1, q2, p2, eps);
    if (o1 != o2 && o3 != o4 && o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0) return true;
    if (o1 == 0 && on_segment(p1, p2, q1, eps)) return true;
    if (o2 == 0 && on_segment(p1, p2, q2, eps)) return true;
    if (o3 == 0 && on_segment(q1, q2, p1, eps)) return true;
    if (o4 == 0 && on_segment(q1, q2, p2, eps)) return true;
    return false;
}

} // namespace detail

/// Simple polygon with counter-clockwise vertices and strictly positive area.
class Polygon {
public:
    Polygon() = default;

    explicit Polygon(std::vector<Vec2> vertices) : vertices_(std::move(vertices))
    {
        if (vertices_.size() < 3) throw std::invalid_argument("polygon needs at least 3 vertices");
        if (!(signed_area(vertices_) > 0.0)) throw std::invalid_argument("polygon must be counter-clockwise with positive area");
        if (!is_simple()) throw std::invalid_argument("polygon is self-intersecting");
        convex_ = compute_convex();
    }

    const std::vector<Vec2> &vertices() const { return vertices_; }
    std::size_t size() const { return vertices_.size(); }
    const Vec2 &operator[](std::size_t i) const { return vertices_[i]; }
    bool convex() const { return convex_; }

    double area() const { return signed_area(vertices_); }

    double perimeter() const
    {
        double p = 0.0;
        for (std::size_t i = 0; i < size(); ++i) p += (vertices_[(i + 1) % size()] - vertices_[i]).norm();
        return p;
    }

    /// Area centroid.
    Vec2 centroid() const
    {
        Vec2 c = Vec2::Zero();
        for (std::size_t i = 0; i < size(); ++i) {
            const Vec2 &a = vertices_[i], &b = vertices_[(i + 1) % size()];
            c += (a + b) * cross(a, b);
        }
        return c / (6.0 * area());
    }

    Polygon transformed(const Mat2 &m, const Vec2 &shift = Vec2::Zero()) const
    {
        std::vector<Vec2> v;
        v.reserve(size());
        for (const auto &p : vertices_) v.push_back(m * p + shift);
        if (m.determinant() < 0) std::reverse(v.begin(), v.end());
        return Polygon(std::move(v));
    }

    Polygon rotated(double angle, const Vec2 &center = Vec2::Zero()) const
    {
        std::vector<Vec2> v;
        v.reserve(size());
        for (const auto &p : vertices_) v.push_back(rotate(p, angle, center));
        return Polygon(std::move(v));
    }

    /// True if p lies inside or on the boundary (within eps, absolute).
    bool contains(const Vec2 &p, double eps = 1e-12) const
    {
        if (convex_) {
            for (std::size_t i = 0; i < size(); ++i) {
                const Vec2 &a = vertices_[i], &b = vertices_[(i + 1) % size()];
                if (cross(b - a, p - a) < -eps * (b - a).norm()) return false;
            }
            return true;
        }
        // winding number, boundary counted as inside
        int wn = 0;
        for (std::size_t i = 0; i < size(); ++i) {
            const Vec2 &a = vertices_[i], &b = vertices_[(i + 1) % size()];
            const Vec2 e = b - a;
            const double len = e.norm();
            const double t = std::clamp((p - a).dot(e) / (len * len), 0.0, 1.0);
            if ((a + t * e - p).norm() <= eps) return true;
            if (a.y() <= p.y()) {
                if (b.y() > p.y() && cross(e, p - a) > 0) ++wn;
            } else if (b.y() <= p.y() && cross(e, p - a) < 0) {
                --wn;
            }
        }
        return wn != 0;
    }

private:
    bool is_simple() const
    {
        const std::size_t n = size();
        double scale = 0.0;
        for (const auto &p : vertices_) scale = std::max(scale, p.cwiseAbs().maxCoeff());
        const double eps = 1e-14 * std::max(scale * scale, 1e-300);
        for (std::size_t i = 0; i < n; ++i) {
            if ((vertices_[(i + 1) % n] - vertices_[i]).norm() == 0.0) return false;
            for (std::size_t j = i + 1; j < n; ++j) {
                if (j == i + 1 || (i == 0 && j == n - 1)) continue; // adjacent edges share a vertex
                if (detail::segments_intersect(vertices_[i], vertices_[(i + 1) % n], vertices_[j], vertices_[(j + 1) % n], eps))
                    return false;
            }
        }
        return true;
    }

    bool compute_convex() const
    {
        const std::size_t n = size();
        for (std::size_t i = 0; i < n; ++i) {
            const Vec2 &a = vertices_[i], &b = vertices_[(i + 1) % n], &c = vertices_[(i + 2) % n];
            if (cross(b - a, c - b) < -1e-14 * (b - a).norm() * (c - b).norm()) return false;
        }
        return true;
    }

    std::vector<Vec2> vertices_;
    bool convex_ = false;
};

inline Polygon make_regular_polygon(const RegularPolygonSpec &spec)
{
    spec.validate();
    std::vector<Vec2> v;
    v.reserve(static_cast<std::size_t>(spec.n));
    for (int k = 0; k < spec.n; ++k) v.push_back(spec.center + polar(spec.r, spec.phase + 2.0 * pi * k / spec.n));
    return Polygon(std::move(v));
}

/// Boundary parts of the right triangle T(alpha, r).
enum class TrianglePart { gamma1, gamma2, gamma3 };

inline const char *to_string(TrianglePart p)
{
    switch (p) {
    case TrianglePart::gamma1: return "gamma1";
    case TrianglePart::gamma2: return "gamma2";
    case TrianglePart::gamma3: return "gamma3";
    }
    return "?";
}

/// Right triangle with hypotenuse r and acute angle alpha at the origin.
///
/// Canonical frame: O = (0,0), A = (r cos a, 0), B = (r cos a, r sin a).
/// gamma1 = A-B is the cathetus opposite alpha (Dirichlet), gamma2 = O-B the
/// hypotenuse and gamma3 = O-A the horizontal cathetus (both Neumann).
struct TriangleSpec {
    double alpha = pi / 4;
    double r = 1.0;

    void validate() const
    {
        if (!(alpha > 0.0 && alpha < pi / 2)) throw std::invalid_argument("triangle angle must lie in (0, pi/2)");
        if (!(r > 0.0) || !std::isfinite(r)) throw std::invalid_argument("hypotenuse length must be positive");
    }
};

struct TaggedTriangle {
    Polygon polygon;                   ///< vertices O, A, B
    std::array<TrianglePart, 3> parts; ///< part of edge i -> i+1
};

inline TaggedTriangle make_triangle(const TriangleSpec &spec)
{
    spec.validate();
    const double c = spec.r * std::cos(spec.alpha), s = spec.r * std::sin(spec.alpha);
    return {Polygon({Vec2(0, 0), Vec2(c, 0), Vec2(c, s)}),
            {TrianglePart::gamma3, TrianglePart::gamma1, TrianglePart::gamma2}};
}

/// Signed distance of p inside the convex polygon `outer` (minimum over its
/// edge half-planes; negative outside).
inline double point_margin(const Polygon &outer, const Vec2 &p)
{
    double margin = std::numeric_limits<double>::infinity();
    const auto &ov = outer.vertices();
    for (std::size_t i = 0; i < ov.size(); ++i) {
        const Vec2 e = ov[(i + 1) % ov.size()] - ov[i];
        margin = std::min(margin, cross(e, p - ov[i]) / e.norm());
    }
    return margin;
}

/// Signed distance by which `inner` sits inside the convex polygon `outer`:
/// the minimum over inner vertices of point_margin. Negative if any vertex
/// lies outside.
inline double contains_with_margin(const Polygon &outer, const Polygon &inner)
{
    if (!outer.convex()) throw std::invalid_argument("containment margin needs a convex outer polygon");
    double margin = std::numeric_limits<double>::infinity();
    for (const auto &p : inner.vertices()) margin = std::min(margin, point_margin(outer, p));
    return margin;
}

/// One element of the dihedral group D_N in the frame with a vertex on the
/// positive x-axis.
struct DihedralElement {
    enum class Kind { rotation, reflection };
    Kind kind;
    int k;
    Mat2 matrix;

    Vec2 apply(const Vec2 &p) const { return matrix * p; }
};

inline DihedralElement dihedral_rotation(int n, int k)
{
    const double t = 2.0 * pi * k / n, c = std::cos(t), s = std::sin(t);
    Mat2 m;
    m << c, -s, s, c;
    return {DihedralElement::Kind::rotation, k, m};
}

inline DihedralElement dihedral_reflection(int n, int k)
{
    const double t = 2.0 * pi * k / n, c = std::cos(t), s = std::sin(t);
    Mat2 m;
    m << c, s, s, -c;
    return {DihedralElement::Kind::reflection, k, m};
}

/// All 2N symmetries of P_N: rotations first (k = 1..N), then reflections.
inline std::vector<DihedralElement> dihedral_group(int n)
{
    if (n < 3) throw std::invalid_argument("dihedral group needs N >= 3");
    std::vector<DihedralElement> g;
    g.reserve(2 * static_cast<std::size_t>(n));
    for (int k = 1; k <= n; ++k) g.push_back(dihedral_rotation(n, k));
    for (int k = 1; k <= n; ++k) g.push_back(dihedral_reflection(n, k));
    return g;
}

// ---------------------------------------------------------------------------
// Polygon dump format: '#' comment header, then one "x y" line per vertex.
// Several polygons in one stream are separated by a blank line.

inline void write_polygon(std::ostream &os, const Polygon &p, const std::vector<std::string> &header = {})
{
    const auto old = os.precision(17);
    for (const auto &h : header) os << "# " << h << '\n';
    for (const auto &v : p.vertices()) os << v.x() << ' ' << v.y() << '\n';
    os.precision(old);
}

} // namespace polyspec

#endif // POLYSPEC_GEOMETRY_HPP
