// Conforming triangulations with nested dyadic refinement.
#ifndef POLYSPEC_MESH_HPP
#define POLYSPEC_MESH_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "geometry.hpp"

namespace polyspec {

enum class BoundaryTag { dirichlet, neumann };

inline const char *to_string(BoundaryTag t) { return t == BoundaryTag::dirichlet ? "Dirichlet" : "Neumann"; }

struct BoundaryEdge {
    int a;
    int b;
    BoundaryTag tag;
    int part; ///< index of the coarse boundary segment this edge descends from
};

struct Mesh {
    std::vector<Vec2> nodes;
    std::vector<std::array<int, 3>> elements; ///< counter-clockwise
    std::vector<BoundaryEdge> boundary;
    int level = 0;

    double element_area(std::size_t e) const
    {
        const auto &t = elements[e];
        return 0.5 * cross(nodes[t[1]] - nodes[t[0]], nodes[t[2]] - nodes[t[0]]);
    }

    double area() const
    {
        double a = 0.0;
        for (std::size_t e = 0; e < elements.size(); ++e) a += element_area(e);
        return a;
    }

    double max_edge_length() const
    {
        double h = 0.0;
        for (const auto &t : elements)
            for (int i = 0; i < 3; ++i) h = std::max(h, (nodes[t[(i + 1) % 3]] - nodes[t[i]]).norm());
        return h;
    }

    /// Nodes touching a Dirichlet-tagged edge.
    std::vector<bool> dirichlet_nodes() const
    {
        std::vector<bool> fixed(nodes.size(), false);
        for (const auto &e : boundary)
            if (e.tag == BoundaryTag::dirichlet) fixed[e.a] = fixed[e.b] = true;
        return fixed;
    }
};

namespace detail {

inline std::uint64_t edge_key(int a, int b)
{
    const auto lo = static_cast<std::uint64_t>(std::min(a, b)), hi = static_cast<std::uint64_t>(std::max(a, b));
    return (lo << 32) | hi;
}

} // namespace detail

/// Uniform 4-way refinement by edge midpoints. Existing node indices are kept.
inline Mesh refine(const Mesh &m)
{
    Mesh out;
    out.level = m.level + 1;
    out.nodes = m.nodes;
    out.nodes.reserve(m.nodes.size() + 3 * m.elements.size() / 2 + m.boundary.size());
    out.elements.reserve(4 * m.elements.size());
    std::unordered_map<std::uint64_t, int> mid;
    mid.reserve(3 * m.elements.size());
    auto midpoint = [&](int a, int b) {
        const auto key = detail::edge_key(a, b);
        if (auto it = mid.find(key); it != mid.end()) return it->second;
        const int id = static_cast<int>(out.nodes.size());
        out.nodes.push_back(0.5 * (m.nodes[a] + m.nodes[b]));
        mid.emplace(key, id);
        return id;
    };
    for (const auto &t : m.elements) {
        const int ab = midpoint(t[0], t[1]), bc = midpoint(t[1], t[2]), ca = midpoint(t[2], t[0]);
        out.elements.push_back({t[0], ab, ca});
        out.elements.push_back({ab, t[1], bc});
        out.elements.push_back({ca, bc, t[2]});
        out.elements.push_back({ab, bc, ca});
    }
    out.boundary.reserve(2 * m.boundary.size());
    for (const auto &e : m.boundary) {
        const int c = mid.at(detail::edge_key(e.a, e.b));
        out.boundary.push_back({e.a, c, e.tag, e.part});
        out.boundary.push_back({c, e.b, e.tag, e.part});
    }
    return out;
}

inline Mesh refine(Mesh m, int times)
{
    for (int i = 0; i < times; ++i) m = refine(m);
    return m;
}

/// Fan triangulation of a polygon that is star-shaped about `apex`, refined
/// `level` times. All outer edges are Dirichlet.
inline Mesh mesh_polygon(const Polygon &p, const Vec2 &apex, int level)
{
    if (level < 0) throw std::invalid_argument("mesh level must be non-negative");
    Mesh m;
    const int n = static_cast<int>(p.size());
    m.nodes.reserve(p.size() + 1);
    m.nodes.push_back(apex);
    for (const auto &v : p.vertices()) m.nodes.push_back(v);
    for (int i = 0; i < n; ++i) {
        const int a = 1 + i, b = 1 + (i + 1) % n;
        const double area = 0.5 * cross(m.nodes[a] - apex, m.nodes[b] - apex);
        if (!(area > 1e-14 * (m.nodes[a] - apex).norm() * (m.nodes[b] - apex).norm()))
            throw std::invalid_argument("polygon is not star-shaped about the fan apex");
        m.elements.push_back({0, a, b});
        m.boundary.push_back({a, b, BoundaryTag::dirichlet, i});
    }
    return refine(std::move(m), level);
}

/// Fan from the area centroid.
inline Mesh mesh_polygon(const Polygon &p, int level) { return mesh_polygon(p, p.centroid(), level); }

inline BoundaryTag tag_of(TrianglePart part) { return part == TrianglePart::gamma1 ? BoundaryTag::dirichlet : BoundaryTag::neumann; }

/// Single-element coarse mesh of T(alpha, r) refined `level` times; gamma1
/// Dirichlet, gamma2 and gamma3 Neumann. Edge parts carry the TrianglePart.
inline Mesh mesh_triangle(const TriangleSpec &spec, int level)
{
    if (level < 0) throw std::invalid_argument("mesh level must be non-negative");
    const auto tri = make_triangle(spec);
    Mesh m;
    m.nodes = tri.polygon.vertices();
    m.elements.push_back({0, 1, 2});
    for (int i = 0; i < 3; ++i)
        m.boundary.push_back({i, (i + 1) % 3, tag_of(tri.parts[i]), static_cast<int>(tri.parts[i])});
    return refine(std::move(m), level);
}

/// Scaled copy (same topology).
inline Mesh scaled(Mesh m, double t)
{
    for (auto &p : m.nodes) p *= t;
    return m;
}

/// Checks the conformity invariants; returns an empty string when valid.
inline std::string validate_mesh(const Mesh &m)
{
    std::unordered_map<std::uint64_t, int> count;
    for (std::size_t e = 0; e < m.elements.size(); ++e) {
        if (!(m.element_area(e) > 0.0)) return "element " + std::to_string(e) + " has non-positive area";
        const auto &t = m.elements[e];
        for (int i = 0; i < 3; ++i) ++count[detail::edge_key(t[i], t[(i + 1) % 3])];
    }
    std::unordered_map<std::uint64_t, int> tagged;
    for (const auto &b : m.boundary) ++tagged[detail::edge_key(b.a, b.b)];
    for (const auto &[key, c] : count) {
        if (c > 2) return "edge shared by more than two elements";
        const auto it = tagged.find(key);
        const int t = it == tagged.end() ? 0 : it->second;
        if (c == 1 && t != 1) return "boundary edge without exactly one tag";
        if (c == 2 && t != 0) return "interior edge carries a boundary tag";
    }
    if (tagged.size() != m.boundary.size()) return "duplicate boundary edge";
    for (const auto &[key, t] : tagged)
        if (!count.contains(key)) return "tagged edge is not a mesh edge";
    return {};
}

/// Uniform-grid point locator over element bounding boxes.
class PointLocator {
public:
    explicit PointLocator(const Mesh &m) : mesh_(&m)
    {
        lo_ = hi_ = m.nodes.front();
        for (const auto &p : m.nodes) {
            lo_ = lo_.cwiseMin(p);
            hi_ = hi_.cwiseMax(p);
        }
        const Vec2 span = (hi_ - lo_).cwiseMax(Vec2::Constant(1e-300));
        const double cells = std::max(1.0, std::sqrt(static_cast<double>(m.elements.size())));
        const double aspect = span.x() / span.y();
        nx_ = std::clamp(static_cast<int>(std::ceil(cells * std::sqrt(aspect))), 1, 4096);
        ny_ = std::clamp(static_cast<int>(std::ceil(cells / std::sqrt(aspect))), 1, 4096);
        cell_ = Vec2(span.x() / nx_, span.y() / ny_);
        buckets_.assign(static_cast<std::size_t>(nx_) * ny_, {});
        for (std::size_t e = 0; e < m.elements.size(); ++e) {
            const auto &t = m.elements[e];
            Vec2 a = m.nodes[t[0]], b = a;
            for (int i = 1; i < 3; ++i) {
                a = a.cwiseMin(m.nodes[t[i]]);
                b = b.cwiseMax(m.nodes[t[i]]);
            }
            const auto [i0, j0] = cell_of(a);
            const auto [i1, j1] = cell_of(b);
            for (int j = j0; j <= j1; ++j)
                for (int i = i0; i <= i1; ++i) buckets_[static_cast<std::size_t>(j) * nx_ + i].push_back(static_cast<int>(e));
        }
    }

    struct Hit {
        int element;
        std::array<double, 3> bary;
    };

    /// Element containing p (boundary within a relative tolerance).
    std::optional<Hit> locate(const Vec2 &p) const
    {
        const double tol = 1e-10;
        if ((p.array() < (lo_ - tol * (hi_ - lo_)).array()).any() || (p.array() > (hi_ + tol * (hi_ - lo_)).array()).any())
            return std::nullopt;
        const auto [i, j] = cell_of(p);
        std::optional<Hit> best;
        double best_min = -std::numeric_limits<double>::infinity();
        for (int e : buckets_[static_cast<std::size_t>(j) * nx_ + i]) {
            const auto b = barycentric(e, p);
            const double mn = std::min({b[0], b[1], b[2]});
            if (mn > best_min) {
                best_min = mn;
                best = Hit{e, b};
            }
            if (mn >= 0.0) break;
        }
        if (!best || best_min < -tol) return std::nullopt;
        return best;
    }

    std::array<double, 3> barycentric(int e, const Vec2 &p) const
    {
        const auto &t = mesh_->elements[static_cast<std::size_t>(e)];
        const Vec2 &a = mesh_->nodes[t[0]], &b = mesh_->nodes[t[1]], &c = mesh_->nodes[t[2]];
        const double det = cross(b - a, c - a);
        const double l1 = cross(p - a, c - a) / det, l2 = cross(b - a, p - a) / det;
        return {1.0 - l1 - l2, l1, l2};
    }

private:
    std::pair<int, int> cell_of(const Vec2 &p) const
    {
        const int i = std::clamp(static_cast<int>((p.x() - lo_.x()) / cell_.x()), 0, nx_ - 1);
        const int j = std::clamp(static_cast<int>((p.y() - lo_.y()) / cell_.y()), 0, ny_ - 1);
        return {i, j};
    }

    const Mesh *mesh_;
    Vec2 lo_, hi_, cell_;
    int nx_ = 1, ny_ = 1;
    std::vector<std::vector<int>> buckets_;
};

// ---------------------------------------------------------------------------
// Mesh dump: sections "nodes", "elements", "boundary" each preceded by a count.

inline void write_mesh(std::ostream &os, const Mesh &m, const std::vector<std::string> &header = {})
{
    const auto old = os.precision(17);
    for (const auto &h : header) os << "# " << h << '\n';
    os << "# level " << m.level << '\n';
    os << "nodes " << m.nodes.size() << '\n';
    for (const auto &p : m.nodes) os << p.x() << ' ' << p.y() << '\n';
    os << "elements " << m.elements.size() << '\n';
    for (const auto &t : m.elements) os << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    os << "boundary " << m.boundary.size() << '\n';
    for (const auto &b : m.boundary) os << b.a << ' ' << b.b << ' ' << to_string(b.tag) << ' ' << b.part << '\n';
    os.precision(old);
}

inline Mesh read_mesh(std::istream &is)
{
    Mesh m;
    std::string line;
    auto next = [&]() -> std::string {
        while (std::getline(is, line)) {
            if (line.rfind("# level ", 0) == 0) m.level = std::stoi(line.substr(8));
            if (!line.empty() && line[0] != '#') return line;
        }
        throw std::runtime_error("unexpected end of mesh dump");
    };
    auto section = [&](const std::string &name) {
        std::istringstream ss(next());
        std::string word;
        std::size_t n = 0;
        if (!(ss >> word >> n) || word != name) throw std::runtime_error("expected mesh section '" + name + "'");
        return n;
    };
    const auto nn = section("nodes");
    for (std::size_t i = 0; i < nn; ++i) {
        std::istringstream ss(next());
        double x, y;
        ss >> x >> y;
        m.nodes.emplace_back(x, y);
    }
    const auto ne = section("elements");
    for (std::size_t i = 0; i < ne; ++i) {
        std::istringstream ss(next());
        std::array<int, 3> t{};
        ss >> t[0] >> t[1] >> t[2];
        m.elements.push_back(t);
    }
    const auto nb = section("boundary");
    for (std::size_t i = 0; i < nb; ++i) {
        std::istringstream ss(next());
        BoundaryEdge b{};
        std::string tag;
        ss >> b.a >> b.b >> tag >> b.part;
        if (tag != "Dirichlet" && tag != "Neumann") throw std::runtime_error("unknown boundary tag '" + tag + "'");
        b.tag = tag == "Dirichlet" ? BoundaryTag::dirichlet : BoundaryTag::neumann;
        m.boundary.push_back(b);
    }
    return m;
}

} // namespace polyspec

#endif // POLYSPEC_MESH_HPP
