// Piecewise-linear finite elements for the Dirichlet and mixed Laplacian
// eigenproblems, the smallest-eigenpair solver and Richardson extrapolation.
#ifndef POLYSPEC_FEMEIG_HPP
#define POLYSPEC_FEMEIG_HPP

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "geometry.hpp"
#include "mesh.hpp"
#include "parallel.hpp"

namespace polyspec {

/// Symmetric sparse matrix. Column-compressed storage of a symmetric matrix is
/// its row-compressed storage as well.
using SparseSymmetricMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

/// Map between mesh nodes and unknowns (nodes not on a Dirichlet edge).
struct FreeNodeIndex {
    std::vector<int> of_node; ///< unknown index, or -1 for constrained nodes
    std::vector<int> node_of; ///< mesh node of each unknown

    std::size_t size() const { return node_of.size(); }

    static FreeNodeIndex from_mesh(const Mesh &m)
    {
        FreeNodeIndex idx;
        const auto fixed = m.dirichlet_nodes();
        idx.of_node.assign(m.nodes.size(), -1);
        for (std::size_t i = 0; i < m.nodes.size(); ++i) {
            if (fixed[i]) continue;
            idx.of_node[i] = static_cast<int>(idx.node_of.size());
            idx.node_of.push_back(static_cast<int>(i));
        }
        return idx;
    }
};

struct Discretization {
    SparseSymmetricMatrix stiffness;
    SparseSymmetricMatrix mass;
    FreeNodeIndex dofs;
};

/// P1 element matrices: stiffness via barycentric gradients, consistent mass.
struct ElementMatrices {
    Eigen::Matrix3d stiffness;
    Eigen::Matrix3d mass;
};

inline ElementMatrices element_matrices(const Vec2 &a, const Vec2 &b, const Vec2 &c)
{
    const double area = 0.5 * cross(b - a, c - a);
    // gradient of barycentric i is the rotated opposite edge / (2 area)
    const std::array<Vec2, 3> edge{c - b, a - c, b - a};
    ElementMatrices em;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            em.stiffness(i, j) = edge[i].dot(edge[j]) / (4.0 * area);
            em.mass(i, j) = area / 12.0 * (i == j ? 2.0 : 1.0);
        }
    return em;
}

/// Stiffness and consistent mass restricted to free nodes. Neumann edges add
/// nothing (natural condition).
inline Discretization assemble(const Mesh &m)
{
    Discretization d;
    d.dofs = FreeNodeIndex::from_mesh(m);
    const auto n = static_cast<Eigen::Index>(d.dofs.size());
    if (n == 0) throw std::invalid_argument("mesh has no free nodes");
    std::vector<Eigen::Triplet<double>> kt, mt;
    kt.reserve(9 * m.elements.size());
    mt.reserve(9 * m.elements.size());
    for (const auto &t : m.elements) {
        const auto em = element_matrices(m.nodes[t[0]], m.nodes[t[1]], m.nodes[t[2]]);
        for (int i = 0; i < 3; ++i) {
            const int gi = d.dofs.of_node[t[i]];
            if (gi < 0) continue;
            for (int j = 0; j < 3; ++j) {
                const int gj = d.dofs.of_node[t[j]];
                if (gj < 0) continue;
                kt.emplace_back(gi, gj, em.stiffness(i, j));
                mt.emplace_back(gi, gj, em.mass(i, j));
            }
        }
    }
    d.stiffness.resize(n, n);
    d.mass.resize(n, n);
    d.stiffness.setFromTriplets(kt.begin(), kt.end());
    d.mass.setFromTriplets(mt.begin(), mt.end());
    return d;
}

struct SolverOptions {
    double tol = 1e-10;       ///< relative residual
    int max_iterations = 500;
    unsigned threads = 1;     ///< concurrent per-level jobs in series solves
};

struct EigenResult {
    double value = 0.0;
    Eigen::VectorXd vector;  ///< free-node coefficients, unit M-norm, positive sum
    double residual = 0.0;   ///< ||u - value K^{-1} M u||_M
    int iterations = 0;
    bool sign_consistent = false; ///< all coefficients share one sign
};

/// Smallest generalized eigenpair of K u = lambda M u by inverse iteration
/// with zero shift. K must be positive definite (at least one Dirichlet
/// constraint per connected component).
///
/// The eigenvalue estimate is 1 / (u^T M K^{-1} M u) for ||u||_M = 1, an upper
/// bound like the Rayleigh quotient; u^T K u itself loses ~1e-9 to
/// cancellation on fine meshes. The residual is measured for the inverted
/// operator: with w = K^{-1} M u, residual = ||u - lambda w||_M.
inline EigenResult smallest_eigenpair(const SparseSymmetricMatrix &k, const SparseSymmetricMatrix &m,
                                      const SolverOptions &opt = {})
{
    if (!(opt.tol > 0.0)) throw std::invalid_argument("solver tolerance must be positive");
    Eigen::SimplicialLLT<SparseSymmetricMatrix, Eigen::Lower, Eigen::AMDOrdering<int>> llt(k);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("stiffness factorization failed; matrix is singular or indefinite (missing Dirichlet constraint?)");
    {
        // rounding can let a singular K factor; its last pivot then collapses
        const Eigen::VectorXd pivots = SparseSymmetricMatrix(llt.matrixL()).diagonal();
        const double kmax = Eigen::VectorXd(k.diagonal()).maxCoeff();
        if (!(pivots.minCoeff() * pivots.minCoeff() > 1e-12 * kmax))
            throw std::runtime_error("stiffness matrix is numerically singular (missing Dirichlet constraint?)");
    }

    auto m_norm = [&](const Eigen::VectorXd &x) { return std::sqrt(x.dot(m * x)); };
    EigenResult r;
    Eigen::VectorXd u = Eigen::VectorXd::Ones(k.rows());
    u /= m_norm(u);
    for (int it = 1; it <= opt.max_iterations; ++it) {
        const Eigen::VectorXd mu = m * u;
        const Eigen::VectorXd w = llt.solve(mu);
        const double lambda = 1.0 / mu.dot(w);
        const Eigen::VectorXd diff = u - lambda * w;
        r.residual = std::sqrt(std::max(0.0, diff.dot(m * diff)));
        r.iterations = it;
        r.value = lambda;
        if (r.residual <= opt.tol) {
            r.vector = std::move(u);
            if (r.vector.sum() < 0.0) r.vector = -r.vector;
            r.sign_consistent = r.vector.minCoeff() > 0.0;
            return r;
        }
        u = w / m_norm(w);
    }
    throw std::runtime_error("inverse iteration did not converge in " + std::to_string(opt.max_iterations) +
                             " iterations (residual " + std::to_string(r.residual) + ")");
}

/// Nodal values on the full mesh (zeros on constrained nodes).
inline Eigen::VectorXd nodal_values(const Eigen::VectorXd &free_values, const FreeNodeIndex &dofs)
{
    Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dofs.of_node.size()));
    for (std::size_t i = 0; i < dofs.size(); ++i) v[dofs.node_of[i]] = free_values[static_cast<Eigen::Index>(i)];
    return v;
}

/// Piecewise-linear function on a mesh: nodal values plus point queries.
class FemFunction {
public:
    FemFunction(const Mesh &mesh, Eigen::VectorXd nodal) : mesh_(&mesh), nodal_(std::move(nodal)), locator_(mesh) {}

    FemFunction(const Mesh &mesh, const EigenResult &eig)
        : FemFunction(mesh, nodal_values(eig.vector, FreeNodeIndex::from_mesh(mesh)))
    {
    }

    struct Sample {
        double value;
        Vec2 gradient; ///< element-constant
    };

    std::optional<Sample> try_eval(const Vec2 &p) const
    {
        const auto hit = locator_.locate(p);
        if (!hit) return std::nullopt;
        return Sample{value_in(hit->element, hit->bary), gradient(static_cast<std::size_t>(hit->element))};
    }

    Sample eval(const Vec2 &p) const
    {
        auto s = try_eval(p);
        if (!s) throw std::out_of_range("point (" + std::to_string(p.x()) + ", " + std::to_string(p.y()) + ") is outside the mesh");
        return *s;
    }

    double value_in(int e, const std::array<double, 3> &bary) const
    {
        const auto &t = mesh_->elements[static_cast<std::size_t>(e)];
        return bary[0] * nodal_[t[0]] + bary[1] * nodal_[t[1]] + bary[2] * nodal_[t[2]];
    }

    Vec2 gradient(std::size_t e) const
    {
        const auto &t = mesh_->elements[e];
        const Vec2 &a = mesh_->nodes[t[0]], &b = mesh_->nodes[t[1]], &c = mesh_->nodes[t[2]];
        const double twice_area = cross(b - a, c - a);
        const std::array<Vec2, 3> edge{c - b, a - c, b - a};
        Vec2 g = Vec2::Zero();
        for (int i = 0; i < 3; ++i) g += nodal_[t[i]] * Vec2(-edge[i].y(), edge[i].x());
        return g / twice_area;
    }

    const Mesh &mesh() const { return *mesh_; }
    const Eigen::VectorXd &nodal() const { return nodal_; }

private:
    const Mesh *mesh_;
    Eigen::VectorXd nodal_;
    PointLocator locator_;
};

/// Values and gradients of the eigenfunction at the given points; the vector
/// is already sign-normalized (positive inside the domain).
inline std::vector<FemFunction::Sample> eigenfunction_eval(const EigenResult &result, const Mesh &m, const std::vector<Vec2> &points)
{
    const FemFunction f(m, result);
    std::vector<FemFunction::Sample> out;
    out.reserve(points.size());
    for (const auto &p : points) out.push_back(f.eval(p));
    return out;
}

// ---------------------------------------------------------------------------

struct LevelRange {
    int first = 3;
    int last = 6;

    void validate() const
    {
        if (first < 0 || last < first) throw std::invalid_argument("level range must be non-empty and non-negative");
    }
    int count() const { return last - first + 1; }
};

struct LevelSolution {
    Mesh mesh;
    EigenResult eig;
};

struct LevelValue {
    int level;
    double h_max;
    double eigenvalue;
    double residual;
    int iterations;
    bool sign_consistent;
};

/// Per-level eigenvalues on nested meshes and the order-2 Richardson limit.
struct ConvergenceSeries {
    std::vector<LevelValue> levels;
    double extrapolated = 0.0;
    double error_estimate = 0.0;
    std::optional<LevelSolution> finest;

    /// log2 of successive difference ratios; needs at least three levels.
    std::optional<double> observed_order() const
    {
        const auto n = levels.size();
        if (n < 3) return std::nullopt;
        const double d1 = levels[n - 3].eigenvalue - levels[n - 2].eigenvalue;
        const double d2 = levels[n - 2].eigenvalue - levels[n - 1].eigenvalue;
        if (d1 == 0.0 || d2 == 0.0 || (d1 > 0) != (d2 > 0)) return std::nullopt;
        return std::log2(d1 / d2);
    }
};

/// lambda* = lambda_L + (lambda_L - lambda_{L-1}) / 3; the error estimate is
/// |lambda_L - lambda*|. A single level gives no estimate (infinite error).
inline void richardson(ConvergenceSeries &s)
{
    if (s.levels.empty()) throw std::invalid_argument("empty convergence series");
    const double last = s.levels.back().eigenvalue;
    if (s.levels.size() == 1) {
        s.extrapolated = last;
        s.error_estimate = std::numeric_limits<double>::infinity();
        return;
    }
    const double prev = s.levels[s.levels.size() - 2].eigenvalue;
    s.extrapolated = last + (last - prev) / 3.0;
    s.error_estimate = std::abs(last - s.extrapolated);
}

/// Solves on mesh_at(level) for every level in the range (levels run as
/// independent jobs) and extrapolates.
inline ConvergenceSeries solve_series(const std::function<Mesh(int)> &mesh_at, LevelRange levels, const SolverOptions &opt = {})
{
    levels.validate();
    auto sols = parallel_map<std::optional<LevelSolution>>(static_cast<std::size_t>(levels.count()), opt.threads, [&](std::size_t i) {
        Mesh m = mesh_at(levels.first + static_cast<int>(i));
        const auto d = assemble(m);
        auto eig = smallest_eigenpair(d.stiffness, d.mass, opt);
        return std::optional<LevelSolution>(LevelSolution{std::move(m), std::move(eig)});
    });
    ConvergenceSeries s;
    for (auto &sol : sols)
        s.levels.push_back({sol->mesh.level, sol->mesh.max_edge_length(), sol->eig.value, sol->eig.residual, sol->eig.iterations,
                            sol->eig.sign_consistent});
    s.finest = std::move(sols.back());
    richardson(s);
    return s;
}

/// Dirichlet problem on a polygon star-shaped about `apex`.
inline ConvergenceSeries solve_polygon(const Polygon &p, const Vec2 &apex, LevelRange levels, const SolverOptions &opt = {})
{
    levels.validate();
    const Mesh coarse = mesh_polygon(p, apex, 0);
    return solve_series([&](int level) { return refine(coarse, level); }, levels, opt);
}

inline ConvergenceSeries solve_polygon(const Polygon &p, LevelRange levels, const SolverOptions &opt = {})
{
    return solve_polygon(p, p.centroid(), levels, opt);
}

inline ConvergenceSeries solve_polygon(const RegularPolygonSpec &spec, LevelRange levels, const SolverOptions &opt = {})
{
    return solve_polygon(make_regular_polygon(spec), spec.center, levels, opt);
}

/// Mixed problem on T(alpha, r): Dirichlet on gamma1, Neumann elsewhere.
inline ConvergenceSeries solve_triangle(const TriangleSpec &spec, LevelRange levels, const SolverOptions &opt = {})
{
    spec.validate();
    levels.validate();
    const Mesh coarse = mesh_triangle(spec, 0);
    return solve_series([&](int level) { return refine(coarse, level); }, levels, opt);
}

} // namespace polyspec

#endif // POLYSPEC_FEMEIG_HPP
