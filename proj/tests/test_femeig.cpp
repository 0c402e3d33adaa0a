#include <cmath>

#include <gtest/gtest.h>

#include <polyspec/femeig.hpp>

using namespace polyspec;

TEST(ElementMatrices, UnitRightTriangleByHand)
{
    const auto e = element_matrices(Vec2(0, 0), Vec2(1, 0), Vec2(0, 1));
    Eigen::Matrix3d k;
    k << 1.0, -0.5, -0.5, -0.5, 0.5, 0.0, -0.5, 0.0, 0.5;
    Eigen::Matrix3d m;
    m << 2, 1, 1, 1, 2, 1, 1, 1, 2;
    m *= 0.5 / 12.0;
    EXPECT_NEAR((e.stiffness - k).norm(), 0.0, 1e-15);
    EXPECT_NEAR((e.mass - m).norm(), 0.0, 1e-15);
}

TEST(ElementMatrices, InvariantsOnArbitraryTriangle)
{
    const Vec2 a(0.3, -0.2), b(1.7, 0.4), c(0.1, 1.1);
    const auto e = element_matrices(a, b, c);
    const double area = 0.5 * cross(b - a, c - a);
    EXPECT_NEAR(e.stiffness.rowwise().sum().norm(), 0.0, 1e-14); // constants in the kernel
    EXPECT_NEAR(e.mass.sum(), area, 1e-15);
    // linear function x: energy = area
    const Eigen::Vector3d x(a.x(), b.x(), c.x());
    EXPECT_NEAR(x.dot(e.stiffness * x), area, 1e-14);
    // rigid motion invariance
    const auto r = element_matrices(rotate(a, 0.7) + Vec2(3, 1), rotate(b, 0.7) + Vec2(3, 1), rotate(c, 0.7) + Vec2(3, 1));
    EXPECT_NEAR((r.stiffness - e.stiffness).norm(), 0.0, 1e-13);
}

TEST(Assembly, MassIntegratesConstantsOnFreeNodes)
{
    const Mesh m = mesh_triangle({0.6, 1.0}, 3);
    const auto d = assemble(m);
    EXPECT_EQ(d.dofs.size() + 9, m.nodes.size()); // 2^3 + 1 Dirichlet nodes
    EXPECT_LT((Eigen::MatrixXd(d.stiffness) - Eigen::MatrixXd(d.stiffness).transpose()).norm(), 1e-14);
    EXPECT_LT((Eigen::MatrixXd(d.mass) - Eigen::MatrixXd(d.mass).transpose()).norm(), 1e-14);
    Mesh neumann_only = m;
    for (auto &e : neumann_only.boundary) e.tag = BoundaryTag::neumann;
    const auto dn = assemble(neumann_only);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(dn.mass.rows());
    EXPECT_NEAR(ones.dot(dn.mass * ones), m.area(), 1e-14);
    EXPECT_NEAR((dn.stiffness * ones).norm(), 0.0, 1e-12);
    EXPECT_THROW(smallest_eigenpair(dn.stiffness, dn.mass), std::runtime_error);
}

TEST(Solver, RejectsBadInput)
{
    const auto d = assemble(mesh_triangle({0.6, 1.0}, 2));
    SolverOptions opt;
    opt.tol = 0.0;
    EXPECT_THROW(smallest_eigenpair(d.stiffness, d.mass, opt), std::invalid_argument);
    opt.tol = 1e-14;
    opt.max_iterations = 2;
    EXPECT_THROW(smallest_eigenpair(d.stiffness, d.mass, opt), std::runtime_error);
}

TEST(Solver, EigenpairProperties)
{
    const Mesh m = mesh_polygon(make_regular_polygon({4, 1.0}), Vec2::Zero(), 4);
    const auto d = assemble(m);
    const auto r = smallest_eigenpair(d.stiffness, d.mass);
    EXPECT_LE(r.residual, 1e-10);
    EXPECT_TRUE(r.sign_consistent);
    EXPECT_NEAR(r.vector.dot(d.mass * r.vector), 1.0, 1e-12);
    EXPECT_NEAR(r.vector.dot(d.stiffness * r.vector), r.value, 1e-7 * r.value);
    const Eigen::VectorXd res = d.stiffness * r.vector - r.value * (d.mass * r.vector);
    EXPECT_LT(res.norm(), 1e-6);
    // conforming discretization: upper bound for pi^2
    EXPECT_GT(r.value, pi * pi);
}

TEST(Series, SquareMatchesPiSquared)
{
    const auto s = solve_polygon(RegularPolygonSpec{4, 1.0}, {3, 6});
    EXPECT_NEAR(s.extrapolated, pi * pi, 1e-4 * pi * pi);
    EXPECT_LT(std::abs(s.extrapolated - pi * pi), 3 * s.error_estimate + 1e-6);
    for (std::size_t i = 1; i < s.levels.size(); ++i) EXPECT_LT(s.levels[i].eigenvalue, s.levels[i - 1].eigenvalue);
    ASSERT_TRUE(s.observed_order().has_value());
    EXPECT_NEAR(*s.observed_order(), 2.0, 0.1);
}

TEST(Series, EquilateralTriangle)
{
    const auto s = solve_polygon(RegularPolygonSpec{3, 1.0}, {3, 6});
    EXPECT_NEAR(s.extrapolated, 16.0 * pi * pi / 9.0, 1e-4 * 16.0 * pi * pi / 9.0);
}

TEST(Series, ScalingIsExactAtEveryLevel)
{
    const Mesh base = mesh_triangle({0.5, 1.0}, 4);
    const auto d1 = assemble(base);
    const auto d2 = assemble(scaled(base, 2.0));
    const double l1 = smallest_eigenpair(d1.stiffness, d1.mass).value;
    const double l2 = smallest_eigenpair(d2.stiffness, d2.mass).value;
    EXPECT_NEAR(l2, l1 / 4.0, 1e-10 * l1);
}

TEST(Series, RichardsonOnSyntheticSequence)
{
    ConvergenceSeries s;
    for (int l = 3; l <= 5; ++l) s.levels.push_back({l, 0.0, 5.0 + 2.0 * std::pow(4.0, -l), 0.0, 1, true});
    richardson(s);
    EXPECT_NEAR(s.extrapolated, 5.0, 1e-14);
    EXPECT_NEAR(s.error_estimate, 2.0 * std::pow(4.0, -5), 1e-15);
    EXPECT_NEAR(*s.observed_order(), 2.0, 1e-12);
    ConvergenceSeries one;
    one.levels.push_back({3, 0.0, 1.0, 0.0, 1, true});
    richardson(one);
    EXPECT_TRUE(std::isinf(one.error_estimate));
}

TEST(Series, ThreadCountDoesNotChangeResults)
{
    SolverOptions a, b;
    a.threads = 1;
    b.threads = 3;
    const auto s1 = solve_triangle({0.4, 1.0}, {2, 5}, a);
    const auto s2 = solve_triangle({0.4, 1.0}, {2, 5}, b);
    EXPECT_EQ(s1.extrapolated, s2.extrapolated);
    EXPECT_EQ(s1.error_estimate, s2.error_estimate);
}

TEST(FemFunction, InterpolatesNodalValuesAndGradients)
{
    const Mesh m = mesh_triangle({0.6, 1.0}, 2);
    Eigen::VectorXd nodal(static_cast<Eigen::Index>(m.nodes.size()));
    for (std::size_t i = 0; i < m.nodes.size(); ++i) nodal[static_cast<Eigen::Index>(i)] = 2.0 * m.nodes[i].x() - 3.0 * m.nodes[i].y() + 1.0;
    const FemFunction f(m, nodal);
    const auto s = f.eval(Vec2(0.4, 0.1));
    EXPECT_NEAR(s.value, 2.0 * 0.4 - 0.3 + 1.0, 1e-13);
    EXPECT_NEAR((s.gradient - Vec2(2.0, -3.0)).norm(), 0.0, 1e-12);
    EXPECT_FALSE(f.try_eval(Vec2(2.0, 2.0)).has_value());
    EXPECT_THROW(f.eval(Vec2(2.0, 2.0)), std::out_of_range);
}

TEST(LevelRange, Validation)
{
    EXPECT_THROW((LevelRange{4, 3}).validate(), std::invalid_argument);
    EXPECT_THROW((LevelRange{-1, 3}).validate(), std::invalid_argument);
    EXPECT_EQ((LevelRange{3, 6}).count(), 4);
}
