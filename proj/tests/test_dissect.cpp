#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include <polyspec/dissect.hpp>

using namespace polyspec;

TEST(Dissection, CertificatesForSmallN)
{
    for (int n = 3; n <= 12; ++n) {
        const auto d = build_dissection(n, 1.0);
        const auto &c = d.certificates;
        EXPECT_TRUE(c.all_pass()) << n << ' ' << (c.failures.empty() ? "" : c.failures.front());
        EXPECT_LT(c.area_match, 1e-12);
        EXPECT_LT(c.cut_matching, 1e-10);
        EXPECT_TRUE(c.disjointness);
        EXPECT_GT(c.strict_area_gap, 0.0);
        EXPECT_EQ(d.assembled.size(), 3u * n);
        EXPECT_EQ(d.triangles.size(), static_cast<std::size_t>(n));
        EXPECT_EQ(d.quads.size(), static_cast<std::size_t>(n));
        EXPECT_NEAR(d.delta, 2.0 * pi / (n * (n + 1.0)), 1e-15);
        // each moved quadrilateral tip sits on a vertex of P_{N+1}
        EXPECT_EQ(c.vertex_contacts, n);
        EXPECT_GT(c.clearance_off_contacts, 0.0);
    }
}

TEST(Dissection, PiecesAreCongruentCopies)
{
    const auto d = build_dissection(5, 2.0);
    for (const auto *p : d.pieces()) {
        EXPECT_NEAR(p->moved.area(), p->original.area(), 1e-13);
        for (std::size_t i = 0; i < p->original.size(); ++i)
            EXPECT_NEAR((rotate(p->original[i], p->rotation) - p->moved[i]).norm(), 0.0, 1e-13);
    }
    // the N triangles are congruent isosceles triangles with apex at the centre
    for (const auto &t : d.triangles) {
        EXPECT_NEAR(t.original[1].norm(), t.original[2].norm(), 1e-14);
        EXPECT_NEAR(t.original.area(), d.triangles.front().original.area(), 1e-14);
    }
}

TEST(Dissection, PerturbedCutAngleFails)
{
    for (int n = 3; n <= 8; ++n) {
        EXPECT_FALSE(build_dissection(n, 1.0, 1.01).certificates.all_pass()) << n;
        EXPECT_FALSE(build_dissection(n, 1.0, 0.99).certificates.all_pass()) << n;
    }
}

TEST(Dissection, ScaleInvariance)
{
    const auto a = build_dissection(6, 1.0), b = build_dissection(6, 3.0);
    EXPECT_NEAR(b.assembled.area(), 9.0 * a.assembled.area(), 1e-12);
    EXPECT_NEAR(b.certificates.strict_area_gap, 9.0 * a.certificates.strict_area_gap, 1e-12);
}

TEST(Dissection, EigenvalueSandwichSmallN)
{
    const auto d = build_dissection(4, 1.0);
    const auto s = eigen_sandwich(d, {3, 5});
    EXPECT_TRUE(s.certified());
    EXPECT_LT(s.lambda_next.extrapolated, s.lambda_d.extrapolated);
    EXPECT_LT(s.lambda_d.extrapolated, s.lambda_n.extrapolated);
}

TEST(Dissection, TransplantPreservesIntegrals)
{
    const int n = 4;
    const auto d = build_dissection(n, 1.0);
    const auto tri = solve_triangle({pi / n, 1.0}, {5, 5});
    const auto u = unfold(*tri.finest, n);
    const auto t = transplant_energy(d, u, 4);
    EXPECT_LT(t.value_rel_diff, 1e-2);
    EXPECT_LT(t.gradient_rel_diff, 2e-2);
}

TEST(Dissection, DumpListsEveryPiece)
{
    const auto d = build_dissection(3, 1.0);
    std::ostringstream os;
    write_dissection(os, d);
    const auto s = os.str();
    for (const char *label : {"piece Q1 original", "piece Q3 moved", "piece T2 original", "assembled D"})
        EXPECT_NE(s.find(label), std::string::npos) << label;
}
