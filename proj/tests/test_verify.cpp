#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include <polyspec/verify.hpp>

using namespace polyspec;

TEST(Suite, SmallRangeAllCertified)
{
    const auto s = run_suite(3, 6, {3, 6}, 1e-10, 2);
    ASSERT_EQ(s.rows.size(), 4u);
    EXPECT_TRUE(s.summary.theorems_certified);
    EXPECT_EQ(s.summary.missing, 0);
    EXPECT_NEAR(s.rows[0].area_lambda, 4.0 * pi * pi / std::sqrt(3.0), 2e-3);
    EXPECT_NEAR(s.rows[1].area_lambda, 2.0 * pi * pi, 2e-3);
    for (const auto &r : s.rows) {
        ASSERT_TRUE(r.flags.has_value());
        EXPECT_GT(r.ratio, 1.0);
        ASSERT_TRUE(r.reduction_gap.has_value());
        EXPECT_LT(*r.reduction_gap, reduction_tolerance);
    }
    EXPECT_THROW(run_suite(3, 3, {3, 4}), std::invalid_argument);
    EXPECT_THROW(run_suite(2, 5, {3, 4}), std::invalid_argument);
}

TEST(Suite, CsvFormat)
{
    const auto s = run_suite(3, 4, {3, 5}, 1e-10, 1);
    std::ostringstream os;
    write_suite_csv(os, s);
    std::istringstream in(os.str());
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "N,lambda,err,area,area_lambda,ratio,t1,t2,t3,c1,c2,af1,af2");
    std::getline(in, line);
    EXPECT_EQ(line.rfind("3,17.54", 0), 0u) << line;
    EXPECT_NE(line.find(",1.29903810568,"), std::string::npos) << line; // 12 significant digits
    int rows = 1;
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, 2);
    std::ostringstream md;
    write_suite_markdown(md, s);
    EXPECT_NE(md.str().find("conjecture check (numerical only)"), std::string::npos);
}

TEST(Suite, DeterministicAcrossThreadCounts)
{
    std::ostringstream a, b;
    write_suite_csv(a, run_suite(3, 7, {3, 5}, 1e-10, 1));
    write_suite_csv(b, run_suite(3, 7, {3, 5}, 1e-10, 4));
    EXPECT_EQ(a.str(), b.str());
}

TEST(Telescope, PartialFractionIdentity)
{
    const auto t = telescope_faber_krahn(4, 20, {3, 6});
    EXPECT_NEAR(t.partial_sum, 2.0 * pi * j0_sq / 5.0, 1e-9);
    EXPECT_NEAR(t.partial_sum, 7.2674, 1e-4);
    EXPECT_LT(t.identity_error, 1e-12);
    EXPECT_TRUE(t.telescoped.certified);
    EXPECT_NEAR(t.fk_gap, 2.0 * pi * pi - pi * j0_sq, 1e-3);
    EXPECT_TRUE(t.fk_ok);
    EXPECT_THROW(telescope_faber_krahn(4, 4, {3, 4}), std::invalid_argument);
}

TEST(Suite, ScaleSpotCheck)
{
    const auto a = regular_polygon_eigenvalue(7, 1.0, {3, 5});
    const auto b = regular_polygon_eigenvalue(7, 2.0, {3, 5});
    EXPECT_NEAR(b.extrapolated, a.extrapolated / 4.0, 1e-10 * a.extrapolated);
}
