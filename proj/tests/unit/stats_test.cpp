#include <jedi/stats/stats.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace jedi;
using namespace jedi::stats;

namespace {

double binomial(int n, int k)
{
    double r = 1.0;
    for (int i = 1; i <= k; ++i)
        r = r * (n - k + i) / i;
    return r;
}

// Independent normal approximation: U with continuity correction, no ties.
double normal_p(double u, double n1, double n2)
{
    const double mu = n1 * n2 / 2.0;
    const double sd = std::sqrt(n1 * n2 * (n1 + n2 + 1.0) / 12.0);
    const double z = std::max(0.0, std::abs(u - mu) - 0.5) / sd;
    return std::erfc(z / std::sqrt(2.0));
}

} // namespace

TEST(Median, Examples)
{
    EXPECT_EQ(median(std::vector<double>{1, 2, 3}), 2.0);
    EXPECT_EQ(median(std::vector<double>{1, 2, 3, 4}), 2.5);
    EXPECT_EQ(median(std::vector<double>{-300, -120}), -210.0);
    EXPECT_THROW(median(std::vector<double>{}), PreconditionError);
}

TEST(Median, PermutationAndMonotone)
{
    Rng rng(2);
    std::uniform_real_distribution<double> u(-300.0, -100.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> v(1 + trial % 11);
        for (auto& x : v)
            x = u(rng);
        const double m = median(v);
        auto w = v;
        std::shuffle(w.begin(), w.end(), rng);
        EXPECT_EQ(median(w), m);
        w[0] += 50.0;
        EXPECT_GE(median(w), m);
    }
}

TEST(MannWhitney, SeparatedTriples)
{
    auto r = mann_whitney_u(std::vector<double>{1, 2, 3}, std::vector<double>{4, 5, 6});
    EXPECT_EQ(r.u_statistic, 0.0);
    EXPECT_EQ(r.method, UMethod::exact);
    EXPECT_NEAR(r.p_value, 0.1, 1e-15);
}

TEST(MannWhitney, IdenticalSamples)
{
    auto r = mann_whitney_u(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 3});
    EXPECT_EQ(r.u_statistic, 4.5);
    EXPECT_EQ(r.p_value, 1.0);
}

TEST(MannWhitney, SeparatedTens)
{
    std::vector<double> a, b;
    for (int i = 0; i < 10; ++i) {
        a.push_back(-300.0 + i);
        b.push_back(-150.0 + i);
    }
    auto r = mann_whitney_u(a, b);
    EXPECT_EQ(r.method, UMethod::exact);
    EXPECT_NEAR(r.p_value, 2.0 / 184756.0, 1e-18);
}

TEST(MannWhitney, SymmetryAndLattice)
{
    Rng rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const int n1 = 1 + trial % 9, n2 = 1 + (trial * 7) % 11;
        std::vector<double> a(static_cast<std::size_t>(n1)), b(static_cast<std::size_t>(n2));
        for (auto& x : a)
            x = u(rng);
        for (auto& x : b)
            x = u(rng) + 0.1;
        auto ab = mann_whitney_u(a, b), ba = mann_whitney_u(b, a);
        EXPECT_EQ(ab.u_statistic + ba.u_statistic, n1 * n2);
        EXPECT_NEAR(ab.p_value, ba.p_value, 1e-12);
        EXPECT_GE(ab.u_statistic, 0.0);
        EXPECT_LE(ab.u_statistic, n1 * n2);
        EXPECT_GE(ab.p_value, 0.0);
        EXPECT_LE(ab.p_value, 1.0);
        ASSERT_EQ(ab.method, UMethod::exact);
        const double k = ab.p_value * binomial(n1 + n2, n1);
        EXPECT_NEAR(k, std::round(k), 1e-6);
    }
}

TEST(MannWhitney, ExactAgreesWithNormal)
{
    Rng rng(41);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> a(10), b(10);
        for (auto& x : a)
            x = g(rng);
        for (auto& x : b)
            x = g(rng) + 0.5 * (trial % 3);
        auto r = mann_whitney_u(a, b);
        ASSERT_EQ(r.method, UMethod::exact);
        EXPECT_NEAR(r.p_value, normal_p(r.u_statistic, 10, 10), 0.02);
    }
}

TEST(MannWhitney, TiesUseNormalApproximation)
{
    std::vector<double> a = {-250, -250, -130, -128}, b = {-250, -300, -301, -290};
    auto r = mann_whitney_u(a, b);
    EXPECT_EQ(r.method, UMethod::normal_approximation);
    // Midranks: -301 1, -300 2, -290 3, -250 x3 -> 5, -130 7, -128 8.
    EXPECT_EQ(r.u_statistic, 5 + 5 + 7 + 8 - 10);
    EXPECT_GT(r.p_value, 0.0);
    EXPECT_LT(r.p_value, 1.0);
    auto all_tied = mann_whitney_u(std::vector<double>{1, 1}, std::vector<double>{1, 1, 1});
    EXPECT_EQ(all_tied.p_value, 1.0);
}

TEST(Convergence, SingleRunIsItsStepFunction)
{
    Trace t{{10, 20, 40}, {-300, -200, -150}};
    std::vector<Trace> runs = {t};
    std::vector<std::int64_t> grid = {5, 10, 15, 20, 39, 40, 100};
    auto table = convergence_table(runs, grid);
    ASSERT_EQ(table.size(), grid.size());
    EXPECT_FALSE(table[0].median);
    EXPECT_EQ(table[0].runs, 0u);
    const double want[] = {0, -300, -300, -200, -200, -150, -150};
    for (std::size_t i = 1; i < grid.size(); ++i) {
        EXPECT_EQ(*table[i].median, want[i]);
        EXPECT_EQ(*table[i].stddev, 0.0);
    }
}

TEST(Convergence, TwoConstantRuns)
{
    std::vector<Trace> runs = {{{1}, {0.0}}, {{3}, {10.0}}};
    std::vector<std::int64_t> grid = {3, 50, 1000};
    for (const auto& row : convergence_table(runs, grid))
        EXPECT_EQ(*row.median, 5.0);
}

TEST(Convergence, ThreeStaircases)
{
    std::vector<Trace> runs = {
        {{10, 20, 30}, {-300, -200, -100}},
        {{15, 25}, {-280, -150}},
        {{5, 40}, {-250, -50}},
    };
    std::vector<std::int64_t> grid = {0, 10, 20, 30, 40};
    auto t = convergence_table(runs, grid);
    EXPECT_FALSE(t[0].median);
    EXPECT_EQ(t[1].runs, 2u);
    EXPECT_EQ(*t[1].median, -275.0);
    EXPECT_NEAR(*t[1].stddev, 25.0, 1e-12);
    EXPECT_EQ(*t[2].median, -250.0);
    EXPECT_NEAR(*t[2].stddev, 32.99831645537222, 1e-9);
    EXPECT_EQ(*t[3].median, -150.0);
    EXPECT_NEAR(*t[3].stddev, 62.36095644623236, 1e-9);
    EXPECT_EQ(*t[4].median, -100.0);
    EXPECT_NEAR(*t[4].stddev, 40.824829046386306, 1e-9);
}
