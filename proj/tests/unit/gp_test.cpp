#include <jedi/gp/weighted_gp.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace jedi;
using namespace jedi::gp;

namespace {

struct Data {
    std::vector<Vec2> x;
    std::vector<double> y;
    std::vector<std::int64_t> n;
};

Data smooth_data(int count, std::uint64_t seed)
{
    Rng rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Data d;
    for (int i = 0; i < count; ++i) {
        Vec2 p{u(rng), u(rng)};
        d.x.push_back(p);
        d.y.push_back(std::sin(3.0 * p.x) + std::cos(2.0 * p.y) * 0.5 - 100.0);
        d.n.push_back(1);
    }
    return d;
}

FitOptions fixed(double l, double s2, double noise)
{
    FitOptions o;
    o.fixed = KernelParams{l, s2, noise};
    return o;
}

} // namespace

TEST(Kernel, Values)
{
    KernelParams p{0.3, 2.5, 1e-2};
    EXPECT_EQ(rbf_kernel({0.2, 0.7}, {0.2, 0.7}, p), 2.5);
    KernelParams q{0.1, 1.0, 1e-2};
    EXPECT_NEAR(rbf_kernel({0.0, 0.0}, {0.1 * std::sqrt(2.0), 0.0}, q), std::exp(-1.0), 1e-15);
    Rng rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        Vec2 a{u(rng), u(rng)}, b{u(rng), u(rng)};
        EXPECT_EQ(rbf_kernel(a, b, p), rbf_kernel(b, a, p));
    }
}

TEST(WeightedGp, Preconditions)
{
    std::vector<Vec2> x;
    std::vector<double> y;
    std::vector<std::int64_t> n;
    EXPECT_THROW(WeightedGp::fit(x, y, n, 0), PreconditionError);
    x = {{0.1, 0.1}};
    y = {1.0};
    n = {0};
    EXPECT_THROW(WeightedGp::fit(x, y, n, 0), PreconditionError);
    n = {1, 1};
    EXPECT_THROW(WeightedGp::fit(x, y, n, 0), PreconditionError);
}

TEST(WeightedGp, SinglePoint)
{
    std::vector<Vec2> x = {{0.3, 0.6}};
    std::vector<double> y = {-142.0};
    std::vector<std::int64_t> n = {4};
    auto gp = WeightedGp::fit(x, y, n, 0, fixed(0.1, 1.0, noise_floor));
    EXPECT_NEAR(gp.predict({0.3, 0.6}).mean, -142.0, 1e-6);
}

TEST(WeightedGp, ConstantTargetsAreDegenerate)
{
    std::vector<Vec2> x = {{0.1, 0.1}, {0.5, 0.5}, {0.9, 0.2}};
    std::vector<double> y = {-250.0, -250.0, -250.0};
    std::vector<std::int64_t> n = {1, 2, 3};
    auto gp = WeightedGp::fit(x, y, n, 0);
    EXPECT_TRUE(gp.degenerate());
    for (Vec2 q : {Vec2{0.0, 0.0}, Vec2{0.5, 0.5}, Vec2{0.7, 0.9}}) {
        auto p = gp.predict(q);
        EXPECT_EQ(p.mean, -250.0);
        EXPECT_EQ(p.standardized_mean, 0.0);
    }
}

TEST(WeightedGp, FitBeatsRandomParameters)
{
    auto d = smooth_data(20, 3);
    auto gp = WeightedGp::fit(d.x, d.y, d.n, 11);
    const auto& p = gp.params();
    EXPECT_GE(p.lengthscale, 0.01);
    EXPECT_LE(p.lengthscale, 2.0);
    EXPECT_GE(p.signal_variance, 0.01);
    EXPECT_LE(p.signal_variance, 100.0);
    EXPECT_GE(p.noise, noise_floor);
    EXPECT_LE(p.noise, 10.0);

    Rng rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto log_uniform = [&](double lo, double hi) { return std::exp(std::log(lo) + u(rng) * (std::log(hi) - std::log(lo))); };
    for (int i = 0; i < 20; ++i) {
        KernelParams r{log_uniform(0.01, 2.0), log_uniform(0.01, 100.0), log_uniform(noise_floor, 10.0)};
        EXPECT_GE(gp.log_marginal_likelihood(),
                  weighted_log_marginal_likelihood(d.x, gp.standardized_targets(), gp.inverse_counts(), r));
    }
}

TEST(WeightedGp, FarFieldIsPrior)
{
    auto d = smooth_data(10, 4);
    for (auto& p : d.x)
        p = 0.1 * p;
    auto gp = WeightedGp::fit(d.x, d.y, d.n, 0, fixed(0.02, 1.7, 1e-3));
    auto p = gp.predict({1.0, 1.0});
    EXPECT_NEAR(p.standardized_mean, 0.0, 1e-12);
    EXPECT_NEAR(p.variance, 1.7, 1e-12);
    EXPECT_NEAR(p.mean, gp.target_mean(), 1e-9);
}

TEST(WeightedGp, NoiselessInterpolation)
{
    std::vector<Vec2> x;
    std::vector<double> y;
    std::vector<std::int64_t> n;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            x.push_back({0.1 + 0.25 * i, 0.1 + 0.25 * j});
            y.push_back(-200.0 + 10.0 * i - 3.0 * j * j);
            n.push_back(1);
        }
    auto gp = WeightedGp::fit(x, y, n, 0, fixed(0.1, 1.0, noise_floor));
    for (std::size_t i = 0; i < x.size(); ++i)
        EXPECT_NEAR(gp.predict(x[i]).mean, y[i], 1e-6);
}

TEST(WeightedGp, CountsEqualDuplication)
{
    Rng rng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> c(1, 4);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<Vec2> x, xd;
        std::vector<double> y, yd;
        std::vector<std::int64_t> n, nd;
        for (int i = 0; i < 12; ++i) {
            Vec2 p{u(rng), u(rng)};
            const double f = -300.0 + 100.0 * u(rng);
            const int k = trial == 0 ? (i == 0 ? 3 : 1) : c(rng);
            x.push_back(p);
            y.push_back(f);
            n.push_back(k);
            for (int r = 0; r < k; ++r) {
                xd.push_back(p);
                yd.push_back(f);
                nd.push_back(1);
            }
        }
        const auto opt = fixed(0.3, 1.2, 0.05);
        auto a = WeightedGp::fit(x, y, n, 0, opt);
        auto b = WeightedGp::fit(xd, yd, nd, 0, opt);
        for (int q = 0; q < 50; ++q) {
            Vec2 p{u(rng), u(rng)};
            auto pa = a.predict(p), pb = b.predict(p);
            EXPECT_NEAR(pa.mean, pb.mean, 1e-8);
            EXPECT_NEAR(pa.standardized_mean, pb.standardized_mean, 1e-8);
            EXPECT_NEAR(pa.variance, pb.variance, 1e-8);
        }
    }
}

TEST(WeightedGp, BatchMatchesSingles)
{
    auto d = smooth_data(30, 6);
    auto gp = WeightedGp::fit(d.x, d.y, d.n, 2);
    Rng rng(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Vec2> q;
    for (int i = 0; i < 100; ++i)
        q.push_back({u(rng), u(rng)});
    auto batch = gp.predict_batch(q);
    ASSERT_EQ(batch.size(), 100u);
    for (std::size_t i = 0; i < q.size(); ++i) {
        auto s = gp.predict(q[i]);
        EXPECT_NEAR(batch[i].standardized_mean, s.standardized_mean, 1e-10);
        EXPECT_NEAR(batch[i].mean, s.mean, 1e-9);
        EXPECT_NEAR(batch[i].variance, s.variance, 1e-10);
    }
    std::vector<Vec2> many(1024, Vec2{0.5, 0.5});
    EXPECT_EQ(gp.predict_batch(many).size(), 1024u);
}

TEST(WeightedGp, VarianceBoundsAndMonotoneInCounts)
{
    Rng rng(23);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        auto d = smooth_data(15, 100 + static_cast<std::uint64_t>(trial));
        const auto opt = fixed(0.05 + 0.3 * u(rng), 0.5 + u(rng), 1e-3 + 0.2 * u(rng));
        auto before = WeightedGp::fit(d.x, d.y, d.n, 0, opt);
        for (int q = 0; q < 50; ++q) {
            auto p = before.predict({u(rng), u(rng)});
            EXPECT_GE(p.variance, 0.0);
            EXPECT_LE(p.variance, opt.fixed->signal_variance + 1e-9);
            EXPECT_TRUE(std::isfinite(p.mean));
        }
        const std::size_t i = static_cast<std::size_t>(trial) % d.x.size();
        double last = before.predict(d.x[i]).variance;
        for (std::int64_t k : {2, 5, 50}) {
            d.n[i] = k;
            auto after = WeightedGp::fit(d.x, d.y, d.n, 0, opt);
            const double v = after.predict(d.x[i]).variance;
            EXPECT_LE(v, last + 1e-12);
            last = v;
        }
    }
}

TEST(WeightedGp, PermutationInvariant)
{
    auto d = smooth_data(25, 8);
    for (std::size_t i = 0; i < d.n.size(); ++i)
        d.n[i] = 1 + static_cast<std::int64_t>(i % 3);
    const auto opt = fixed(0.2, 1.0, 0.01);
    auto a = WeightedGp::fit(d.x, d.y, d.n, 0, opt);
    Data r = d;
    std::reverse(r.x.begin(), r.x.end());
    std::reverse(r.y.begin(), r.y.end());
    std::reverse(r.n.begin(), r.n.end());
    auto b = WeightedGp::fit(r.x, r.y, r.n, 0, opt);
    Rng rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int q = 0; q < 50; ++q) {
        Vec2 p{u(rng), u(rng)};
        EXPECT_NEAR(a.predict(p).mean, b.predict(p).mean, 1e-9);
        EXPECT_NEAR(a.predict(p).variance, b.predict(p).variance, 1e-9);
    }
}

TEST(WeightedGp, FitIsDeterministic)
{
    auto d = smooth_data(200, 9);
    auto a = WeightedGp::fit(d.x, d.y, d.n, 4);
    auto b = WeightedGp::fit(d.x, d.y, d.n, 4);
    EXPECT_EQ(a.params().lengthscale, b.params().lengthscale);
    EXPECT_EQ(a.params().noise, b.params().noise);
    EXPECT_EQ(a.predict({0.4, 0.4}).mean, b.predict({0.4, 0.4}).mean);
}

TEST(WeightedGp, DuplicateInputsFactorize)
{
    std::vector<Vec2> x(40, Vec2{0.5, 0.5});
    std::vector<double> y(40);
    for (std::size_t i = 0; i < y.size(); ++i)
        y[i] = static_cast<double>(i);
    std::vector<std::int64_t> n(40, 1);
    auto gp = WeightedGp::fit(x, y, n, 0, fixed(0.1, 1.0, noise_floor));
    EXPECT_TRUE(std::isfinite(gp.predict({0.5, 0.5}).mean));
}
