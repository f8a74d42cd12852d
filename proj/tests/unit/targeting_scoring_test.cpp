#include <jedi/archive/repertoire.hpp>
#include <jedi/gp/weighted_gp.hpp>
#include <jedi/scoring/wtfs.hpp>
#include <jedi/targeting/pareto.hpp>
#include <jedi/targeting/targets.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <set>

using namespace jedi;
using namespace jedi::targeting;
using namespace jedi::scoring;

namespace {

std::vector<std::size_t> brute_front(const std::vector<AcquisitionPoint>& pts)
{
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        bool dominated = false;
        for (std::size_t j = 0; j < pts.size() && !dominated; ++j)
            dominated = j != i && dominates(pts[j], pts[i]);
        if (!dominated)
            out.push_back(i);
    }
    return out;
}

std::vector<AcquisitionPoint> points(std::initializer_list<std::pair<double, double>> mv)
{
    std::vector<AcquisitionPoint> out;
    for (auto [m, v] : mv)
        out.push_back({out.size(), m, v});
    return out;
}

} // namespace

TEST(Pareto, SmallFronts)
{
    auto p = points({{1, 0}, {0, 1}, {0.5, 0.5}});
    EXPECT_EQ(pareto_front(p), (std::vector<std::size_t>{0, 1, 2}));
    p = points({{1, 0}, {0, 1}, {0.5, 0.5}, {0.2, 0.2}});
    EXPECT_EQ(pareto_front(p), (std::vector<std::size_t>{0, 1, 2}));
    p = points({{1, 0}, {1, 0}, {0.5, 0.5}, {1, 0.5}});
    EXPECT_EQ(pareto_front(p), (std::vector<std::size_t>{3}));
    p = points({{1, 0.5}, {0.2, 0.9}, {1, 0.5}});
    EXPECT_EQ(pareto_front(p), (std::vector<std::size_t>{0, 1, 2}));
    EXPECT_THROW(pareto_front(std::vector<AcquisitionPoint>{}), PreconditionError);
}

TEST(Pareto, MatchesBruteForce)
{
    Rng rng(12);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> coarse(0, 9);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<AcquisitionPoint> pts;
        for (std::size_t i = 0; i < 200; ++i) {
            // Half the trials use a coarse grid to force ties and duplicates.
            double m = trial % 2 ? coarse(rng) / 9.0 : u(rng);
            double v = trial % 2 ? coarse(rng) / 9.0 : u(rng);
            pts.push_back({i, m, v});
        }
        const auto front = pareto_front(pts);
        EXPECT_EQ(front, brute_front(pts));

        std::vector<AcquisitionPoint> scaled = pts;
        for (auto& p : scaled) {
            p.mean *= 3.5;
            p.variance *= 0.01;
        }
        EXPECT_EQ(pareto_front(scaled), front);
    }
}

TEST(Targets, SamplingRules)
{
    archive::Repertoire rep(archive::build_centroids(16, 0));
    std::vector<AcquisitionPoint> acq;
    for (std::size_t i = 0; i < 16; ++i)
        acq.push_back({i, 0.0, 0.0});
    // Four mutually non-dominated points; everything else is dominated.
    acq[2] = {2, 1.0, 0.1};
    acq[5] = {5, 0.8, 0.4};
    acq[9] = {9, 0.5, 0.6};
    acq[11] = {11, 0.1, 0.9};
    Rng rng(1);
    auto batch = sample_front(acq, rep, 4, rng);
    std::multiset<std::size_t> got(batch.source_indices.begin(), batch.source_indices.end());
    EXPECT_EQ(got, (std::multiset<std::size_t>{2, 5, 9, 11}));
    for (std::size_t i = 0; i < 4; ++i)
        EXPECT_EQ(batch.targets[i], rep.centroids().points[batch.source_indices[i]]);

    std::vector<AcquisitionPoint> one = acq;
    one[3] = {3, 2.0, 2.0};
    auto repeated = sample_front(one, rep, 4, rng);
    EXPECT_EQ(repeated.source_indices, (std::vector<std::size_t>(4, 3)));
}

TEST(Targets, SinglePointModelFront)
{
    archive::Repertoire rep(archive::build_centroids(1024, 0));
    std::vector<Vec2> x = {{0.3, 0.3}};
    std::vector<double> y = {-200.0};
    std::vector<std::int64_t> n = {1};
    gp::FitOptions opt;
    opt.fixed = gp::KernelParams{0.1, 1.0, 1e-2};
    auto model = gp::WeightedGp::fit(x, y, n, 0, opt);
    auto acq = acquisition_points(model, rep);
    ASSERT_EQ(acq.size(), 1024u);
    const auto oracle = brute_front(acq);
    const std::set<std::size_t> front(oracle.begin(), oracle.end());
    // Far-field centroids carry the full prior variance.
    const auto far = static_cast<std::size_t>(std::max_element(acq.begin(), acq.end(), [](const auto& a, const auto& b) {
                                                  return a.variance < b.variance;
                                              }) - acq.begin());
    EXPECT_TRUE(front.count(far));
    Rng rng(4);
    for (int draw = 0; draw < 20; ++draw) {
        auto batch = select_targets(model, rep, 4, rng);
        for (std::size_t c : batch.source_indices)
            EXPECT_TRUE(front.count(c));
    }
}

TEST(Targets, UniformSelection)
{
    archive::Repertoire one(archive::build_centroids(1, 0));
    Rng rng(3);
    auto b = select_targets_uniform(one, 5, rng);
    EXPECT_EQ(b.source_indices, (std::vector<std::size_t>(5, 0)));

    archive::Repertoire rep(archive::build_centroids(16, 0));
    std::vector<double> counts(16, 0.0);
    Rng r(99);
    for (int i = 0; i < 100000 / 4; ++i)
        for (std::size_t c : select_targets_uniform(rep, 4, r).source_indices)
            counts[c] += 1.0;
    double chi2 = 0.0;
    for (double c : counts)
        chi2 += (c - 6250.0) * (c - 6250.0) / 6250.0;
    EXPECT_LT(chi2, 37.697); // chi^2(15) at p = 0.001

    Rng a(5), c(5);
    EXPECT_EQ(select_targets_uniform(rep, 8, a).source_indices, select_targets_uniform(rep, 8, c).source_indices);
}

TEST(Targets, SelectionNames)
{
    for (auto s : {Selection::weighted_gp, Selection::standard_gp, Selection::uniform})
        EXPECT_EQ(parse_selection(to_string(s)), s);
    EXPECT_THROW(parse_selection("ucb"), ConfigError);
}

TEST(Wtfs, FitnessScores)
{
    EXPECT_EQ(fitness_scores(std::vector<double>{0, 5, 10}), (std::vector<double>{0, 0.5, 1}));
    EXPECT_EQ(fitness_scores(std::vector<double>{3, 3, 3}), (std::vector<double>{0.5, 0.5, 0.5}));
    EXPECT_EQ(fitness_scores(std::vector<double>{-300, -120}), (std::vector<double>{0, 1}));
}

TEST(Wtfs, TargetScores)
{
    std::vector<Vec2> d = {{0.5, 0.5}, {1.0, 0.5}, {0.0, 0.5}};
    EXPECT_EQ(target_scores(d, {0.5, 0.5}), (std::vector<double>{1, 0, 0}));
    std::vector<Vec2> same(4, Vec2{0.2, 0.7});
    EXPECT_EQ(target_scores(same, {0.5, 0.5}), (std::vector<double>(4, 0.5)));
    std::vector<Vec2> mix = {{0.1, 0.1}, {0.4, 0.4}, {0.9, 0.3}};
    EXPECT_EQ(target_scores(mix, {0.4, 0.4})[1], 1.0);
}

TEST(Wtfs, AlphaEndpointsAndMix)
{
    PopulationEval pop{{-300, -120, -250, -180}, {{0.1, 0.1}, {0.9, 0.9}, {0.5, 0.5}, {0.45, 0.6}}, {0.5, 0.5}};
    const auto f = fitness_scores(pop.fitnesses);
    const auto t = target_scores(pop.descriptors, pop.target);
    EXPECT_EQ(wtfs_scores(pop, 0.0), f);
    EXPECT_EQ(wtfs_scores(pop, 1.0), t);

    // s_fit = 0.2 and s_tgt = 0.8 for the middle member.
    PopulationEval two{{0, 2, 10}, {{0.0, 0.0}, {0.2, 0.0}, {1.0, 0.0}}, {0.0, 0.0}};
    EXPECT_NEAR(wtfs_scores(two, 0.5)[1], 0.5, 1e-15);
    EXPECT_THROW(wtfs_scores(pop, 1.5), PreconditionError);
}

TEST(Wtfs, Properties)
{
    Rng rng(31);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        PopulationEval pop;
        for (int i = 0; i < 16; ++i) {
            pop.fitnesses.push_back(-300.0 + 200.0 * u(rng));
            pop.descriptors.push_back({u(rng), u(rng)});
        }
        pop.target = {u(rng), u(rng)};
        const double a1 = u(rng), a2 = u(rng);
        const auto s1 = wtfs_scores(pop, a1), s2 = wtfs_scores(pop, a2);
        for (std::size_t i = 0; i < s1.size(); ++i) {
            EXPECT_GE(s1[i], 0.0);
            EXPECT_LE(s1[i], 1.0);
            EXPECT_LE(std::abs(s1[i] - s2[i]), std::abs(a1 - a2) + 1e-12);
        }

        std::vector<double> affine;
        for (double f : pop.fitnesses)
            affine.push_back(2.5 * f + 40.0);
        const auto fa = fitness_scores(affine), fb = fitness_scores(pop.fitnesses);
        for (std::size_t i = 0; i < fa.size(); ++i)
            EXPECT_NEAR(fa[i], fb[i], 1e-12);

        PopulationEval moved = pop;
        const Vec2 shift{0.3, -0.7};
        for (auto& d : moved.descriptors)
            d = d + shift;
        moved.target = moved.target + shift;
        const auto ta = target_scores(pop.descriptors, pop.target);
        const auto tb = target_scores(moved.descriptors, moved.target);
        for (std::size_t i = 0; i < ta.size(); ++i)
            EXPECT_NEAR(ta[i], tb[i], 1e-12);
    }
}

TEST(Wtfs, AlphaSchedule)
{
    WtfsConfig lin;
    EXPECT_EQ(alpha_at(lin, 0, 10), 0.8);
    EXPECT_EQ(alpha_at(lin, 9, 10), 0.0);
    EXPECT_NEAR(alpha_at(lin, 4, 9), 0.4, 1e-15);
    EXPECT_EQ(alpha_at(lin, 0, 1), 0.8);
    WtfsConfig c;
    c.schedule = AlphaSchedule::constant;
    c.alpha = 0.3;
    EXPECT_EQ(alpha_at(c, 5, 10), 0.3);
    EXPECT_THROW(alpha_at(lin, 10, 10), PreconditionError);
    c.alpha = 1.2;
    EXPECT_THROW(c.validate(), ConfigError);
    EXPECT_THROW(parse_schedule("cosine"), ConfigError);
}

TEST(Wtfs, LinearScheduleStaysInRange)
{
    WtfsConfig lin;
    for (long total = 1; total < 200; ++total)
        for (long l = 0; l < total; ++l) {
            const double a = alpha_at(lin, l, total);
            ASSERT_GE(a, 0.0);
            ASSERT_LE(a, 0.8);
        }
    EXPECT_EQ(alpha_at(lin, 3, 4), 0.0);
}
