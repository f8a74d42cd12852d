#include <jedi/env/environment.hpp>
#include <jedi/es/config.hpp>
#include <jedi/es/ranking.hpp>
#include <jedi/es/restart.hpp>
#include <jedi/es/strategy.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace jedi;
using namespace jedi::es;

namespace {

EsConfig make_config(Engine engine, int dim, int lambda = 16)
{
    EsConfig c;
    c.engine = engine;
    c.dim = dim;
    c.population = lambda;
    return c;
}

bool same_state(const EvolutionStrategy& a, const EvolutionStrategy& b)
{
    if (a.center() != b.center() || a.sigma() != b.sigma() || a.generation() != b.generation())
        return false;
    if (a.diag_cov() != b.diag_cov())
        return false;
    if (auto* la = std::get_if<LmMaState>(&a.state())) {
        auto& lb = std::get<LmMaState>(b.state());
        if (la->path_sigma != lb.path_sigma)
            return false;
        for (std::size_t j = 0; j < la->directions.size(); ++j)
            if (la->directions[j] != lb.directions[j])
                return false;
    }
    else {
        auto& sa = std::get<SepCmaState>(a.state());
        auto& sb = std::get<SepCmaState>(b.state());
        if (sa.path_sigma != sb.path_sigma || sa.path_c != sb.path_c)
            return false;
    }
    return true;
}

std::vector<double> sphere_scores(const std::vector<Genome>& pop)
{
    std::vector<double> s;
    for (const auto& g : pop)
        s.push_back(-g.squaredNorm());
    return s;
}

class EsEngines : public ::testing::TestWithParam<Engine> {};

} // namespace

TEST(Ranking, OrderTiesAndNonFinite)
{
    const std::vector<double> s = {1.0, NAN, 3.0, 1.0, -INFINITY, 2.0};
    EXPECT_EQ(rank_descending(s), (std::vector<std::size_t>{2, 5, 0, 3, 1, 4}));
}

TEST(Ranking, LogWeights)
{
    auto w = log_rank_weights(8);
    EXPECT_NEAR(w.sum(), 1.0, 1e-15);
    for (int i = 1; i < 8; ++i)
        EXPECT_GT(w[i - 1], w[i]);
    EXPECT_GT(w[7], 0.0);
}

TEST(EsConfig, DerivedSizes)
{
    EsConfig c = make_config(Engine::sep_cma, 66);
    EXPECT_EQ(c.mu(), 8);
    c.elite_ratio = 0.3;
    EXPECT_EQ(c.mu(), 5);
    EXPECT_EQ(c.memory_vectors(), static_cast<int>(std::floor(4.0 + 3.0 * std::log(66.0))));
    c.sigma_init = 0.0;
    EXPECT_THROW(c.validate(), ConfigError);
    EXPECT_THROW(parse_engine("cma"), ConfigError);
}

TEST_P(EsEngines, InitChecksDimension)
{
    EXPECT_THROW(EvolutionStrategy(make_config(GetParam(), 5), Genome::Zero(4), 1), ConfigError);
}

TEST_P(EsEngines, AskShapeAndDeterminism)
{
    EvolutionStrategy a(make_config(GetParam(), 7), Genome::Ones(7), 42);
    EvolutionStrategy b(make_config(GetParam(), 7), Genome::Ones(7), 42);
    const auto pa = a.ask();
    const auto& pb = b.ask();
    ASSERT_EQ(pa.size(), 16u);
    for (std::size_t k = 0; k < pa.size(); ++k) {
        EXPECT_EQ(pa[k].size(), 7);
        EXPECT_EQ(pa[k], pb[k]);
    }
    EXPECT_EQ(a.sigma(), 0.05);
    EXPECT_EQ(a.generation(), 0);
}

TEST_P(EsEngines, TinySigmaCollapsesOnCentre)
{
    EvolutionStrategy es(make_config(GetParam(), 4), Genome::Constant(4, 0.3), 1);
    es.set_sigma(1e-300);
    for (const auto& g : es.ask())
        EXPECT_EQ(g, Genome::Constant(4, 0.3));
}

TEST_P(EsEngines, SamplingMoments)
{
    const int n = 6;
    EvolutionStrategy es(make_config(GetParam(), n, 1000), Genome::Constant(n, 0.5), 7);
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(n), sq = Eigen::VectorXd::Zero(n);
    const int draws = 100;
    for (int i = 0; i < draws; ++i)
        for (const auto& g : es.ask()) {
            sum += g;
            sq += (g.array() - 0.5).square().matrix();
        }
    const double total = 1000.0 * draws;
    const Eigen::VectorXd mean = sum / total;
    const Eigen::VectorXd var = sq / total;
    const Eigen::VectorXd expected = 0.05 * 0.05 * es.diag_cov();
    for (int i = 0; i < n; ++i) {
        EXPECT_NEAR(mean[i], 0.5, 3.0 * 0.05 / std::sqrt(total));
        EXPECT_NEAR(var[i] / expected[i], 1.0, 0.05);
    }
}

TEST_P(EsEngines, RecombinationOfTopMu)
{
    // Scores rising with sample index: the new centre is the weighted mean of
    // the last mu samples, heaviest weight on the last one.
    EvolutionStrategy es(make_config(GetParam(), 3, 8), Genome::Zero(3), 3);
    const auto pop = es.ask();
    std::vector<double> scores(8);
    for (int k = 0; k < 8; ++k)
        scores[static_cast<std::size_t>(k)] = k;
    es.tell(scores);
    const auto w = log_rank_weights(4);
    Genome expected = Genome::Zero(3);
    for (int i = 0; i < 4; ++i)
        expected += w[i] * pop[static_cast<std::size_t>(7 - i)];
    for (int d = 0; d < 3; ++d)
        EXPECT_NEAR(es.center()[d], expected[d], 1e-15);
}

TEST_P(EsEngines, RankInvariance)
{
    EvolutionStrategy a(make_config(GetParam(), 10), Genome::Zero(10), 5);
    EvolutionStrategy b(make_config(GetParam(), 10), Genome::Zero(10), 5);
    Rng rng(8);
    std::normal_distribution<double> noise;
    for (int gen = 0; gen < 30; ++gen) {
        const auto pop = a.ask();
        b.ask();
        auto s = sphere_scores(pop);
        for (auto& v : s)
            v += 0.01 * noise(rng);
        std::vector<double> t;
        for (double v : s)
            t.push_back(2.0 * v + 7.0);
        a.tell(s);
        b.tell(t);
        ASSERT_TRUE(same_state(a, b)) << "generation " << gen;
    }
}

TEST_P(EsEngines, PositivityAndDimension)
{
    EvolutionStrategy es(make_config(GetParam(), 12), Genome::Zero(12), 9);
    Rng rng(1);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int gen = 0; gen < 200; ++gen) {
        const auto& pop = es.ask();
        for (const auto& g : pop)
            ASSERT_EQ(g.size(), 12);
        std::vector<double> s(pop.size());
        for (auto& v : s)
            v = u(rng);
        if (gen % 7 == 0)
            s[0] = NAN;
        es.tell(s);
        ASSERT_GT(es.sigma(), 0.0);
        ASSERT_GT(es.diag_cov().minCoeff(), 0.0);
        ASSERT_TRUE(es.center().allFinite());
    }
}

TEST_P(EsEngines, NonFiniteScoresRankLast)
{
    EvolutionStrategy a(make_config(GetParam(), 3, 8), Genome::Zero(3), 3);
    EvolutionStrategy b(make_config(GetParam(), 3, 8), Genome::Zero(3), 3);
    a.ask();
    b.ask();
    std::vector<double> s = {5, 4, 3, 2, 1, 0, -1, -2};
    std::vector<double> t = s;
    t[7] = NAN;
    a.tell(s);
    b.tell(t);
    EXPECT_TRUE(same_state(a, b));
}

TEST_P(EsEngines, TellProtocol)
{
    EvolutionStrategy es(make_config(GetParam(), 3, 4), Genome::Zero(3), 3);
    EXPECT_THROW(es.tell(std::vector<double>{1, 2, 3, 4}), PreconditionError);
    auto pop = es.ask();
    EXPECT_THROW(es.tell(std::vector<double>{1, 2, 3}), PreconditionError);
    ScoredPopulation wrong{pop, {1, 2, 3, 4}};
    wrong.genomes[0][0] += 1.0;
    EXPECT_THROW(es.tell(wrong), PreconditionError);
    es.tell(ScoredPopulation{pop, {1, 2, 3, 4}});
    EXPECT_EQ(es.generation(), 1);
}

TEST_P(EsEngines, DeterministicTrajectory)
{
    auto run = [&] {
        EvolutionStrategy es(make_config(GetParam(), 10), Genome::Ones(10), 77);
        for (int g = 0; g < 50; ++g)
            es.tell(sphere_scores(es.ask()));
        return es.center();
    };
    EXPECT_EQ(run(), run());
}

INSTANTIATE_TEST_SUITE_P(Both, EsEngines, ::testing::Values(Engine::sep_cma, Engine::lm_ma),
                         [](const auto& info) { return info.param == Engine::sep_cma ? "SepCma" : "LmMa"; });

TEST(EsConvergence, SepCmaSphere10D)
{
    int solved = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        Rng init = derive_rng(seed, {1});
        EvolutionStrategy es(make_config(Engine::sep_cma, 10), uniform_genome(init, 10), seed);
        double best = -INFINITY;
        for (int evals = 0; evals + 16 <= 20000; evals += 16) {
            auto s = sphere_scores(es.ask());
            for (double v : s)
                best = std::max(best, v);
            es.tell(s);
        }
        solved += best > -1e-6;
    }
    EXPECT_GE(solved, 9);
}

TEST(RestartMonitor, Window)
{
    RestartMonitor m;
    const std::vector<double> flat(16, -3.0);
    for (int g = 0; g < 19; ++g)
        EXPECT_FALSE(m.observe(flat));
    EXPECT_TRUE(m.observe(flat));

    RestartMonitor n;
    for (int g = 0; g < 19; ++g)
        n.observe(flat);
    std::vector<double> spread(16, 0.0);
    spread[0] = 1.0;
    EXPECT_FALSE(n.observe(spread));
    for (int g = 0; g < 19; ++g)
        EXPECT_FALSE(n.observe(flat));
    EXPECT_TRUE(n.observe(flat));
    n.reset();
    EXPECT_FALSE(n.should_restart());
    EXPECT_THROW(RestartMonitor(0), ConfigError);
}

TEST(RestartMonitor, ToleranceIsRelative)
{
    RestartMonitor m(2, 1e-6);
    EXPECT_FALSE(m.observe(std::vector<double>{1000.0, 1000.0 - 5e-3}));
    EXPECT_FALSE(m.observe(std::vector<double>{1000.0, 1000.0 - 5e-3}));
    RestartMonitor k(2, 1e-6);
    k.observe(std::vector<double>{1000.0, 1000.0 - 5e-4});
    EXPECT_TRUE(k.observe(std::vector<double>{1000.0, 1000.0 - 5e-4}));
}
