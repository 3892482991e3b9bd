#include "cdma/metrics.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace cdma;

namespace {

std::vector<RateAllocation> uniform_alloc(std::size_t M, double rate, double eps)
{
    std::vector<RateAllocation> v(M);
    for (std::size_t i = 0; i < M; ++i) {
        v[i].mobile = i;
        v[i].served = true;
        v[i].sector = 0;
        v[i].rate = rate;
        v[i].epsilon = eps;
        v[i].beta = rate_to_threshold(rate);
        v[i].throughput = rate * (1 - eps);
    }
    return v;
}

} // namespace

TEST(TrialMetrics, FullLoadNoOutage)
{
    const auto s = trial_metrics(uniform_alloc(400, 2.0, 0.0), 400, 2.0);
    EXPECT_DOUBLE_EQ(s.mean_throughput, 2.0);
    EXPECT_NEAR(transmission_density(400, 2.0), 31.83, 0.01);
    EXPECT_NEAR(s.area_spectral_efficiency, 63.66, 0.01);
    EXPECT_EQ(s.area_spectral_efficiency, transmission_density(400, 2.0) * s.mean_throughput);
    EXPECT_EQ(s.denied_count, 0u);
}

TEST(TrialMetrics, AllDenied)
{
    std::vector<RateAllocation> v(5);
    const auto s = trial_metrics(v, 5, 2.0);
    EXPECT_EQ(s.mean_throughput, 0.0);
    EXPECT_EQ(s.area_spectral_efficiency, 0.0);
    EXPECT_EQ(s.mean_outage, 0.0);
    EXPECT_EQ(s.denial_fraction(), 1.0);
}

TEST(TrialMetrics, SingleUplink)
{
    const auto s = trial_metrics(uniform_alloc(1, 1.0, 0.1), 1, 2.0);
    EXPECT_DOUBLE_EQ(s.mean_throughput, 0.9);
    EXPECT_DOUBLE_EQ(s.mean_outage, 0.1);
    EXPECT_DOUBLE_EQ(s.max_outage, 0.1);
}

TEST(TrialMetrics, DeniedExcludedFromOutageButCountInThroughput)
{
    auto v = uniform_alloc(4, 1.0, 0.2);
    v[3] = RateAllocation{};
    v[3].mobile = 3;
    const auto s = trial_metrics(v, 4, 1.0);
    EXPECT_DOUBLE_EQ(s.mean_outage, 0.2);
    EXPECT_DOUBLE_EQ(s.mean_throughput, 3 * 0.8 / 4);
    EXPECT_EQ(s.denied_count, 1u);
    EXPECT_THROW(trial_metrics(v, 5, 1.0), std::invalid_argument);
}

TEST(TrialMetrics, ThroughputNonIncreasingInAnyOutage)
{
    auto v = uniform_alloc(10, 1.5, 0.2);
    const double base = trial_metrics(v, 10, 2.0).mean_throughput;
    v[4].epsilon = 0.5;
    EXPECT_LE(trial_metrics(v, 10, 2.0).mean_throughput, base);
}

TEST(Ccdf, Examples)
{
    const std::vector<double> s{0.1, 0.2};
    const std::vector<double> g{0.0, 0.15, 0.2};
    const auto c = ccdf(s, g);
    EXPECT_EQ(c[0], 1.0);
    EXPECT_EQ(c[1], 0.5);
    EXPECT_EQ(c[2], 0.0);
    EXPECT_THROW(ccdf({}, g), std::invalid_argument);
}

TEST(Ccdf, AccumulatorMatchesBatchAndIsMonotone)
{
    std::vector<double> samples;
    for (int k = 0; k < 1000; ++k)
        samples.push_back(std::fmod(k * 0.6180339887, 1.0));
    samples.push_back(0.5);
    const auto grid = uniform_grid(0.0, 1.0, 0.01);
    CcdfAccumulator acc(grid);
    for (double x : samples)
        acc.add(x);
    const auto batch = ccdf(samples, grid);
    const auto inc = acc.curve();
    ASSERT_EQ(inc.size(), batch.size());
    for (std::size_t k = 0; k < inc.size(); ++k) {
        EXPECT_EQ(inc[k], batch[k]);
        EXPECT_GE(inc[k], 0.0);
        EXPECT_LE(inc[k], 1.0);
        if (k) {
            EXPECT_LE(inc[k], inc[k - 1]);
        }
    }
    EXPECT_EQ(acc.count(), samples.size());
    EXPECT_THROW(CcdfAccumulator({1.0, 0.0}), std::invalid_argument);
}

TEST(UniformGrid, Endpoints)
{
    const auto g = uniform_grid(0.0, 1.0, 0.01);
    EXPECT_EQ(g.size(), 101u);
    EXPECT_EQ(g.front(), 0.0);
    EXPECT_NEAR(g.back(), 1.0, 1e-12);
}
