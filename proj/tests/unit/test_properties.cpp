// Cross-module structural properties over many random realizations.
#include "cdma/harness.hpp"

#include <gtest/gtest.h>

using namespace cdma;

namespace {

struct Scenario
{
    std::size_t C, M, G;
    double sigma, dmax;
};

void PrintTo(const Scenario& s, std::ostream* os)
{
    *os << "C=" << s.C << " M=" << s.M << " G=" << s.G << " sigma=" << s.sigma << " dmax=" << s.dmax;
}

class Structural : public ::testing::TestWithParam<Scenario>
{
};

} // namespace

TEST_P(Structural, InvariantsHoldAcrossSeeds)
{
    const auto sc = GetParam();
    CampaignConfig c;
    c.spatial.num_bs = sc.C;
    c.spatial.num_mobiles = sc.M;
    c.channel.shadow_std_db = sc.sigma;
    c.channel.spreading_factor = static_cast<unsigned>(sc.G);
    c.d_max = sc.dmax;
    c.master_seed = 99;
    for (std::size_t trial = 0; trial < 5; ++trial) {
        const auto t = setup_trial(c, trial);
        const auto& real = t.realization;
        const auto& a = t.association;
        for (std::size_t x = 0; x < real.num_bs(); ++x)
            for (std::size_t y = x + 1; y < real.num_bs(); ++y)
                ASSERT_GE(distance(real.bs_positions[x], real.bs_positions[y]), c.spatial.bs_exclusion);
        for (MobileId i = 0; i < real.num_mobiles(); ++i) {
            ASSERT_LE(norm(real.mobile_positions[i]), c.spatial.net_radius);
            for (std::size_t b = 0; b < real.num_bs(); ++b)
                ASSERT_GE(real.link_distance(i, b), c.channel.d0);
        }
        // coverage partition per base station
        for (std::size_t b = 0; b < real.num_bs(); ++b) {
            std::size_t total = 0;
            for (int k = 0; k < kSectorsPerBs; ++k)
                total += a.coverage[make_sector(b, k)].size();
            ASSERT_EQ(total, real.num_mobiles());
        }
        std::size_t served = 0;
        for (const auto& x : a.served) {
            ASSERT_LE(x.size(), sc.G);
            served += x.size();
        }
        ASSERT_EQ(served + a.denied.size(), real.num_mobiles());
        ASSERT_EQ(t.links.size(), served);

        for (const auto& l : t.uplinks) {
            const SectorId j = l.serving_sector;
            for (MobileId i = 0; i < real.num_mobiles(); ++i) {
                if (i == l.reference_mobile)
                    continue;
                if (!a.serving[i] || a.covering_sector(i, bs_of(j)) != j)
                    ASSERT_EQ(l.omega[i], 0.0);
                else if (*a.serving[i] == j)
                    ASSERT_EQ(l.omega[i], c.channel.interference_scale() * l.omega_r);
                else
                    ASSERT_GT(l.omega[i], 0.0);
            }
        }
    }
}

INSTANTIATE_TEST_SUITE_P(Scenarios, Structural,
                         ::testing::Values(Scenario{50, 400, 16, 8.0, 0.0}, Scenario{50, 800, 16, 8.0, 0.5},
                                           Scenario{20, 400, 8, 0.0, 0.0}, Scenario{30, 600, 4, 8.0, 1.0}),
                         [](const auto& info) {
                             const auto& s = info.param;
                             return "C" + std::to_string(s.C) + "_M" + std::to_string(s.M) + "_G" +
                                    std::to_string(s.G) + "_idx" + std::to_string(info.index);
                         });

TEST(KernelMonotonicity, InBetaAndSnrOnNetworkLinks)
{
    CampaignConfig c;
    const auto t = setup_trial(c, 1);
    for (std::size_t k = 0; k < t.links.size(); k += 11) {
        auto l = t.links[k];
        double prev = 0.0;
        for (double beta = 0.05; beta < 50.0; beta *= 1.4) {
            const double e = outage_probability(l, beta);
            ASSERT_GE(e + 1e-13, prev);
            prev = e;
        }
        const double e0 = outage_probability(l, 1.0);
        l.snr_gamma *= 10.0;
        ASSERT_LE(outage_probability(l, 1.0), e0 + 1e-13);
    }
}

TEST(Determinism, CampaignIndependentOfParallelism)
{
    CampaignConfig c;
    c.spatial.num_bs = 20;
    c.spatial.num_mobiles = 160;
    c.trials = 40;
    c.master_seed = 5;
    nlohmann::json prev;
    for (unsigned threads : {1u, 2u, 3u, 8u}) {
        c.threads = threads;
        const auto j = to_json(run_campaign(c))["records"];
        if (!prev.is_null()) {
            ASSERT_EQ(j, prev) << threads << " threads";
        }
        prev = j;
    }
}
