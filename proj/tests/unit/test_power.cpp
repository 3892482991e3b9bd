#include "cdma/power.hpp"
#include "cdma/random.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace cdma;

namespace {

NetworkRealization make_real(std::vector<Point2D> bss, std::vector<Point2D> mobiles)
{
    NetworkRealization r;
    r.bs_positions = std::move(bss);
    r.mobile_positions = std::move(mobiles);
    r.shadowing_db.assign(r.num_mobiles() * r.num_bs(), 0.0);
    return r;
}

AssociationState associated(const NetworkRealization& real, const ChannelParams& ch, std::size_t cap = 1000,
                            double dmax = 0.0)
{
    auto s = associate(real, ch.alpha, ch.d0);
    resolve_overload(s, real, cap, dmax, ch.alpha, ch.d0);
    return s;
}

NetworkRealization random_real(std::uint64_t seed, std::size_t M)
{
    SpatialParams p;
    p.num_mobiles = M;
    auto rng = stream_for(seed, 0);
    return generate_realization(p, 8.0, rng);
}

} // namespace

TEST(NormalizedTransmitPower, Examples)
{
    ChannelParams ch;
    auto real = make_real({{0.0, 0.0}}, {{0.01, 0.0}});
    EXPECT_DOUBLE_EQ(normalized_transmit_power(real, 0, 0, ch), 1.0);
    real.shadowing_db[0] = 10.0;
    EXPECT_DOUBLE_EQ(normalized_transmit_power(real, 0, 0, ch), 0.1);
    auto a = make_real({{0.0, 0.0}}, {{0.3, 0.0}});
    auto b = make_real({{0.0, 0.0}}, {{0.6, 0.0}});
    EXPECT_NEAR(normalized_transmit_power(b, 0, 0, ch) / normalized_transmit_power(a, 0, 0, ch), 8.0, 1e-12);
}

TEST(OmegaVector, HandComputedIntercellValue)
{
    ChannelParams ch;
    ch.shadow_std_db = 0.0;
    const double th = 0.3;
    // r: 0.5 from bs 0; i: 1.0 from bs 0 and 0.8 from bs 1, both in sector 0 of bs 0
    const auto real =
        make_real({{0.0, 0.0}, {1.0, 0.8}}, {{0.5 * std::cos(th), 0.5 * std::sin(th)}, {1.0, 0.0}});
    const auto s = associated(real, ch);
    ASSERT_EQ(*s.serving[0], 0u);
    ASSERT_EQ(bs_of(*s.serving[1]), 1u);
    const auto link = omega_vector(real, s, 0, ch, 0.25, 1.0);
    EXPECT_NEAR(link.omega[1], 4.096 / 24.0, 1e-12);
    EXPECT_NEAR(link.omega[1], 0.17067, 1e-5);
    EXPECT_EQ(link.omega[0], 0.0);
    EXPECT_DOUBLE_EQ(link.omega_r, std::pow(0.5, -3.0));
    EXPECT_EQ(link.m_desired, 1u); // 0.5 is beyond r_bs
}

TEST(OmegaVector, IntracellRatioExact)
{
    ChannelParams ch;
    const auto real = make_real({{0.0, 0.0}}, {{0.5, 0.1}, {0.3, 0.2}, {0.9, 0.05}});
    const auto s = associated(real, ch);
    const auto link = omega_vector(real, s, 0, ch, 0.25, 1.0);
    EXPECT_EQ(link.omega[1], ch.interference_scale() * link.omega_r);
    EXPECT_EQ(link.omega[2], link.omega[1]);
    EXPECT_NEAR(link.omega[1] / link.omega_r, 1.0 / 24.0, 1e-15);
}

TEST(OmegaVector, NonCoveredMobileHasZeroOmega)
{
    ChannelParams ch;
    // mobile 1 sits in sector 1 of the only station
    const auto real = make_real({{0.0, 0.0}}, {{0.5, 0.1}, {-0.5, 0.1}});
    const auto s = associated(real, ch);
    ASSERT_NE(*s.serving[0], *s.serving[1]);
    const auto link = omega_vector(real, s, 0, ch, 0.25, 1.0);
    EXPECT_EQ(link.omega[1], 0.0);
}

TEST(OmegaVector, DeniedMobilesZeroAndDeniedReferenceRejected)
{
    ChannelParams ch;
    const auto real = random_real(21, 800);
    const auto s = associated(real, ch, 6, 0.0);
    ASSERT_FALSE(s.denied.empty());
    EXPECT_THROW(omega_vector(real, s, s.denied.front(), ch, 0.25, 1.0), std::invalid_argument);
    EXPECT_THROW(omega_vector(real, s, real.num_mobiles(), ch, 0.25, 1.0), std::out_of_range);
    for (MobileId r = 0; r < real.num_mobiles(); r += 37) {
        if (!s.serving[r])
            continue;
        const auto link = omega_vector(real, s, r, ch, 0.25, 1.0);
        EXPECT_NO_THROW(link.validate());
        for (MobileId d : s.denied)
            EXPECT_EQ(link.omega[d], 0.0);
        const SectorId j = *s.serving[r];
        for (MobileId i = 0; i < real.num_mobiles(); ++i) {
            if (i == r)
                continue;
            if (s.covering_sector(i, bs_of(j)) != j) {
                EXPECT_EQ(link.omega[i], 0.0);
            }
            if (s.serving[i] && *s.serving[i] == j) {
                EXPECT_EQ(link.omega[i], ch.interference_scale() * link.omega_r);
            }
        }
    }
}

TEST(OmegaVector, DoublingSpreadingFactorHalvesInterference)
{
    ChannelParams ch;
    const auto real = random_real(23, 400);
    const auto s = associated(real, ch, 1000);
    auto ch2 = ch;
    ch2.spreading_factor = 32;
    for (MobileId r = 0; r < real.num_mobiles(); r += 53) {
        const auto a = omega_vector(real, s, r, ch, 0.25, 1.0);
        const auto b = omega_vector(real, s, r, ch2, 0.25, 1.0);
        EXPECT_EQ(a.omega_r, b.omega_r);
        for (std::size_t i = 0; i < a.omega.size(); ++i)
            EXPECT_EQ(b.omega[i], a.omega[i] / 2.0);
    }
}

TEST(OmegaVector, IntracellInterfererLocationIrrelevant)
{
    ChannelParams ch;
    auto real = make_real({{0.0, 0.0}, {2.0, 0.0}}, {{0.5, 0.1}, {0.3, 0.2}, {1.8, 0.3}});
    const auto s1 = associated(real, ch);
    const auto a = omega_vector(real, s1, 0, ch, 0.25, 1.0);
    real.mobile_positions[1] = {0.7, 0.4};
    real.shadowing_db[1 * 2 + 0] = 3.0;
    const auto s2 = associated(real, ch);
    ASSERT_EQ(s1.serving, s2.serving);
    const auto b = omega_vector(real, s2, 0, ch, 0.25, 1.0);
    EXPECT_EQ(a.omega, b.omega);
}

TEST(OmegaVector, ActivityAndFadingParameters)
{
    ChannelParams ch;
    const auto real = make_real({{0.0, 0.0}}, {{0.05, 0.01}, {0.2, 0.05}, {0.9, 0.1}});
    const auto s = associated(real, ch);
    const auto link = omega_vector(real, s, 0, ch, 0.25, 0.5);
    EXPECT_EQ(link.m_desired, 3u);
    EXPECT_EQ(link.m_interferers[1], 2.0);
    EXPECT_EQ(link.m_interferers[2], 1.0);
    for (double p : link.activity)
        EXPECT_EQ(p, 0.5);
}

TEST(UplinkInstance, ValidationErrors)
{
    UplinkInstance l;
    l.omega = {0.0, 0.1};
    l.m_interferers = {1.0, 1.0};
    l.activity = {1.0, 1.0};
    EXPECT_NO_THROW(l.validate());
    auto bad = l;
    bad.omega_r = 0.0;
    EXPECT_THROW(bad.validate(), std::invalid_argument);
    bad = l;
    bad.activity[1] = 1.5;
    EXPECT_THROW(bad.validate(), std::invalid_argument);
    bad = l;
    bad.omega[1] = -0.1;
    EXPECT_THROW(bad.validate(), std::invalid_argument);
    bad = l;
    bad.m_interferers.pop_back();
    EXPECT_THROW(bad.validate(), std::invalid_argument);
    bad = l;
    bad.m_desired = 0;
    EXPECT_THROW(bad.validate(), std::invalid_argument);
    bad = l;
    bad.m_interferers[1] = 0.0;
    EXPECT_THROW(bad.validate(), std::invalid_argument);
}
