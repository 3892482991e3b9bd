#include "cdma/random.hpp"
#include "cdma/spatial.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

using namespace cdma;

namespace {

Point2D at_bearing(double theta) { return {std::cos(theta), std::sin(theta)}; }

double min_pairwise(const std::vector<Point2D>& pts)
{
    double best = INFINITY;
    for (std::size_t a = 0; a < pts.size(); ++a)
        for (std::size_t b = a + 1; b < pts.size(); ++b)
            best = std::min(best, distance(pts[a], pts[b]));
    return best;
}

} // namespace

TEST(PlacePoints, SinglePointInsideDisk)
{
    auto rng = stream_for(7, 0);
    for (int rep = 0; rep < 100; ++rep) {
        const auto pts = place_points(1, 2.0, 0.0, {}, rng);
        ASSERT_EQ(pts.size(), 1u);
        EXPECT_LE(norm(pts[0]), 2.0);
    }
}

TEST(PlacePoints, FiftyBaseStationsRespectExclusion)
{
    auto rng = stream_for(7, 1);
    const auto pts = place_points(50, 2.0, 0.25, {}, rng);
    ASSERT_EQ(pts.size(), 50u);
    EXPECT_GE(min_pairwise(pts), 0.25);
    for (const auto& p : pts)
        EXPECT_LE(norm(p), 2.0);
}

TEST(PlacePoints, InfeasibleExclusionThrows)
{
    auto rng = stream_for(7, 2);
    EXPECT_THROW(place_points(3, 1.0, 2.1, {}, rng, 2000), PlacementInfeasible);
}

TEST(PlacePoints, ForbiddenZonesAreAvoided)
{
    auto rng = stream_for(7, 3);
    const std::array zones{ExclusionZone{{0.0, 0.0}, 0.5}, ExclusionZone{{1.0, 0.0}, 0.3}};
    const auto pts = place_points(300, 2.0, 0.0, zones, rng);
    for (const auto& p : pts) {
        EXPECT_GE(distance(p, zones[0].center), 0.5);
        EXPECT_GE(distance(p, zones[1].center), 0.3);
    }
}

TEST(PlacePoints, NegativeRadiusRejected)
{
    auto rng = stream_for(7, 4);
    EXPECT_THROW(place_points(1, -1.0, 0.0, {}, rng), std::invalid_argument);
}

TEST(SectorIndex, BoundaryConventions)
{
    const Point2D o{0.0, 0.0};
    EXPECT_EQ(sector_index(o, at_bearing(0.0), 0.0), 0);
    EXPECT_EQ(sector_index(o, at_bearing(std::numbers::pi), 0.0), 1);
    EXPECT_EQ(sector_index(o, at_bearing(2.0 * std::numbers::pi - 1e-9), 0.0), 2);
    EXPECT_EQ(sector_index(o, at_bearing(2.0 * std::numbers::pi / 3.0 + 1e-12), 0.0), 1);
    EXPECT_EQ(sector_index(o, at_bearing(2.0 * std::numbers::pi / 3.0 - 1e-12), 0.0), 0);
}

TEST(SectorIndex, OffsetRotatesSectors)
{
    const Point2D o{0.0, 0.0};
    EXPECT_EQ(sector_index(o, at_bearing(0.1), 0.2), 2);
    EXPECT_EQ(sector_index(o, at_bearing(0.3), 0.2), 0);
    EXPECT_EQ(sector_index({1.0, 1.0}, {2.0, 1.0}, 0.0), 0);
}

TEST(SectorIndex, CoincidentPointsRejected)
{
    EXPECT_THROW(sector_index({0.5, 0.5}, {0.5, 0.5}, 0.0), std::invalid_argument);
}

TEST(SectorIndex, PartitionHasEqualMeasure)
{
    auto rng = stream_for(11, 0);
    std::uniform_real_distribution<double> ang(-std::numbers::pi, std::numbers::pi);
    std::array<int, 3> counts{};
    const int n = 10000;
    for (int k = 0; k < n; ++k) {
        const int s = sector_index({0.0, 0.0}, at_bearing(ang(rng)), 0.0);
        ASSERT_GE(s, 0);
        ASSERT_LE(s, 2);
        ++counts[static_cast<std::size_t>(s)];
    }
    for (int c : counts)
        EXPECT_NEAR(c / static_cast<double>(n), 1.0 / 3.0, 0.02);
}

TEST(UniformInDisk, RadialCdfMatchesKolmogorovSmirnov)
{
    auto rng = stream_for(13, 0);
    const double R = 2.0;
    const std::size_t n = 100000;
    std::vector<double> r(n);
    for (auto& v : r)
        v = norm(uniform_in_disk(R, rng));
    std::sort(r.begin(), r.end());
    double d = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double F = (r[k] / R) * (r[k] / R);
        d = std::max({d, std::abs(F - static_cast<double>(k) / n), std::abs(F - static_cast<double>(k + 1) / n)});
    }
    // 1% critical value 1.63 / sqrt(n)
    EXPECT_LT(d, 1.63 / std::sqrt(static_cast<double>(n)));
}

TEST(GenerateRealization, DefaultScenarioSatisfiesInvariants)
{
    SpatialParams p;
    auto rng = stream_for(17, 0);
    const auto real = generate_realization(p, 8.0, rng);
    ASSERT_EQ(real.num_bs(), 50u);
    ASSERT_EQ(real.num_mobiles(), 400u);
    ASSERT_EQ(real.shadowing_db.size(), 400u * 50u);
    EXPECT_GE(min_pairwise(real.bs_positions), p.bs_exclusion);
    EXPECT_GE(min_pairwise(real.mobile_positions), p.mobile_exclusion);
    for (const auto& m : real.mobile_positions) {
        EXPECT_LE(norm(m), p.net_radius);
        for (const auto& b : real.bs_positions)
            EXPECT_GE(distance(m, b), p.far_field);
    }
    for (const auto& b : real.bs_positions)
        EXPECT_LE(norm(b), p.net_radius);
    const bool any_nonzero = std::any_of(real.shadowing_db.begin(), real.shadowing_db.end(),
                                         [](double v) { return v != 0.0; });
    EXPECT_TRUE(any_nonzero);
}

TEST(GenerateRealization, NoShadowingGivesZeroXi)
{
    SpatialParams p;
    p.num_mobiles = 50;
    auto rng = stream_for(17, 1);
    const auto real = generate_realization(p, 0.0, rng);
    for (double v : real.shadowing_db)
        EXPECT_EQ(v, 0.0);
}

TEST(GenerateRealization, SameSeedIsIdentical)
{
    SpatialParams p;
    auto a = stream_for(19, 5);
    auto b = stream_for(19, 5);
    const auto ra = generate_realization(p, 8.0, a);
    const auto rb = generate_realization(p, 8.0, b);
    EXPECT_EQ(ra.bs_positions, rb.bs_positions);
    EXPECT_EQ(ra.mobile_positions, rb.mobile_positions);
    EXPECT_EQ(ra.shadowing_db, rb.shadowing_db);
}

TEST(GenerateRealization, InvalidParamsRejected)
{
    auto rng = stream_for(1, 0);
    SpatialParams p;
    p.far_field = 0.5;
    EXPECT_THROW(generate_realization(p, 8.0, rng), std::invalid_argument);
    p = {};
    p.bs_exclusion = 5.0;
    EXPECT_THROW(generate_realization(p, 8.0, rng), std::invalid_argument);
    p = {};
    EXPECT_THROW(generate_realization(p, -1.0, rng), std::invalid_argument);
}

TEST(RealizeTopology, FixedPositionsAreKept)
{
    Topology t;
    t.bs_positions = {{0.0, 0.0}, {1.0, 0.0}};
    t.mobile_positions = std::vector<Point2D>{{0.5, 0.5}, {-0.5, 0.2}};
    auto rng = stream_for(3, 0);
    SpatialParams p;
    const auto real = realize_topology(t, p, 0.0, rng);
    EXPECT_EQ(real.bs_positions, t.bs_positions);
    EXPECT_EQ(real.mobile_positions, *t.mobile_positions);
    EXPECT_EQ(real.shadowing_db.size(), 4u);
}

TEST(RealizeTopology, MobileInsideFarFieldRejected)
{
    Topology t;
    t.bs_positions = {{0.0, 0.0}};
    t.mobile_positions = std::vector<Point2D>{{0.001, 0.0}};
    auto rng = stream_for(3, 1);
    EXPECT_THROW(realize_topology(t, SpatialParams{}, 0.0, rng), std::invalid_argument);
}

TEST(RealizeTopology, MissingMobilesAreDrawn)
{
    Topology t;
    t.bs_positions = {{0.0, 0.0}, {1.0, 1.0}};
    SpatialParams p;
    p.num_mobiles = 30;
    auto rng = stream_for(3, 2);
    const auto real = realize_topology(t, p, 8.0, rng);
    EXPECT_EQ(real.num_mobiles(), 30u);
    for (const auto& m : real.mobile_positions)
        for (const auto& b : real.bs_positions)
            EXPECT_GE(distance(m, b), p.far_field);
}

TEST(StreamFor, StreamsDifferByIndexAndDomain)
{
    auto a = stream_for(1, 0);
    auto b = stream_for(1, 1);
    auto c = stream_for(1, 0, 9);
    auto d = stream_for(2, 0);
    const auto va = a();
    EXPECT_NE(va, b());
    EXPECT_NE(va, c());
    EXPECT_NE(va, d());
    auto again = stream_for(1, 0);
    EXPECT_EQ(va, again());
}
