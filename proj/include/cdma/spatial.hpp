#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cdma {

struct Point2D
{
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point2D&, const Point2D&) = default;
};

inline double distance(Point2D a, Point2D b) noexcept
{
    return std::hypot(a.x - b.x, a.y - b.y);
}

inline double norm(Point2D p) noexcept
{
    return std::hypot(p.x, p.y);
}

/// Raised when rejection sampling exhausts its retry budget.
class PlacementInfeasible : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

struct SpatialParams
{
    std::size_t num_bs = 50;
    std::size_t num_mobiles = 400;
    double net_radius = 2.0;
    double bs_exclusion = 0.25;
    double mobile_exclusion = 0.01;
    double far_field = 0.01;

    void validate() const
    {
        if (!(net_radius > 0.0) || !(bs_exclusion > 0.0) || !(mobile_exclusion > 0.0) ||
            !(far_field > 0.0))
            throw std::invalid_argument("spatial: all radii must be positive");
        if (!(bs_exclusion < 2.0 * net_radius))
            throw std::invalid_argument("spatial: bs_exclusion must be below the network diameter");
        if (far_field > bs_exclusion)
            throw std::invalid_argument("spatial: far_field must not exceed bs_exclusion");
    }
};

struct ExclusionZone
{
    Point2D center;
    double radius = 0.0;
};

inline constexpr std::size_t kPlacementAttempts = 100000;

template <class Rng>
Point2D uniform_in_disk(double radius, Rng& rng)
{
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double r = radius * std::sqrt(unit(rng));
    const double theta = 2.0 * std::numbers::pi * unit(rng);
    return {r * std::cos(theta), r * std::sin(theta)};
}

/// Sequential rejection sampling of `count` points in a disk centred at the
/// origin. Each accepted point keeps `self_exclusion` from every earlier one
/// and lies outside all `forbidden` zones.
template <class Rng>
std::vector<Point2D> place_points(std::size_t count, double region_radius, double self_exclusion,
                                  std::span<const ExclusionZone> forbidden, Rng& rng,
                                  std::size_t max_attempts = kPlacementAttempts)
{
    if (region_radius < 0.0 || self_exclusion < 0.0)
        throw std::invalid_argument("place_points: negative radius");

    std::vector<Point2D> points;
    points.reserve(count);
    const double excl2 = self_exclusion * self_exclusion;

    auto acceptable = [&](Point2D p) {
        for (const auto& q : points) {
            const double dx = p.x - q.x;
            const double dy = p.y - q.y;
            if (dx * dx + dy * dy < excl2)
                return false;
        }
        for (const auto& zone : forbidden) {
            if (distance(p, zone.center) < zone.radius)
                return false;
        }
        return true;
    };

    for (std::size_t n = 0; n < count; ++n) {
        bool placed = false;
        for (std::size_t attempt = 0; attempt < max_attempts; ++attempt) {
            const Point2D p = uniform_in_disk(region_radius, rng);
            if (acceptable(p)) {
                points.push_back(p);
                placed = true;
                break;
            }
        }
        if (!placed)
            throw PlacementInfeasible("placement infeasible: point " + std::to_string(n + 1) + " of " +
                                      std::to_string(count) + " not placed after " +
                                      std::to_string(max_attempts) + " attempts");
    }
    return points;
}

inline constexpr int kSectorsPerBs = 3;
inline constexpr double kSectorWidth = 2.0 * std::numbers::pi / kSectorsPerBs;

/// Sector k of a base station covers bearings in
/// [offset + k*2pi/3, offset + (k+1)*2pi/3).
inline int sector_index(Point2D bs, Point2D mobile, double sector_offset)
{
    const double dx = mobile.x - bs.x;
    const double dy = mobile.y - bs.y;
    if (dx == 0.0 && dy == 0.0)
        throw std::invalid_argument("sector_index: mobile coincides with base station");

    constexpr double two_pi = 2.0 * std::numbers::pi;
    double rel = std::fmod(std::atan2(dy, dx) - sector_offset, two_pi);
    if (rel < 0.0)
        rel += two_pi;
    if (rel >= two_pi)
        rel -= two_pi;
    const int k = static_cast<int>(rel / kSectorWidth);
    return k < kSectorsPerBs ? k : kSectorsPerBs - 1;
}

/// One drawn topology: positions plus per (mobile, base station) shadowing.
///
/// Shadowing is shared by the three colocated sector antennas of a base
/// station; a mobile is covered by exactly one of them anyway.
struct NetworkRealization
{
    std::vector<Point2D> bs_positions;
    std::vector<Point2D> mobile_positions;
    std::vector<double> shadowing_db; // row-major, num_mobiles x num_bs
    double sector_offset = 0.0;

    std::size_t num_bs() const noexcept { return bs_positions.size(); }
    std::size_t num_mobiles() const noexcept { return mobile_positions.size(); }
    std::size_t num_sectors() const noexcept { return kSectorsPerBs * bs_positions.size(); }

    double shadow_db(std::size_t mobile, std::size_t bs) const
    {
        return shadowing_db[mobile * num_bs() + bs];
    }
    double link_distance(std::size_t mobile, std::size_t bs) const
    {
        return distance(mobile_positions[mobile], bs_positions[bs]);
    }
};

/// Fixed deployment read from a topology file. Missing mobiles are drawn.
struct Topology
{
    std::vector<Point2D> bs_positions;
    std::optional<std::vector<Point2D>> mobile_positions;
};

namespace detail {

template <class Rng>
std::vector<double> draw_shadowing(std::size_t mobiles, std::size_t bss, double shadow_std_db, Rng& rng)
{
    std::vector<double> xi(mobiles * bss, 0.0);
    if (shadow_std_db > 0.0) {
        std::normal_distribution<double> gauss(0.0, shadow_std_db);
        for (auto& v : xi)
            v = gauss(rng);
    }
    return xi;
}

inline std::vector<ExclusionZone> far_field_zones(std::span<const Point2D> bss, double far_field)
{
    std::vector<ExclusionZone> zones;
    zones.reserve(bss.size());
    for (const auto& b : bss)
        zones.push_back({b, far_field});
    return zones;
}

} // namespace detail

/// Base stations first (mutual exclusion), then mobiles (mutual exclusion
/// and far-field distance from every base station), then shadowing.
template <class Rng>
NetworkRealization generate_realization(const SpatialParams& params, double shadow_std_db, Rng& rng,
                                        double sector_offset = 0.0)
{
    params.validate();
    if (shadow_std_db < 0.0)
        throw std::invalid_argument("generate_realization: negative shadowing deviation");

    NetworkRealization real;
    real.sector_offset = sector_offset;
    real.bs_positions = place_points(params.num_bs, params.net_radius, params.bs_exclusion, {}, rng);
    const auto zones = detail::far_field_zones(real.bs_positions, params.far_field);
    real.mobile_positions =
        place_points(params.num_mobiles, params.net_radius, params.mobile_exclusion, zones, rng);
    real.shadowing_db = detail::draw_shadowing(params.num_mobiles, params.num_bs, shadow_std_db, rng);
    return real;
}

/// Realization over a fixed topology. Base stations are taken verbatim;
/// mobiles are taken verbatim when given, otherwise drawn as usual.
template <class Rng>
NetworkRealization realize_topology(const Topology& topo, const SpatialParams& params,
                                    double shadow_std_db, Rng& rng, double sector_offset = 0.0)
{
    if (topo.bs_positions.empty())
        throw std::invalid_argument("topology: no base stations");

    NetworkRealization real;
    real.sector_offset = sector_offset;
    real.bs_positions = topo.bs_positions;
    if (topo.mobile_positions) {
        real.mobile_positions = *topo.mobile_positions;
        for (std::size_t i = 0; i < real.mobile_positions.size(); ++i)
            for (const auto& b : real.bs_positions)
                if (distance(real.mobile_positions[i], b) < params.far_field)
                    throw std::invalid_argument("topology: mobile " + std::to_string(i) +
                                                " is inside the far-field distance of a base station");
    } else {
        const auto zones = detail::far_field_zones(real.bs_positions, params.far_field);
        real.mobile_positions =
            place_points(params.num_mobiles, params.net_radius, params.mobile_exclusion, zones, rng);
    }
    real.shadowing_db =
        detail::draw_shadowing(real.mobile_positions.size(), real.bs_positions.size(), shadow_std_db, rng);
    return real;
}

} // namespace cdma
