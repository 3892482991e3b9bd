#pragma once

#include "cdma/channel.hpp"
#include "cdma/spatial.hpp"

#include <algorithm>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

namespace cdma {

/// Global sector index: kSectorsPerBs * bs + local sector.
using SectorId = std::size_t;
using MobileId = std::size_t;

inline constexpr std::size_t bs_of(SectorId s) noexcept { return s / kSectorsPerBs; }
inline constexpr SectorId make_sector(std::size_t bs, int local) noexcept
{
    return kSectorsPerBs * bs + static_cast<std::size_t>(local);
}

struct AssociationState
{
    std::vector<std::vector<MobileId>> coverage;  // A_j, ascending mobile ids
    std::vector<std::optional<SectorId>> serving; // g(i); empty when denied
    std::vector<std::vector<MobileId>> served;    // X_j, ascending mobile ids
    std::vector<MobileId> denied;                 // ascending
    std::vector<SectorId> covering;               // row-major M x C: sector of bs b covering mobile i

    SectorId covering_sector(MobileId i, std::size_t bs) const
    {
        const std::size_t num_bs = coverage.size() / kSectorsPerBs;
        return covering[i * num_bs + bs];
    }
    bool is_served(MobileId i) const { return serving[i].has_value(); }
};

/// Shadowed path gain 10^(xi/10) f(d) from mobile i to base station b.
inline double shadowed_gain(const NetworkRealization& real, MobileId i, std::size_t bs, double alpha,
                            double d0)
{
    return db_to_linear(real.shadow_db(i, bs)) * path_gain(real.link_distance(i, bs), d0, alpha);
}

inline AssociationState build_coverage(const NetworkRealization& real)
{
    const std::size_t C = real.num_bs();
    const std::size_t M = real.num_mobiles();
    AssociationState state;
    state.coverage.assign(real.num_sectors(), {});
    state.covering.assign(M * C, 0);
    for (MobileId i = 0; i < M; ++i) {
        for (std::size_t b = 0; b < C; ++b) {
            const int k = sector_index(real.bs_positions[b], real.mobile_positions[i], real.sector_offset);
            const SectorId s = make_sector(b, k);
            state.coverage[s].push_back(i);
            state.covering[i * C + b] = s;
        }
    }
    state.serving.assign(M, std::nullopt);
    state.served.assign(real.num_sectors(), {});
    return state;
}

/// Serves every mobile from the covering sector with the largest shadowed
/// path gain; ties go to the lowest sector index.
inline void associate(const NetworkRealization& real, AssociationState& state, double alpha, double d0)
{
    const std::size_t C = real.num_bs();
    for (auto& members : state.served)
        members.clear();
    state.denied.clear();
    for (MobileId i = 0; i < real.num_mobiles(); ++i) {
        std::optional<SectorId> best;
        double best_gain = -1.0;
        for (std::size_t b = 0; b < C; ++b) {
            const double g = shadowed_gain(real, i, b, alpha, d0);
            const SectorId s = state.covering_sector(i, b);
            if (g > best_gain || (g == best_gain && best && s < *best)) {
                best_gain = g;
                best = s;
            }
        }
        state.serving[i] = best;
        if (best)
            state.served[*best].push_back(i);
    }
}

inline AssociationState associate(const NetworkRealization& real, double alpha, double d0)
{
    auto state = build_coverage(real);
    associate(real, state, alpha, d0);
    return state;
}

/// Enforces |X_j| <= capacity.
///
/// The |X_j| - capacity mobiles of an overloaded sector with the smallest
/// shadowed path gain are evicted. With d_max == 0 they are denied. Otherwise
/// each evicted mobile, in ascending order of the sector it left and worst
/// first within it, tries its other covering sectors in decreasing
/// shadowed-gain order and joins the first one that has room and whose base
/// station is within d_max; failing that it is denied. Reselection never
/// overfills a sector, so one pass reaches the fixed point.
inline void resolve_overload(AssociationState& state, const NetworkRealization& real, std::size_t capacity,
                             double d_max, double alpha, double d0)
{
    if (capacity < 1)
        throw std::invalid_argument("resolve_overload: capacity must be at least 1");
    if (d_max < 0.0)
        throw std::invalid_argument("resolve_overload: d_max must be non-negative");

    const std::size_t C = real.num_bs();
    std::vector<std::pair<MobileId, SectorId>> evicted;

    for (SectorId s = 0; s < state.served.size(); ++s) {
        auto& members = state.served[s];
        if (members.size() <= capacity)
            continue;
        const std::size_t b = bs_of(s);
        std::vector<std::pair<double, MobileId>> ranked;
        ranked.reserve(members.size());
        for (MobileId i : members)
            ranked.emplace_back(shadowed_gain(real, i, b, alpha, d0), i);
        std::stable_sort(ranked.begin(), ranked.end(),
                         [](const auto& a, const auto& c) { return a.first < c.first; });
        const std::size_t excess = members.size() - capacity;
        for (std::size_t n = 0; n < excess; ++n) {
            evicted.emplace_back(ranked[n].second, s);
            state.serving[ranked[n].second].reset();
        }
        std::vector<MobileId> kept;
        kept.reserve(capacity);
        for (std::size_t n = excess; n < ranked.size(); ++n)
            kept.push_back(ranked[n].second);
        std::sort(kept.begin(), kept.end());
        members = std::move(kept);
    }

    for (const auto& [i, origin] : evicted) {
        std::optional<SectorId> chosen;
        if (d_max > 0.0) {
            std::vector<std::pair<double, std::size_t>> candidates;
            for (std::size_t b = 0; b < C; ++b) {
                if (b == bs_of(origin) || real.link_distance(i, b) > d_max)
                    continue;
                candidates.emplace_back(shadowed_gain(real, i, b, alpha, d0), b);
            }
            std::stable_sort(candidates.begin(), candidates.end(),
                             [](const auto& a, const auto& c) { return a.first > c.first; });
            for (const auto& [gain, b] : candidates) {
                const SectorId s = state.covering_sector(i, b);
                if (state.served[s].size() < capacity) {
                    chosen = s;
                    break;
                }
            }
        }
        if (chosen) {
            auto& members = state.served[*chosen];
            members.insert(std::upper_bound(members.begin(), members.end(), i), i);
            state.serving[i] = chosen;
        } else {
            state.denied.push_back(i);
        }
    }
    std::sort(state.denied.begin(), state.denied.end());
}

} // namespace cdma
