#pragma once

#include "cdma/outage.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cdma {

enum class PolicyKind { MTFR, OCFR, MTVR, OCVR };

inline constexpr PolicyKind kAllPolicies[] = {PolicyKind::MTFR, PolicyKind::OCFR, PolicyKind::MTVR,
                                              PolicyKind::OCVR};

inline std::string_view to_string(PolicyKind kind) noexcept
{
    switch (kind) {
    case PolicyKind::MTFR: return "MTFR";
    case PolicyKind::OCFR: return "OCFR";
    case PolicyKind::MTVR: return "MTVR";
    case PolicyKind::OCVR: return "OCVR";
    }
    return "?";
}

inline PolicyKind parse_policy(std::string_view name)
{
    for (auto k : kAllPolicies)
        if (to_string(k) == name)
            return k;
    throw std::invalid_argument("unknown policy '" + std::string(name) + "' (expected MTFR, OCFR, MTVR or OCVR)");
}

inline bool is_fixed_rate(PolicyKind kind) noexcept
{
    return kind == PolicyKind::MTFR || kind == PolicyKind::OCFR;
}

struct RateSearch
{
    double r_min = 0.0;
    double r_max = 10.0;
    double grid_step = 0.05;
    double tolerance = 1e-4;

    void validate() const
    {
        if (!(r_min >= 0.0) || !(r_max > r_min))
            throw std::invalid_argument("rate search: need 0 <= r_min < r_max");
        if (!(grid_step > 0.0) || !(tolerance > 0.0))
            throw std::invalid_argument("rate search: grid_step and tolerance must be positive");
    }
};

struct PolicyConfig
{
    PolicyKind kind = PolicyKind::OCVR;
    double outage_constraint = 0.1;
    RateSearch search;
    std::vector<double> rate_ladder; // empty: continuous rates

    void validate() const
    {
        if (!(outage_constraint > 0.0 && outage_constraint < 1.0))
            throw std::invalid_argument("policy: outage constraint must lie in (0, 1)");
        search.validate();
        for (double r : rate_ladder)
            if (!(r >= 0.0))
                throw std::invalid_argument("policy: ladder rates must be non-negative");
    }
};

/// SINR threshold of a capacity-approaching code at rate R.
inline double rate_to_threshold(double rate) noexcept
{
    return std::expm1(rate * std::numbers::ln2);
}

inline double threshold_to_rate(double beta) noexcept
{
    return std::log1p(beta) / std::numbers::ln2;
}

struct RateChoice
{
    double rate = 0.0;
    double beta = 0.0;
    double epsilon = 0.0;
};

struct RateAllocation
{
    MobileId mobile = 0;
    std::optional<SectorId> sector;
    bool served = false;
    double rate = 0.0;
    double beta = 0.0;
    double epsilon = 0.0;
    double throughput = 0.0;
};

namespace detail {

/// Largest R in [r_min, r_max] with feasible(R), for feasible true below
/// some cut and false above it. Returns r_min when even that fails.
template <class Feasible>
double largest_feasible(const RateSearch& search, Feasible&& feasible)
{
    if (feasible(search.r_max))
        return search.r_max;
    double lo = search.r_min;
    double hi = search.r_max;
    if (!feasible(lo))
        return lo;
    while (hi - lo > search.tolerance) {
        const double mid = 0.5 * (lo + hi);
        if (feasible(mid))
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

/// Grid scan then golden-section refinement inside the best grid cell.
/// `scan(R)` returns the objective and whether it is zero for every larger R
/// (all links saturated in outage), which ends the scan early.
template <class Scan, class Objective>
double maximize_rate(const RateSearch& search, Scan&& scan, Objective&& objective)
{
    const auto steps = static_cast<std::size_t>(std::floor((search.r_max - search.r_min) / search.grid_step + 1e-9));
    double best_r = search.r_min;
    double best_v = -1.0;
    for (std::size_t k = 0; k <= steps + 1; ++k) {
        const double r = std::min(search.r_min + static_cast<double>(k) * search.grid_step, search.r_max);
        const auto [value, saturated] = scan(r);
        if (value > best_v) {
            best_v = value;
            best_r = r;
        }
        if (saturated || r >= search.r_max)
            break;
    }

    double a = std::max(search.r_min, best_r - search.grid_step);
    double b = std::min(search.r_max, best_r + search.grid_step);
    constexpr double inv_phi = 0.6180339887498949;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = objective(c);
    double fd = objective(d);
    while (b - a > search.tolerance) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = objective(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = objective(d);
        }
    }
    const double refined = fc > fd ? c : d;
    const double refined_v = std::max(fc, fd);
    return refined_v > best_v ? refined : best_r;
}

inline RateChoice choice_at(const PreparedUplink& link, double rate)
{
    const double beta = rate_to_threshold(rate);
    return {rate, beta, outage_probability(link, beta)};
}

} // namespace detail

/// Largest rate whose outage stays within `zeta` (OCVR).
inline RateChoice ocvr_rate(const PreparedUplink& link, double zeta, const RateSearch& search,
                            std::span<const double> ladder = {})
{
    auto feasible = [&](double r) { return outage_probability(link, rate_to_threshold(r)) <= zeta; };
    if (!ladder.empty()) {
        double best = 0.0;
        for (double r : ladder)
            if (r > best && feasible(r))
                best = r;
        return detail::choice_at(link, best);
    }
    return detail::choice_at(link, detail::largest_feasible(search, feasible));
}

/// Rate maximizing R (1 - eps(R)) for one uplink (MTVR).
inline RateChoice mtvr_rate(const PreparedUplink& link, const RateSearch& search,
                            std::span<const double> ladder = {})
{
    auto throughput = [&](double r) { return r * (1.0 - outage_probability(link, rate_to_threshold(r))); };
    if (!ladder.empty()) {
        double best = 0.0;
        double best_t = 0.0;
        for (double r : ladder) {
            const double t = throughput(r);
            if (t > best_t) {
                best_t = t;
                best = r;
            }
        }
        return detail::choice_at(link, best);
    }
    auto scan = [&](double r) {
        const double eps = outage_probability(link, rate_to_threshold(r));
        return std::pair{r * (1.0 - eps), eps >= 1.0};
    };
    return detail::choice_at(link, detail::maximize_rate(search, scan, throughput));
}

inline double mean_outage_at(std::span<const PreparedUplink> links, double rate)
{
    const double beta = rate_to_threshold(rate);
    double sum = 0.0;
    for (const auto& l : links)
        sum += outage_probability(l, beta);
    return sum / static_cast<double>(links.size());
}

/// Mean throughput (1/M) sum_i R (1 - eps_i(R)) when every served uplink
/// uses rate R; denied mobiles count as zero throughput.
inline double mean_throughput_at(std::span<const PreparedUplink> links, std::size_t num_mobiles, double rate)
{
    const double beta = rate_to_threshold(rate);
    double sum = 0.0;
    for (const auto& l : links)
        sum += rate * (1.0 - outage_probability(l, beta));
    return sum / static_cast<double>(num_mobiles);
}

/// Common rate for every served uplink of one trial (OCFR or MTFR).
///
/// OCFR: largest R with the mean outage over served uplinks <= zeta.
/// MTFR: R maximizing the mean throughput over all `num_mobiles`.
inline double fixed_rate_select(std::span<const PreparedUplink> links, std::size_t num_mobiles,
                                const PolicyConfig& policy)
{
    if (links.empty())
        throw std::invalid_argument("fixed_rate_select: no served uplinks");
    if (num_mobiles < links.size())
        throw std::invalid_argument("fixed_rate_select: fewer mobiles than served uplinks");
    const auto& search = policy.search;
    const std::span<const double> ladder = policy.rate_ladder;

    if (policy.kind == PolicyKind::OCFR) {
        auto feasible = [&](double r) { return mean_outage_at(links, r) <= policy.outage_constraint; };
        if (!ladder.empty()) {
            double best = 0.0;
            for (double r : ladder)
                if (r > best && feasible(r))
                    best = r;
            return best;
        }
        return detail::largest_feasible(search, feasible);
    }
    if (policy.kind != PolicyKind::MTFR)
        throw std::invalid_argument("fixed_rate_select: policy is not a fixed-rate policy");

    auto objective = [&](double r) { return mean_throughput_at(links, num_mobiles, r); };
    if (!ladder.empty()) {
        double best = 0.0;
        double best_t = 0.0;
        for (double r : ladder) {
            const double t = objective(r);
            if (t > best_t) {
                best_t = t;
                best = r;
            }
        }
        return best;
    }
    // Links saturated at some rate stay saturated above it.
    std::vector<char> saturated(links.size(), 0);
    auto scan = [&](double r) {
        const double beta = rate_to_threshold(r);
        double sum = 0.0;
        bool all = true;
        for (std::size_t n = 0; n < links.size(); ++n) {
            if (saturated[n])
                continue;
            const double eps = outage_probability(links[n], beta);
            if (eps >= 1.0)
                saturated[n] = 1;
            else
                all = false;
            sum += r * (1.0 - eps);
        }
        return std::pair{sum / static_cast<double>(num_mobiles), all};
    };
    return detail::maximize_rate(search, scan, objective);
}

/// Applies a policy to the served uplinks of one trial. Returns one record
/// per mobile; mobiles without a link are denied with zero rate.
inline std::vector<RateAllocation> allocate_rates(std::span<const PreparedUplink> links, std::size_t num_mobiles,
                                                  const PolicyConfig& policy)
{
    std::vector<RateAllocation> out(num_mobiles);
    for (MobileId i = 0; i < num_mobiles; ++i)
        out[i].mobile = i;
    if (links.empty())
        return out;

    auto record = [&](const PreparedUplink& l, RateChoice c) {
        auto& a = out.at(l.reference_mobile);
        a.sector = l.serving_sector;
        a.served = true;
        a.rate = c.rate;
        a.beta = c.beta;
        a.epsilon = c.epsilon;
        a.throughput = c.rate * (1.0 - c.epsilon);
    };

    switch (policy.kind) {
    case PolicyKind::OCFR:
    case PolicyKind::MTFR: {
        const double rate = fixed_rate_select(links, num_mobiles, policy);
        for (const auto& l : links)
            record(l, detail::choice_at(l, rate));
        break;
    }
    case PolicyKind::OCVR:
        for (const auto& l : links)
            record(l, ocvr_rate(l, policy.outage_constraint, policy.search, policy.rate_ladder));
        break;
    case PolicyKind::MTVR:
        for (const auto& l : links)
            record(l, mtvr_rate(l, policy.search, policy.rate_ladder));
        break;
    }
    return out;
}

} // namespace cdma
