#pragma once

#include "cdma/policy.hpp"

#include <algorithm>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace cdma {

struct TrialSummary
{
    double mean_outage = 0.0;     // over served uplinks
    double mean_throughput = 0.0; // over all mobiles, denied count as zero
    double area_spectral_efficiency = 0.0;
    double mean_rate = 0.0;       // over served uplinks
    double max_outage = 0.0;      // over served uplinks
    std::size_t denied_count = 0;
    std::size_t num_mobiles = 0;
    std::vector<RateAllocation> per_uplink;

    double denial_fraction() const noexcept
    {
        return num_mobiles ? static_cast<double>(denied_count) / static_cast<double>(num_mobiles) : 0.0;
    }
};

/// Transmission density lambda = M / (pi r_net^2).
inline double transmission_density(std::size_t num_mobiles, double net_radius) noexcept
{
    return static_cast<double>(num_mobiles) / (std::numbers::pi * net_radius * net_radius);
}

/// Aggregates one trial. A trial with no served uplink reports zero outage.
inline TrialSummary trial_metrics(std::vector<RateAllocation> allocations, std::size_t num_mobiles,
                                  double net_radius)
{
    if (allocations.size() != num_mobiles)
        throw std::invalid_argument("trial_metrics: expected one allocation per mobile");

    TrialSummary s;
    s.num_mobiles = num_mobiles;
    double eps_sum = 0.0;
    double rate_sum = 0.0;
    double t_sum = 0.0;
    std::size_t served = 0;
    for (const auto& a : allocations) {
        if (!a.served) {
            ++s.denied_count;
            continue;
        }
        ++served;
        eps_sum += a.epsilon;
        rate_sum += a.rate;
        t_sum += a.rate * (1.0 - a.epsilon);
        s.max_outage = std::max(s.max_outage, a.epsilon);
    }
    if (served > 0) {
        s.mean_outage = eps_sum / static_cast<double>(served);
        s.mean_rate = rate_sum / static_cast<double>(served);
    }
    s.mean_throughput = num_mobiles ? t_sum / static_cast<double>(num_mobiles) : 0.0;
    s.area_spectral_efficiency = transmission_density(num_mobiles, net_radius) * s.mean_throughput;
    s.per_uplink = std::move(allocations);
    return s;
}

/// Fraction of samples strictly greater than each grid threshold.
inline std::vector<double> ccdf(std::span<const double> samples, std::span<const double> grid)
{
    if (samples.empty())
        throw std::invalid_argument("ccdf: no samples");
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> out;
    out.reserve(grid.size());
    for (double x : grid) {
        const auto above = sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), x);
        out.push_back(static_cast<double>(above) / static_cast<double>(sorted.size()));
    }
    return out;
}

/// Pooled ccdf over a fixed grid, filled incrementally so pooling across
/// many trials needs no sample storage.
class CcdfAccumulator
{
  public:
    CcdfAccumulator() = default;
    explicit CcdfAccumulator(std::vector<double> grid) : grid_(std::move(grid)), above_(grid_.size(), 0)
    {
        if (!std::is_sorted(grid_.begin(), grid_.end()))
            throw std::invalid_argument("ccdf grid must be sorted");
    }

    void add(double value)
    {
        ++count_;
        // thresholds strictly below value
        const auto n = std::lower_bound(grid_.begin(), grid_.end(), value) - grid_.begin();
        for (std::ptrdiff_t k = 0; k < n; ++k)
            ++above_[static_cast<std::size_t>(k)];
    }

    std::size_t count() const noexcept { return count_; }
    const std::vector<double>& grid() const noexcept { return grid_; }

    std::vector<double> curve() const
    {
        std::vector<double> out(grid_.size(), 0.0);
        if (count_ == 0)
            return out;
        for (std::size_t k = 0; k < grid_.size(); ++k)
            out[k] = static_cast<double>(above_[k]) / static_cast<double>(count_);
        return out;
    }

  private:
    std::vector<double> grid_;
    std::vector<std::size_t> above_;
    std::size_t count_ = 0;
};

inline std::vector<double> uniform_grid(double lo, double hi, double step)
{
    std::vector<double> g;
    const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9));
    for (std::size_t k = 0; k <= n; ++k)
        g.push_back(lo + static_cast<double>(k) * step);
    return g;
}

} // namespace cdma
