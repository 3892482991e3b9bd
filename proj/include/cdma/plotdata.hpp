#pragma once

#include "cdma/harness.hpp"
#include "cdma/policy.hpp"

#include <filesystem>
#include <fstream>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cdma {

struct Series
{
    std::string label;
    std::vector<std::pair<double, double>> points;

    void check_increasing() const
    {
        for (std::size_t k = 1; k < points.size(); ++k)
            if (!(points[k].first > points[k - 1].first))
                throw std::invalid_argument("series '" + label + "': x values must be strictly increasing");
    }
};

struct RateSweep
{
    Series mean_outage;     // network average eps(R) over served uplinks
    Series mean_throughput; // network average T(R) over all mobiles
    std::vector<Series> uplink_outage;
    std::vector<Series> uplink_throughput;
};

/// Evaluates outage and throughput over a rate grid as if every served
/// uplink used the same rate. `selected` indexes into `links`.
inline RateSweep rate_sweep(std::span<const PreparedUplink> links, std::size_t num_mobiles,
                            std::span<const double> grid, std::span<const std::size_t> selected = {})
{
    if (links.empty())
        throw std::invalid_argument("rate_sweep: no served uplinks");
    RateSweep s;
    s.mean_outage.label = "mean_outage";
    s.mean_throughput.label = "mean_throughput";
    for (std::size_t idx : selected) {
        if (idx >= links.size())
            throw std::out_of_range("rate_sweep: selected uplink out of range");
        const auto id = std::to_string(links[idx].reference_mobile);
        s.uplink_outage.push_back({"outage_mobile_" + id, {}});
        s.uplink_throughput.push_back({"throughput_mobile_" + id, {}});
    }
    for (double r : grid) {
        const double beta = rate_to_threshold(r);
        double eps_sum = 0.0;
        double t_sum = 0.0;
        for (const auto& l : links) {
            const double e = outage_probability(l, beta);
            eps_sum += e;
            t_sum += r * (1.0 - e);
        }
        s.mean_outage.points.emplace_back(r, eps_sum / static_cast<double>(links.size()));
        s.mean_throughput.points.emplace_back(r, t_sum / static_cast<double>(num_mobiles));
        for (std::size_t k = 0; k < selected.size(); ++k) {
            const double e = outage_probability(links[selected[k]], beta);
            s.uplink_outage[k].points.emplace_back(r, e);
            s.uplink_throughput[k].points.emplace_back(r, r * (1.0 - e));
        }
    }
    s.mean_outage.check_increasing();
    return s;
}

enum class Figure { AseVsLoad, AseVsSpreading, AseVsRbs, AseVsDmax, DenialVsDmax, RateCcdf, OutageCcdf };

inline constexpr Figure kAllFigures[] = {Figure::AseVsLoad,    Figure::AseVsSpreading, Figure::AseVsRbs,
                                         Figure::AseVsDmax,    Figure::DenialVsDmax,   Figure::RateCcdf,
                                         Figure::OutageCcdf};

inline std::string_view to_string(Figure f) noexcept
{
    switch (f) {
    case Figure::AseVsLoad: return "ase_vs_load";
    case Figure::AseVsSpreading: return "ase_vs_spreading";
    case Figure::AseVsRbs: return "ase_vs_rbs";
    case Figure::AseVsDmax: return "ase_vs_dmax";
    case Figure::DenialVsDmax: return "denial_vs_dmax";
    case Figure::RateCcdf: return "rate_ccdf";
    case Figure::OutageCcdf: return "outage_ccdf";
    }
    return "?";
}

inline Figure parse_figure(std::string_view name)
{
    for (auto f : kAllFigures)
        if (to_string(f) == name)
            return f;
    throw std::invalid_argument("unknown figure id '" + std::string(name) + "'");
}

namespace detail {

inline std::optional<SweepVariable> figure_sweep(Figure f)
{
    switch (f) {
    case Figure::AseVsLoad: return SweepVariable::Load;
    case Figure::AseVsSpreading: return SweepVariable::SpreadingFactor;
    case Figure::AseVsRbs: return SweepVariable::BsExclusion;
    case Figure::AseVsDmax:
    case Figure::DenialVsDmax: return SweepVariable::MaxReselection;
    default: return std::nullopt;
    }
}

inline std::string series_label(const CampaignResult& c, std::string_view tail, bool prefix)
{
    if (!prefix || c.label.empty())
        return std::string(tail);
    return tail.empty() ? c.label : c.label + "_" + std::string(tail);
}

} // namespace detail

/// Figure-ready series. Sweep figures give one series per policy (per
/// campaign, when several are passed); denial_vs_dmax gives one per
/// campaign, since denial does not depend on the policy. Ccdf figures
/// require campaigns without a sweep.
inline std::vector<Series> export_series(std::span<const CampaignResult> campaigns, Figure figure)
{
    if (campaigns.empty())
        throw std::invalid_argument("export_series: empty campaign");
    const bool prefix = campaigns.size() > 1;
    std::vector<Series> out;
    for (std::size_t ci = 0; ci < campaigns.size(); ++ci) {
        const auto& c = campaigns[ci];
        if (c.records.empty())
            throw std::invalid_argument("export_series: empty campaign");
        const auto want = detail::figure_sweep(figure);
        if (want) {
            if (c.sweep != want)
                throw std::invalid_argument("export_series: " + std::string(to_string(figure)) +
                                            " needs a campaign swept over " + std::string(to_string(*want)));
        } else if (c.sweep) {
            throw std::invalid_argument("export_series: ccdf figures need a campaign without a sweep");
        }

        if (figure == Figure::DenialVsDmax) {
            Series s;
            s.label = c.label.empty() ? (prefix ? "campaign_" + std::to_string(ci) : "denial") : c.label;
            const PolicyKind first = c.records.front().policy;
            for (const auto& r : c.records)
                if (r.policy == first)
                    s.points.emplace_back(*r.sweep_value, r.denial_probability);
            s.check_increasing();
            out.push_back(std::move(s));
            continue;
        }

        std::vector<PolicyKind> order;
        for (const auto& r : c.records)
            if (std::find(order.begin(), order.end(), r.policy) == order.end())
                order.push_back(r.policy);
        for (auto kind : order) {
            Series s;
            s.label = detail::series_label(c, to_string(kind), prefix);
            for (const auto& r : c.records) {
                if (r.policy != kind)
                    continue;
                if (want) {
                    s.points.emplace_back(*r.sweep_value, r.mean_ase);
                } else {
                    const auto& x = figure == Figure::RateCcdf ? r.rate_grid : r.outage_grid;
                    const auto& y = figure == Figure::RateCcdf ? r.rate_ccdf : r.outage_ccdf;
                    for (std::size_t k = 0; k < x.size(); ++k)
                        s.points.emplace_back(x[k], y[k]);
                }
            }
            s.check_increasing();
            out.push_back(std::move(s));
        }
    }
    return out;
}

inline void write_series_csv(const std::filesystem::path& path, const Series& s)
{
    std::ofstream os(path);
    if (!os)
        throw std::runtime_error("cannot write " + path.string());
    os << "x,y\n";
    for (const auto& [x, y] : s.points)
        os << fmt12(x) << ',' << fmt12(y) << '\n';
}

/// Writes `<figure>_<label>.csv` per series into `dir`; returns the paths.
inline std::vector<std::filesystem::path> write_figure(const std::filesystem::path& dir, Figure figure,
                                                       const std::vector<Series>& series)
{
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> paths;
    for (const auto& s : series) {
        paths.push_back(dir / (std::string(to_string(figure)) + "_" + s.label + ".csv"));
        write_series_csv(paths.back(), s);
    }
    return paths;
}

} // namespace cdma
