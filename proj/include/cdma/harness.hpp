#pragma once

#include "cdma/association.hpp"
#include "cdma/channel.hpp"
#include "cdma/metrics.hpp"
#include "cdma/outage.hpp"
#include "cdma/policy.hpp"
#include "cdma/power.hpp"
#include "cdma/random.hpp"
#include "cdma/spatial.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace cdma {

inline constexpr const char* kCodeVersion = "cdma-uplink 1.0.0";

enum class SweepVariable { Load, SpreadingFactor, BsExclusion, MaxReselection };

inline std::string_view to_string(SweepVariable v) noexcept
{
    switch (v) {
    case SweepVariable::Load: return "load";
    case SweepVariable::SpreadingFactor: return "spreading_factor";
    case SweepVariable::BsExclusion: return "bs_exclusion";
    case SweepVariable::MaxReselection: return "d_max";
    }
    return "?";
}

inline SweepVariable parse_sweep_variable(std::string_view name)
{
    for (auto v : {SweepVariable::Load, SweepVariable::SpreadingFactor, SweepVariable::BsExclusion,
                   SweepVariable::MaxReselection})
        if (to_string(v) == name)
            return v;
    throw std::invalid_argument("unknown sweep variable '" + std::string(name) +
                                "' (expected load, spreading_factor, bs_exclusion or d_max)");
}

struct Sweep
{
    SweepVariable variable = SweepVariable::Load;
    std::vector<double> values;
};

struct CampaignConfig
{
    SpatialParams spatial;
    double sector_offset = 0.0;
    ChannelParams channel;
    std::vector<PolicyConfig> policies = default_policies();
    std::optional<std::size_t> capacity; // defaults to the spreading factor
    double d_max = 0.0;
    double activity = 1.0;
    std::size_t trials = 1000;
    std::uint64_t master_seed = 1;
    unsigned threads = 0; // 0: hardware concurrency
    std::optional<Sweep> sweep;
    std::string output_dir;
    bool write_uplinks = true;
    std::optional<Topology> topology;

    static std::vector<PolicyConfig> default_policies()
    {
        std::vector<PolicyConfig> out;
        for (auto k : kAllPolicies) {
            PolicyConfig p;
            p.kind = k;
            out.push_back(p);
        }
        return out;
    }

    std::size_t effective_capacity() const { return capacity ? *capacity : channel.spreading_factor; }
    double load() const
    {
        return static_cast<double>(spatial.num_mobiles) / static_cast<double>(spatial.num_bs);
    }

    void validate() const
    {
        spatial.validate();
        channel.validate();
        if (channel.d0 != spatial.far_field)
            throw std::invalid_argument("config: channel d0 and spatial far_field disagree");
        if (policies.empty())
            throw std::invalid_argument("config: no policy selected");
        for (const auto& p : policies)
            p.validate();
        if (effective_capacity() < 1)
            throw std::invalid_argument("config: capacity must be at least 1");
        if (!(d_max >= 0.0))
            throw std::invalid_argument("config: d_max must be non-negative");
        if (!(activity >= 0.0 && activity <= 1.0))
            throw std::invalid_argument("config: activity must lie in [0, 1]");
        if (trials < 1)
            throw std::invalid_argument("config: trials must be at least 1");
        if (topology) {
            if (topology->bs_positions.empty())
                throw std::invalid_argument("config: topology has no base stations");
            if (sweep && (sweep->variable == SweepVariable::Load || sweep->variable == SweepVariable::BsExclusion) &&
                topology->mobile_positions)
                throw std::invalid_argument("config: cannot sweep load or bs_exclusion over a fixed topology");
        }
        if (sweep) {
            if (sweep->values.empty())
                throw std::invalid_argument("config: sweep has no values");
            for (double v : sweep->values) {
                const bool ok = [&] {
                    switch (sweep->variable) {
                    case SweepVariable::Load: return v > 0.0;
                    case SweepVariable::SpreadingFactor: return v >= 1.0 && std::floor(v) == v;
                    case SweepVariable::BsExclusion: return v > 0.0 && v < 2.0 * spatial.net_radius;
                    case SweepVariable::MaxReselection: return v >= 0.0;
                    }
                    return false;
                }();
                if (!ok)
                    throw std::invalid_argument("config: invalid " + std::string(to_string(sweep->variable)) +
                                                " sweep value " + std::to_string(v));
            }
        }
    }

    /// Configuration with the sweep variable pinned to `value`.
    CampaignConfig at_sweep_point(double value) const
    {
        if (!sweep)
            throw std::logic_error("at_sweep_point: configuration has no sweep");
        CampaignConfig c = *this;
        c.sweep.reset();
        switch (sweep->variable) {
        case SweepVariable::Load:
            c.spatial.num_mobiles = static_cast<std::size_t>(std::llround(value * static_cast<double>(spatial.num_bs)));
            break;
        case SweepVariable::SpreadingFactor:
            c.channel.spreading_factor = static_cast<unsigned>(value);
            break;
        case SweepVariable::BsExclusion:
            c.spatial.bs_exclusion = value;
            break;
        case SweepVariable::MaxReselection:
            c.d_max = value;
            break;
        }
        return c;
    }
};

/// Realization, association and prepared served uplinks of one trial.
struct TrialSetup
{
    NetworkRealization realization;
    AssociationState association;
    std::vector<UplinkInstance> uplinks; // served mobiles, ascending id
    std::vector<PreparedUplink> links;
};

inline NetworkRealization draw_realization(const CampaignConfig& config, std::size_t trial_index)
{
    auto rng = stream_for(config.master_seed, trial_index);
    try {
        if (config.topology)
            return realize_topology(*config.topology, config.spatial, config.channel.shadow_std_db, rng,
                                    config.sector_offset);
        return generate_realization(config.spatial, config.channel.shadow_std_db, rng, config.sector_offset);
    } catch (const PlacementInfeasible& e) {
        throw PlacementInfeasible("trial " + std::to_string(trial_index) + ": " + e.what());
    }
}

inline TrialSetup setup_trial(const CampaignConfig& config, std::size_t trial_index)
{
    TrialSetup t;
    t.realization = draw_realization(config, trial_index);
    const auto& ch = config.channel;
    t.association = associate(t.realization, ch.alpha, ch.d0);
    resolve_overload(t.association, t.realization, config.effective_capacity(), config.d_max, ch.alpha, ch.d0);
    for (MobileId i = 0; i < t.realization.num_mobiles(); ++i) {
        if (!t.association.serving[i])
            continue;
        t.uplinks.push_back(omega_vector(t.realization, t.association, i, ch, config.spatial.bs_exclusion,
                                         config.activity));
        t.links.push_back(prepare(t.uplinks.back()));
    }
    return t;
}

struct TrialResult
{
    std::size_t trial_index = 0;
    std::vector<TrialSummary> per_policy; // aligned with config.policies
};

/// One Monte Carlo trial under every configured policy. Deterministic in
/// (master_seed, trial_index).
inline TrialResult run_trial(const CampaignConfig& config, std::size_t trial_index)
{
    const TrialSetup t = setup_trial(config, trial_index);
    const std::size_t M = t.realization.num_mobiles();
    TrialResult r;
    r.trial_index = trial_index;
    for (const auto& policy : config.policies)
        r.per_policy.push_back(trial_metrics(allocate_rates(t.links, M, policy), M, config.spatial.net_radius));
    return r;
}

inline TrialSummary run_trial(const CampaignConfig& config, std::size_t trial_index, const PolicyConfig& policy)
{
    CampaignConfig c = config;
    c.policies = {policy};
    return std::move(run_trial(c, trial_index).per_policy.front());
}

// ---------------------------------------------------------------------------
// Campaign

inline std::vector<double> outage_ccdf_grid() { return uniform_grid(0.0, 1.0, 0.01); }
inline std::vector<double> rate_ccdf_grid(const RateSearch& s) { return uniform_grid(s.r_min, s.r_max, 0.05); }

struct PolicyAggregate
{
    std::optional<double> sweep_value;
    PolicyKind policy = PolicyKind::OCVR;
    std::size_t trials = 0;
    std::size_t num_mobiles = 0;
    double load = 0.0;
    double spreading_factor = 0.0;
    double bs_exclusion = 0.0;
    double d_max = 0.0;
    double mean_outage = 0.0;
    double mean_throughput = 0.0;
    double mean_ase = 0.0;
    double ase_std_error = 0.0;
    double mean_rate = 0.0;
    double denial_probability = 0.0;
    double max_outage = 0.0;
    std::vector<double> outage_grid, outage_ccdf;
    std::vector<double> rate_grid, rate_ccdf;
};

struct CampaignResult
{
    std::optional<SweepVariable> sweep;
    std::vector<PolicyAggregate> records; // sweep-point major, policy minor
    nlohmann::json provenance;
    std::string label;
};

/// Rounds to 12 significant digits, the precision of every emitted number.
inline double round12(double v)
{
    if (!std::isfinite(v) || v == 0.0)
        return v;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return std::strtod(buf, nullptr);
}

inline std::string fmt12(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

namespace detail {

struct Reducer
{
    PolicyAggregate agg;
    double sum_ase2 = 0.0;
    CcdfAccumulator outage;
    CcdfAccumulator rate;

    void add(const TrialSummary& s)
    {
        ++agg.trials;
        agg.mean_outage += s.mean_outage;
        agg.mean_throughput += s.mean_throughput;
        agg.mean_ase += s.area_spectral_efficiency;
        sum_ase2 += s.area_spectral_efficiency * s.area_spectral_efficiency;
        agg.mean_rate += s.mean_rate;
        agg.denial_probability += s.denial_fraction();
        agg.max_outage = std::max(agg.max_outage, s.max_outage);
        for (const auto& a : s.per_uplink) {
            if (!a.served)
                continue;
            outage.add(a.epsilon);
            rate.add(a.rate);
        }
    }

    PolicyAggregate finish()
    {
        const double n = static_cast<double>(agg.trials);
        agg.mean_outage /= n;
        agg.mean_throughput /= n;
        agg.mean_ase /= n;
        agg.mean_rate /= n;
        agg.denial_probability /= n;
        if (agg.trials > 1) {
            const double var = std::max(0.0, (sum_ase2 - n * agg.mean_ase * agg.mean_ase) / (n - 1.0));
            agg.ase_std_error = std::sqrt(var / n);
        }
        agg.outage_grid = outage.grid();
        agg.outage_ccdf = outage.curve();
        agg.rate_grid = rate.grid();
        agg.rate_ccdf = rate.curve();
        return agg;
    }
};

inline std::string point_label(const CampaignConfig& config, std::optional<double> value, PolicyKind kind)
{
    std::string s;
    if (config.sweep && value)
        s = std::string(to_string(config.sweep->variable)) + "_" + fmt12(*value) + "_";
    return s + std::string(to_string(kind));
}

inline void write_uplink_header(std::ostream& os)
{
    os << "trial,mobile,sector,served,rate,beta,epsilon,throughput\n";
}

inline void write_uplink_rows(std::ostream& os, std::size_t trial, const TrialSummary& s)
{
    for (const auto& a : s.per_uplink) {
        os << trial << ',' << a.mobile << ',';
        if (a.sector)
            os << *a.sector;
        else
            os << -1;
        os << ',' << (a.served ? 1 : 0) << ',' << fmt12(a.rate) << ',' << fmt12(a.beta) << ','
           << fmt12(a.epsilon) << ',' << fmt12(a.throughput) << '\n';
    }
}

inline void write_ccdf(const std::filesystem::path& path, const std::vector<double>& grid,
                       const std::vector<double>& curve)
{
    std::ofstream os(path);
    if (!os)
        throw std::runtime_error("cannot write " + path.string());
    os << "x,ccdf\n";
    for (std::size_t k = 0; k < grid.size(); ++k)
        os << fmt12(grid[k]) << ',' << fmt12(curve[k]) << '\n';
}

/// Runs `trials` trials on a worker pool, handing results to `consume` in
/// trial-index order. Chunking bounds memory held by per-uplink records.
template <class Consume>
void run_trials_ordered(const CampaignConfig& config, Consume&& consume)
{
    unsigned threads = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
    const std::size_t chunk = std::max<std::size_t>(64, 4 * static_cast<std::size_t>(threads));
    for (std::size_t base = 0; base < config.trials; base += chunk) {
        const std::size_t n = std::min(chunk, config.trials - base);
        std::vector<std::optional<TrialResult>> slots(n);
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        auto work = [&] {
            for (;;) {
                const std::size_t k = next.fetch_add(1);
                if (k >= n)
                    return;
                try {
                    slots[k] = run_trial(config, base + k);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure)
                        failure = std::current_exception();
                    next = n;
                    return;
                }
            }
        };
        const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(threads, n));
        if (workers <= 1) {
            work();
        } else {
            std::vector<std::thread> pool;
            pool.reserve(workers);
            for (unsigned w = 0; w < workers; ++w)
                pool.emplace_back(work);
            for (auto& t : pool)
                t.join();
        }
        if (failure)
            std::rethrow_exception(failure);
        for (auto& s : slots)
            consume(std::move(*s));
    }
}

} // namespace detail

inline nlohmann::json to_json(const CampaignConfig& config);
inline nlohmann::json to_json(const CampaignResult& result);

/// Runs every sweep point (or the single configured point) and aggregates
/// per policy. Writes summary.json, per-combination uplinks.csv and ccdf
/// files when config.output_dir is set.
inline CampaignResult run_campaign(const CampaignConfig& config)
{
    config.validate();
    namespace fs = std::filesystem;

    CampaignResult result;
    if (config.sweep)
        result.sweep = config.sweep->variable;
    result.provenance = {{"code_version", kCodeVersion},
                         {"master_seed", config.master_seed},
                         {"trials", config.trials},
                         {"placement_failure_policy", "abort campaign"},
                         {"config", to_json(config)}};

    std::vector<std::optional<double>> points;
    if (config.sweep)
        points.assign(config.sweep->values.begin(), config.sweep->values.end());
    else
        points.push_back(std::nullopt);

    const bool write = !config.output_dir.empty();
    if (write)
        fs::create_directories(config.output_dir);

    for (const auto& value : points) {
        const CampaignConfig point = value ? config.at_sweep_point(*value) : config;
        point.validate();

        std::vector<detail::Reducer> reducers(point.policies.size());
        std::vector<std::ofstream> uplink_files;
        std::vector<fs::path> dirs;
        for (std::size_t p = 0; p < point.policies.size(); ++p) {
            auto& r = reducers[p];
            r.agg.sweep_value = value;
            r.agg.policy = point.policies[p].kind;
            r.agg.num_mobiles = point.spatial.num_mobiles;
            r.agg.load = point.load();
            r.agg.spreading_factor = point.channel.spreading_factor;
            r.agg.bs_exclusion = point.spatial.bs_exclusion;
            r.agg.d_max = point.d_max;
            r.outage = CcdfAccumulator(outage_ccdf_grid());
            r.rate = CcdfAccumulator(rate_ccdf_grid(point.policies[p].search));
            if (write) {
                dirs.push_back(fs::path(config.output_dir) / detail::point_label(config, value, r.agg.policy));
                fs::create_directories(dirs.back());
                if (config.write_uplinks) {
                    uplink_files.emplace_back(dirs.back() / "uplinks.csv");
                    if (!uplink_files.back())
                        throw std::runtime_error("cannot write " + (dirs.back() / "uplinks.csv").string());
                    detail::write_uplink_header(uplink_files.back());
                }
            }
        }

        detail::run_trials_ordered(point, [&](TrialResult&& tr) {
            for (std::size_t p = 0; p < reducers.size(); ++p) {
                reducers[p].add(tr.per_policy[p]);
                if (!uplink_files.empty())
                    detail::write_uplink_rows(uplink_files[p], tr.trial_index, tr.per_policy[p]);
            }
        });

        for (std::size_t p = 0; p < reducers.size(); ++p) {
            result.records.push_back(reducers[p].finish());
            if (write) {
                const auto& rec = result.records.back();
                detail::write_ccdf(dirs[p] / "ccdf_outage.csv", rec.outage_grid, rec.outage_ccdf);
                detail::write_ccdf(dirs[p] / "ccdf_rate.csv", rec.rate_grid, rec.rate_ccdf);
            }
        }
    }

    if (write) {
        std::ofstream os(std::filesystem::path(config.output_dir) / "summary.json");
        os << to_json(result).dump(2) << '\n';
        if (!os)
            throw std::runtime_error("cannot write summary.json");
    }
    return result;
}

// ---------------------------------------------------------------------------
// JSON serialization

namespace detail {

inline void reject_unknown(const nlohmann::json& j, std::initializer_list<std::string_view> keys,
                           std::string_view where)
{
    if (!j.is_object())
        throw std::invalid_argument(std::string(where) + ": expected an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (std::find(keys.begin(), keys.end(), it.key()) == keys.end())
            throw std::invalid_argument(std::string(where) + ": unknown key '" + it.key() + "'");
    }
}

template <class T>
void read_if(const nlohmann::json& j, const char* key, T& out)
{
    if (j.contains(key) && !j.at(key).is_null())
        out = j.at(key).get<T>();
}

inline std::vector<Point2D> read_points(const nlohmann::json& j, std::string_view where)
{
    std::vector<Point2D> pts;
    for (const auto& p : j) {
        if (p.is_array() && p.size() == 2)
            pts.push_back({p[0].get<double>(), p[1].get<double>()});
        else if (p.is_object())
            pts.push_back({p.at("x").get<double>(), p.at("y").get<double>()});
        else
            throw std::invalid_argument(std::string(where) + ": points must be [x, y] or {x, y}");
    }
    return pts;
}

inline nlohmann::json write_points(const std::vector<Point2D>& pts)
{
    auto arr = nlohmann::json::array();
    for (const auto& p : pts)
        arr.push_back({p.x, p.y});
    return arr;
}

inline FadingModel read_fading(const nlohmann::json& j)
{
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "rayleigh")
            return FadingModel::rayleigh();
        if (s == "distance_dependent")
            return FadingModel::distance_dependent();
        throw std::invalid_argument("channel.fading: unknown model '" + s + "'");
    }
    reject_unknown(j, {"fixed_m", "interferer_m"}, "channel.fading");
    std::optional<double> im;
    if (j.contains("interferer_m"))
        im = j.at("interferer_m").get<double>();
    return FadingModel::fixed(j.at("fixed_m").get<double>(), im);
}

inline nlohmann::json write_fading(const FadingModel& f)
{
    switch (f.kind) {
    case FadingKind::Rayleigh: return "rayleigh";
    case FadingKind::DistanceDependent: return "distance_dependent";
    case FadingKind::Fixed: {
        nlohmann::json j{{"fixed_m", f.m}};
        if (f.interferer_m)
            j["interferer_m"] = *f.interferer_m;
        return j;
    }
    }
    return nullptr;
}

} // namespace detail

inline Topology topology_from_json(const nlohmann::json& j)
{
    detail::reject_unknown(j, {"base_stations", "mobiles"}, "topology");
    Topology t;
    t.bs_positions = detail::read_points(j.at("base_stations"), "topology.base_stations");
    if (j.contains("mobiles"))
        t.mobile_positions = detail::read_points(j.at("mobiles"), "topology.mobiles");
    return t;
}

inline nlohmann::json read_json_file(const std::filesystem::path& path)
{
    std::ifstream is(path);
    if (!is)
        throw std::runtime_error("cannot open " + path.string());
    try {
        return nlohmann::json::parse(is);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(path.string() + ": " + e.what());
    }
}

/// Parses a campaign configuration; relative topology_file paths resolve
/// against `base_dir`. Unknown keys are rejected.
inline CampaignConfig campaign_config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {})
{
    using detail::read_if;
    detail::reject_unknown(j,
                           {"spatial", "channel", "policies", "outage_constraint", "rate_search", "rate_ladder",
                            "capacity", "d_max", "activity", "trials", "master_seed", "threads", "sweep",
                            "output_dir", "write_uplinks", "topology", "topology_file"},
                           "config");
    CampaignConfig c;
    if (j.contains("spatial")) {
        const auto& s = j.at("spatial");
        detail::reject_unknown(s,
                               {"num_bs", "num_mobiles", "net_radius", "bs_exclusion", "mobile_exclusion",
                                "far_field", "sector_offset"},
                               "spatial");
        read_if(s, "num_bs", c.spatial.num_bs);
        read_if(s, "num_mobiles", c.spatial.num_mobiles);
        read_if(s, "net_radius", c.spatial.net_radius);
        read_if(s, "bs_exclusion", c.spatial.bs_exclusion);
        read_if(s, "mobile_exclusion", c.spatial.mobile_exclusion);
        read_if(s, "far_field", c.spatial.far_field);
        read_if(s, "sector_offset", c.sector_offset);
    }
    c.channel.d0 = c.spatial.far_field;
    if (j.contains("channel")) {
        const auto& ch = j.at("channel");
        detail::reject_unknown(ch, {"alpha", "snr_db", "shadow_std_db", "chip_factor", "spreading_factor", "fading"},
                               "channel");
        read_if(ch, "alpha", c.channel.alpha);
        if (ch.contains("snr_db"))
            c.channel.snr_gamma = db_to_linear(ch.at("snr_db").get<double>());
        read_if(ch, "shadow_std_db", c.channel.shadow_std_db);
        read_if(ch, "chip_factor", c.channel.chip_factor);
        read_if(ch, "spreading_factor", c.channel.spreading_factor);
        if (ch.contains("fading"))
            c.channel.fading = detail::read_fading(ch.at("fading"));
    }

    PolicyConfig base;
    read_if(j, "outage_constraint", base.outage_constraint);
    if (j.contains("rate_search")) {
        const auto& r = j.at("rate_search");
        detail::reject_unknown(r, {"r_min", "r_max", "grid_step", "tolerance"}, "rate_search");
        read_if(r, "r_min", base.search.r_min);
        read_if(r, "r_max", base.search.r_max);
        read_if(r, "grid_step", base.search.grid_step);
        read_if(r, "tolerance", base.search.tolerance);
    }
    read_if(j, "rate_ladder", base.rate_ladder);
    std::vector<PolicyKind> kinds;
    if (j.contains("policies")) {
        const auto& p = j.at("policies");
        if (p.is_string())
            kinds.push_back(parse_policy(p.get<std::string>()));
        else
            for (const auto& name : p)
                kinds.push_back(parse_policy(name.get<std::string>()));
    } else {
        kinds.assign(std::begin(kAllPolicies), std::end(kAllPolicies));
    }
    c.policies.clear();
    for (auto k : kinds) {
        PolicyConfig pc = base;
        pc.kind = k;
        c.policies.push_back(pc);
    }

    if (j.contains("capacity") && !j.at("capacity").is_null())
        c.capacity = j.at("capacity").get<std::size_t>();
    read_if(j, "d_max", c.d_max);
    read_if(j, "activity", c.activity);
    read_if(j, "trials", c.trials);
    read_if(j, "master_seed", c.master_seed);
    read_if(j, "threads", c.threads);
    read_if(j, "output_dir", c.output_dir);
    read_if(j, "write_uplinks", c.write_uplinks);
    if (j.contains("sweep") && !j.at("sweep").is_null()) {
        const auto& s = j.at("sweep");
        detail::reject_unknown(s, {"variable", "values"}, "sweep");
        c.sweep = Sweep{parse_sweep_variable(s.at("variable").get<std::string>()),
                        s.at("values").get<std::vector<double>>()};
    }
    if (j.contains("topology") && j.contains("topology_file"))
        throw std::invalid_argument("config: give either topology or topology_file, not both");
    if (j.contains("topology"))
        c.topology = topology_from_json(j.at("topology"));
    if (j.contains("topology_file")) {
        std::filesystem::path p = j.at("topology_file").get<std::string>();
        if (p.is_relative())
            p = base_dir / p;
        c.topology = topology_from_json(read_json_file(p));
    }
    if (c.topology)
        c.spatial.num_bs = c.topology->bs_positions.size();
    if (c.topology && c.topology->mobile_positions)
        c.spatial.num_mobiles = c.topology->mobile_positions->size();
    c.validate();
    return c;
}

inline CampaignConfig load_campaign_config(const std::filesystem::path& path)
{
    return campaign_config_from_json(read_json_file(path), path.parent_path());
}

inline nlohmann::json to_json(const CampaignConfig& c)
{
    nlohmann::json j;
    j["spatial"] = {{"num_bs", c.spatial.num_bs},
                    {"num_mobiles", c.spatial.num_mobiles},
                    {"net_radius", c.spatial.net_radius},
                    {"bs_exclusion", c.spatial.bs_exclusion},
                    {"mobile_exclusion", c.spatial.mobile_exclusion},
                    {"far_field", c.spatial.far_field},
                    {"sector_offset", c.sector_offset}};
    j["channel"] = {{"alpha", c.channel.alpha},
                    {"snr_db", round12(linear_to_db(c.channel.snr_gamma))},
                    {"shadow_std_db", c.channel.shadow_std_db},
                    {"chip_factor", c.channel.chip_factor},
                    {"spreading_factor", c.channel.spreading_factor},
                    {"fading", detail::write_fading(c.channel.fading)}};
    auto names = nlohmann::json::array();
    for (const auto& p : c.policies)
        names.push_back(std::string(to_string(p.kind)));
    j["policies"] = names;
    const PolicyConfig& p0 = c.policies.front();
    j["outage_constraint"] = p0.outage_constraint;
    j["rate_search"] = {{"r_min", p0.search.r_min},
                        {"r_max", p0.search.r_max},
                        {"grid_step", p0.search.grid_step},
                        {"tolerance", p0.search.tolerance}};
    j["rate_ladder"] = p0.rate_ladder;
    j["capacity"] = c.capacity ? nlohmann::json(*c.capacity) : nlohmann::json(nullptr);
    j["d_max"] = c.d_max;
    j["activity"] = c.activity;
    j["trials"] = c.trials;
    j["master_seed"] = c.master_seed;
    if (c.sweep)
        j["sweep"] = {{"variable", std::string(to_string(c.sweep->variable))}, {"values", c.sweep->values}};
    if (!c.output_dir.empty())
        j["output_dir"] = c.output_dir;
    j["write_uplinks"] = c.write_uplinks;
    if (c.topology) {
        nlohmann::json t{{"base_stations", detail::write_points(c.topology->bs_positions)}};
        if (c.topology->mobile_positions)
            t["mobiles"] = detail::write_points(*c.topology->mobile_positions);
        j["topology"] = t;
    }
    return j;
}

inline nlohmann::json to_json(const PolicyAggregate& a)
{
    auto r = [](double v) { return round12(v); };
    auto rv = [](const std::vector<double>& v) {
        std::vector<double> o(v.size());
        std::transform(v.begin(), v.end(), o.begin(), round12);
        return o;
    };
    nlohmann::json j{{"policy", std::string(to_string(a.policy))},
                     {"trials", a.trials},
                     {"num_mobiles", a.num_mobiles},
                     {"load", r(a.load)},
                     {"spreading_factor", r(a.spreading_factor)},
                     {"bs_exclusion", r(a.bs_exclusion)},
                     {"d_max", r(a.d_max)},
                     {"mean_outage", r(a.mean_outage)},
                     {"mean_throughput", r(a.mean_throughput)},
                     {"mean_ase", r(a.mean_ase)},
                     {"ase_std_error", r(a.ase_std_error)},
                     {"mean_rate", r(a.mean_rate)},
                     {"denial_probability", r(a.denial_probability)},
                     {"max_outage", r(a.max_outage)},
                     {"outage_ccdf", {{"x", rv(a.outage_grid)}, {"ccdf", rv(a.outage_ccdf)}}},
                     {"rate_ccdf", {{"x", rv(a.rate_grid)}, {"ccdf", rv(a.rate_ccdf)}}}};
    j["sweep_value"] = a.sweep_value ? nlohmann::json(r(*a.sweep_value)) : nlohmann::json(nullptr);
    return j;
}

inline nlohmann::json to_json(const CampaignResult& res)
{
    nlohmann::json recs = nlohmann::json::array();
    for (const auto& a : res.records)
        recs.push_back(to_json(a));
    return {{"sweep_variable", res.sweep ? nlohmann::json(std::string(to_string(*res.sweep))) : nlohmann::json(nullptr)},
            {"records", recs},
            {"provenance", res.provenance}};
}

inline CampaignResult campaign_result_from_json(const nlohmann::json& j)
{
    CampaignResult res;
    if (!j.at("sweep_variable").is_null())
        res.sweep = parse_sweep_variable(j.at("sweep_variable").get<std::string>());
    res.provenance = j.value("provenance", nlohmann::json::object());
    for (const auto& r : j.at("records")) {
        PolicyAggregate a;
        a.policy = parse_policy(r.at("policy").get<std::string>());
        if (!r.at("sweep_value").is_null())
            a.sweep_value = r.at("sweep_value").get<double>();
        a.trials = r.at("trials").get<std::size_t>();
        a.num_mobiles = r.at("num_mobiles").get<std::size_t>();
        a.load = r.at("load").get<double>();
        a.spreading_factor = r.at("spreading_factor").get<double>();
        a.bs_exclusion = r.at("bs_exclusion").get<double>();
        a.d_max = r.at("d_max").get<double>();
        a.mean_outage = r.at("mean_outage").get<double>();
        a.mean_throughput = r.at("mean_throughput").get<double>();
        a.mean_ase = r.at("mean_ase").get<double>();
        a.ase_std_error = r.at("ase_std_error").get<double>();
        a.mean_rate = r.at("mean_rate").get<double>();
        a.denial_probability = r.at("denial_probability").get<double>();
        a.max_outage = r.at("max_outage").get<double>();
        a.outage_grid = r.at("outage_ccdf").at("x").get<std::vector<double>>();
        a.outage_ccdf = r.at("outage_ccdf").at("ccdf").get<std::vector<double>>();
        a.rate_grid = r.at("rate_ccdf").at("x").get<std::vector<double>>();
        a.rate_ccdf = r.at("rate_ccdf").at("ccdf").get<std::vector<double>>();
        res.records.push_back(std::move(a));
    }
    return res;
}

/// Reads an uplinks.csv file back into per-trial summaries, in file order.
inline std::vector<TrialSummary> read_uplinks_csv(const std::filesystem::path& path, double net_radius)
{
    std::ifstream is(path);
    if (!is)
        throw std::runtime_error("cannot open " + path.string());
    std::string line;
    if (!std::getline(is, line) || line != "trial,mobile,sector,served,rate,beta,epsilon,throughput")
        throw std::invalid_argument(path.string() + ": unexpected header");
    std::vector<TrialSummary> out;
    std::vector<RateAllocation> current;
    std::optional<std::size_t> trial;
    auto flush = [&] {
        if (trial) {
            const std::size_t M = current.size();
            out.push_back(trial_metrics(std::move(current), M, net_radius));
            current.clear();
        }
    };
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty())
            continue;
        std::size_t t = 0;
        long long sector = 0;
        int served = 0;
        RateAllocation a;
        if (std::sscanf(line.c_str(), "%zu,%zu,%lld,%d,%lf,%lf,%lf,%lf", &t, &a.mobile, &sector, &served, &a.rate,
                        &a.beta, &a.epsilon, &a.throughput) != 8)
            throw std::invalid_argument(path.string() + ":" + std::to_string(lineno) + ": malformed row");
        a.served = served != 0;
        if (sector >= 0)
            a.sector = static_cast<SectorId>(sector);
        if (!trial || *trial != t) {
            flush();
            trial = t;
        }
        current.push_back(a);
    }
    flush();
    return out;
}

// ---------------------------------------------------------------------------
// Single-link files for the `outage` subcommand

struct LinkFile
{
    UplinkInstance link;
    double beta = 0.0;
};

/// {"omega_r", "m_desired", "snr_db" | "snr_gamma", "beta" | "rate",
///  "interferers": [{"omega", "m", "p"}]}
inline LinkFile link_file_from_json(const nlohmann::json& j)
{
    detail::reject_unknown(j, {"omega_r", "m_desired", "snr_db", "snr_gamma", "beta", "rate", "interferers"},
                           "link");
    LinkFile f;
    auto& l = f.link;
    l.omega_r = j.at("omega_r").get<double>();
    const double m0 = j.value("m_desired", 1.0);
    if (!(m0 >= 1.0) || std::floor(m0) != m0)
        throw std::invalid_argument("link: m_desired must be a positive integer");
    l.m_desired = static_cast<unsigned>(m0);
    if (j.contains("snr_db") == j.contains("snr_gamma"))
        throw std::invalid_argument("link: give exactly one of snr_db or snr_gamma");
    l.snr_gamma = j.contains("snr_db") ? db_to_linear(j.at("snr_db").get<double>()) : j.at("snr_gamma").get<double>();
    if (j.contains("beta") == j.contains("rate"))
        throw std::invalid_argument("link: give exactly one of beta or rate");
    f.beta = j.contains("beta") ? j.at("beta").get<double>() : rate_to_threshold(j.at("rate").get<double>());
    // slot 0 is the reference mobile
    l.reference_mobile = 0;
    l.omega.push_back(0.0);
    l.m_interferers.push_back(1.0);
    l.activity.push_back(1.0);
    for (const auto& it : j.value("interferers", nlohmann::json::array())) {
        detail::reject_unknown(it, {"omega", "m", "p"}, "link.interferers");
        l.omega.push_back(it.at("omega").get<double>());
        l.m_interferers.push_back(it.value("m", 1.0));
        l.activity.push_back(it.value("p", 1.0));
    }
    l.validate();
    return f;
}

} // namespace cdma
