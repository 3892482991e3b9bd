#include "cdma/harness.hpp"
#include "cdma/plotdata.hpp"
#include "cdma/validation.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

int cmd_run(const std::string& config_path, std::optional<std::size_t> trials, std::optional<std::uint64_t> seed,
            std::optional<std::string> output_dir, std::optional<unsigned> threads)
{
    auto cfg = cdma::load_campaign_config(config_path);
    if (trials)
        cfg.trials = *trials;
    if (seed)
        cfg.master_seed = *seed;
    if (output_dir)
        cfg.output_dir = *output_dir;
    if (threads)
        cfg.threads = *threads;
    if (cfg.output_dir.empty())
        cfg.output_dir = "results";
    const auto res = cdma::run_campaign(cfg);

    std::printf("%-10s %-6s %10s %10s %10s %10s %10s\n", "point", "policy", "outage", "rate", "throughput", "ase",
                "denial");
    for (const auto& r : res.records) {
        const std::string point = r.sweep_value ? cdma::fmt12(*r.sweep_value) : "-";
        std::printf("%-10s %-6s %10.4f %10.4f %10.4f %10.4f %10.4f\n", point.c_str(),
                    std::string(cdma::to_string(r.policy)).c_str(), r.mean_outage, r.mean_rate, r.mean_throughput,
                    r.mean_ase, r.denial_probability);
    }
    std::printf("wrote %s\n", (fs::path(cfg.output_dir) / "summary.json").string().c_str());
    return 0;
}

int cmd_outage(const std::string& input)
{
    const auto f = cdma::link_file_from_json(cdma::read_json_file(input));
    std::printf("%.12g\n", cdma::outage_probability(f.link, f.beta));
    return 0;
}

int cmd_validate(std::size_t instances, std::size_t draws, std::uint64_t seed, unsigned threads, double z_limit)
{
    const auto rep = cdma::validate_kernel(instances, draws, seed, threads);
    for (std::size_t k = 0; k < rep.cases.size(); ++k) {
        const auto& c = rep.cases[k];
        std::printf("%4zu m0=%u n=%zu beta=%.4g closed=%.6f oracle=%.6f se=%.2e z=%.2f\n", k,
                    c.instance.link.m_desired, c.instance.link.omega.size() - 1, c.instance.beta, c.closed_form,
                    c.oracle.epsilon_hat, c.oracle.std_error, c.z_score);
    }
    std::printf("max |closed - oracle| / se = %.3f (instance %zu)\n", rep.max_z, rep.worst);
    return rep.within(z_limit) ? 0 : 1;
}

int cmd_rate_sweep(const std::string& config_path, std::size_t trial, double step, const std::string& output_dir,
                   const std::vector<std::size_t>& select)
{
    const auto cfg = cdma::load_campaign_config(config_path);
    const auto setup = cdma::setup_trial(cfg, trial);
    const auto& search = cfg.policies.front().search;
    const auto grid = cdma::uniform_grid(search.r_min, search.r_max, step);
    const auto sweep = cdma::rate_sweep(setup.links, setup.realization.num_mobiles(), grid, select);

    std::vector<cdma::Series> all{sweep.mean_outage, sweep.mean_throughput};
    all.insert(all.end(), sweep.uplink_outage.begin(), sweep.uplink_outage.end());
    all.insert(all.end(), sweep.uplink_throughput.begin(), sweep.uplink_throughput.end());
    fs::create_directories(output_dir);
    for (const auto& s : all)
        cdma::write_series_csv(fs::path(output_dir) / ("rate_sweep_" + s.label + ".csv"), s);

    const auto& pts = sweep.mean_throughput.points;
    auto best = std::max_element(pts.begin(), pts.end(), [](auto& a, auto& b) { return a.second < b.second; });
    std::printf("served uplinks: %zu of %zu\n", setup.links.size(), setup.realization.num_mobiles());
    std::printf("peak mean throughput %.6f at R = %.4f (grid step %.4g)\n", best->second, best->first, step);
    return 0;
}

int cmd_export(const std::vector<std::string>& summaries, const std::vector<std::string>& labels,
               const std::string& figure, const std::string& output_dir)
{
    if (!labels.empty() && labels.size() != summaries.size())
        throw std::invalid_argument("export: give one --label per --summary");
    std::vector<cdma::CampaignResult> campaigns;
    for (std::size_t k = 0; k < summaries.size(); ++k) {
        auto c = cdma::campaign_result_from_json(cdma::read_json_file(summaries[k]));
        c.label = labels.empty() ? fs::path(summaries[k]).parent_path().filename().string() : labels[k];
        campaigns.push_back(std::move(c));
    }
    const auto fig = cdma::parse_figure(figure);
    for (const auto& p : cdma::write_figure(output_dir, fig, cdma::export_series(campaigns, fig)))
        std::printf("wrote %s\n", p.string().c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"DS-CDMA cellular uplink simulator with closed-form Nakagami outage"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::size_t> trials;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> output_dir;
    std::optional<unsigned> threads;
    auto* run = app.add_subcommand("run", "Run a Monte Carlo campaign");
    run->add_option("--config", config_path, "Campaign configuration (JSON)")->required()->check(CLI::ExistingFile);
    run->add_option("--trials", trials, "Override the number of trials");
    run->add_option("--seed", seed, "Override the master seed");
    run->add_option("--output-dir", output_dir, "Output directory");
    run->add_option("--threads", threads, "Worker threads (0: hardware)");

    std::string link_input;
    auto* outage = app.add_subcommand("outage", "Evaluate the closed-form outage of one link");
    outage->add_option("--input", link_input, "Link file (JSON)")->required()->check(CLI::ExistingFile);

    std::size_t instances = 200;
    std::size_t draws = 1000000;
    std::uint64_t vseed = 1;
    unsigned vthreads = 0;
    double z_limit = 4.0;
    auto* validate = app.add_subcommand("validate", "Compare the kernel with the Monte Carlo oracle");
    validate->add_option("--instances", instances, "Random instances")->capture_default_str();
    validate->add_option("--draws", draws, "Oracle draws per instance")->capture_default_str();
    validate->add_option("--seed", vseed, "Seed")->capture_default_str();
    validate->add_option("--threads", vthreads, "Worker threads (0: hardware)");
    validate->add_option("--z-limit", z_limit, "Failure threshold in standard errors")->capture_default_str();

    std::string sweep_config;
    std::size_t sweep_trial = 0;
    double sweep_step = 0.05;
    std::string sweep_out = "rate_sweep";
    std::vector<std::size_t> select;
    auto* rsweep = app.add_subcommand("rate-sweep", "Outage and throughput versus a common rate for one trial");
    rsweep->add_option("--config", sweep_config, "Campaign configuration (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    rsweep->add_option("--trial", sweep_trial, "Trial index")->capture_default_str();
    rsweep->add_option("--step", sweep_step, "Rate grid step")->capture_default_str();
    rsweep->add_option("--select", select, "Indices of served uplinks to trace individually");
    rsweep->add_option("--output-dir", sweep_out, "Output directory")->capture_default_str();

    std::vector<std::string> summaries;
    std::vector<std::string> labels;
    std::string figure;
    std::string figures_out = "figures";
    auto* exp = app.add_subcommand("export", "Write figure series from campaign summaries");
    exp->add_option("--summary", summaries, "summary.json files")->required()->check(CLI::ExistingFile);
    exp->add_option("--label", labels, "Series label per summary (default: its directory name)");
    exp->add_option("--figure", figure, "Figure id")
        ->required()
        ->check(CLI::IsMember({"ase_vs_load", "ase_vs_spreading", "ase_vs_rbs", "ase_vs_dmax", "denial_vs_dmax",
                               "rate_ccdf", "outage_ccdf"}));
    exp->add_option("--output-dir", figures_out, "Output directory")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run)
            return cmd_run(config_path, trials, seed, output_dir, threads);
        if (*outage)
            return cmd_outage(link_input);
        if (*validate)
            return cmd_validate(instances, draws, vseed, vthreads, z_limit);
        if (*rsweep)
            return cmd_rate_sweep(sweep_config, sweep_trial, sweep_step, sweep_out, select);
        if (*exp)
            return cmd_export(summaries, labels, figure, figures_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
