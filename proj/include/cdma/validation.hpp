#pragma once

#include "cdma/oracle.hpp"
#include "cdma/outage.hpp"
#include "cdma/random.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <random>
#include <thread>
#include <vector>

namespace cdma {

/// Ranges for randomized kernel-vs-oracle instances.
struct InstanceSpace
{
    std::size_t max_interferers = 20;
    std::vector<unsigned> desired_m{1, 2, 3};
    std::vector<double> interferer_m{0.7, 1.0, 2.0, 3.0};
    std::vector<double> activity{0.5, 1.0};
    double beta_lo = 0.1, beta_hi = 10.0;
    double snr_lo = 1.0, snr_hi = 100.0;
    double omega_lo = 0.005, omega_hi = 0.5;
};

struct RandomInstance
{
    UplinkInstance link;
    double beta = 0.0;
};

namespace detail {

template <class Rng>
double log_uniform(double lo, double hi, Rng& rng)
{
    std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
    return std::exp(u(rng));
}

template <class T, class Rng>
const T& pick(const std::vector<T>& v, Rng& rng)
{
    std::uniform_int_distribution<std::size_t> d(0, v.size() - 1);
    return v[d(rng)];
}

} // namespace detail

/// Mobile 0 is the reference; mobiles 1..n interfere.
template <class Rng>
RandomInstance random_instance(const InstanceSpace& space, Rng& rng)
{
    RandomInstance r;
    auto& l = r.link;
    std::uniform_int_distribution<std::size_t> count(0, space.max_interferers);
    const std::size_t n = count(rng);
    l.reference_mobile = 0;
    l.omega_r = 1.0;
    l.m_desired = detail::pick(space.desired_m, rng);
    l.snr_gamma = detail::log_uniform(space.snr_lo, space.snr_hi, rng);
    l.omega.assign(1, 0.0);
    l.m_interferers.assign(1, 1.0);
    l.activity.assign(1, 1.0);
    for (std::size_t k = 0; k < n; ++k) {
        l.omega.push_back(detail::log_uniform(space.omega_lo, space.omega_hi, rng));
        l.m_interferers.push_back(detail::pick(space.interferer_m, rng));
        l.activity.push_back(detail::pick(space.activity, rng));
    }
    r.beta = detail::log_uniform(space.beta_lo, space.beta_hi, rng);
    return r;
}

struct ValidationCase
{
    RandomInstance instance;
    double closed_form = 0.0;
    OracleEstimate oracle;
    double z_score = 0.0; // |closed - oracle| / max(se, 1/draws)
};

struct ValidationReport
{
    std::vector<ValidationCase> cases;
    double max_z = 0.0;
    std::size_t worst = 0;

    bool within(double z) const noexcept { return max_z <= z; }
};

inline constexpr std::uint64_t kValidationDomain = 0x76616c6964617465ull;

/// Compares the closed-form kernel with the oracle on `instances` random
/// instances. The standard error is floored at 1/draws so an instance whose
/// estimate is exactly 0 or 1 is still judged on a finite scale.
inline ValidationReport validate_kernel(std::size_t instances, std::size_t draws, std::uint64_t seed,
                                        unsigned threads = 0, const InstanceSpace& space = {})
{
    ValidationReport rep;
    rep.cases.resize(instances);
    auto gen = stream_for(seed, 0, kValidationDomain);
    for (auto& c : rep.cases)
        c.instance = random_instance(space, gen);

    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t k; (k = next.fetch_add(1)) < instances;) {
            auto& c = rep.cases[k];
            auto rng = stream_for(seed, k + 1, kValidationDomain);
            c.closed_form = outage_probability(c.instance.link, c.instance.beta);
            c.oracle = estimate_outage_mc(c.instance.link, c.instance.beta, draws, rng);
            const double se = std::max(c.oracle.std_error, 1.0 / static_cast<double>(draws));
            c.z_score = std::abs(c.closed_form - c.oracle.epsilon_hat) / se;
        }
    };
    if (threads == 0)
        threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(instances, 1)));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t)
        pool.emplace_back(work);
    work();
    for (auto& t : pool)
        t.join();

    for (std::size_t k = 0; k < instances; ++k) {
        if (rep.cases[k].z_score > rep.max_z) {
            rep.max_z = rep.cases[k].z_score;
            rep.worst = k;
        }
    }
    return rep;
}

} // namespace cdma
