#pragma once

#include "cdma/power.hpp"

#include <cmath>
#include <cstddef>
#include <random>
#include <stdexcept>
#include <vector>

namespace cdma {

struct OracleEstimate
{
    double epsilon_hat = 0.0;
    double std_error = 0.0;
    std::size_t draws = 0;
};

/// Unit-mean Gamma(shape m) power gain of a Nakagami-m amplitude.
/// Integer shapes sum m unit exponentials; others use std::gamma_distribution.
class FadingSampler
{
  public:
    explicit FadingSampler(double m)
        : m_(m), m_int_(m >= 1.0 && m <= 16.0 && std::floor(m) == m ? static_cast<int>(m) : 0),
          gamma_(m, 1.0 / m)
    {
        if (!(m > 0.0))
            throw std::invalid_argument("FadingSampler: m must be positive");
    }

    template <class Rng>
    double operator()(Rng& rng)
    {
        if (m_int_ > 0) {
            double prod = 1.0;
            for (int k = 0; k < m_int_; ++k)
                prod *= 1.0 - unit_(rng); // (0, 1]
            return -std::log(prod) / m_;
        }
        return gamma_(rng);
    }

  private:
    double m_;
    int m_int_;
    std::gamma_distribution<double> gamma_;
    std::uniform_real_distribution<double> unit_{0.0, 1.0};
};

/// Brute-force estimate of P[SINR <= beta] by drawing fading gains and
/// interferer activity directly.
template <class Rng>
OracleEstimate estimate_outage_mc(const UplinkInstance& link, double beta, std::size_t draws, Rng& rng)
{
    link.validate();
    if (draws < 1)
        throw std::invalid_argument("estimate_outage_mc: draws must be at least 1");

    struct Active
    {
        double omega;
        double p;
        FadingSampler fading;
    };
    std::vector<Active> interferers;
    for (std::size_t i = 0; i < link.omega.size(); ++i) {
        if (i == link.reference_mobile || !(link.omega[i] > 0.0) || !(link.activity[i] > 0.0))
            continue;
        interferers.push_back({link.omega[i], link.activity[i], FadingSampler(link.m_interferers[i])});
    }

    FadingSampler desired(static_cast<double>(link.m_desired));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double noise = 1.0 / link.snr_gamma;

    std::size_t outages = 0;
    for (std::size_t n = 0; n < draws; ++n) {
        const double signal = desired(rng) * link.omega_r;
        double denom = noise;
        for (auto& it : interferers) {
            if (it.p < 1.0 && !(unit(rng) < it.p))
                continue;
            denom += it.fading(rng) * it.omega;
        }
        // strict: a zero gain is a measure-zero draw and must not count at beta = 0
        if (signal < beta * denom)
            ++outages;
    }

    OracleEstimate est;
    est.draws = draws;
    est.epsilon_hat = static_cast<double>(outages) / static_cast<double>(draws);
    est.std_error = std::sqrt(est.epsilon_hat * (1.0 - est.epsilon_hat) / static_cast<double>(draws));
    return est;
}

} // namespace cdma
