#pragma once

#include "cdma/association.hpp"
#include "cdma/channel.hpp"
#include "cdma/spatial.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace cdma {

/// Everything the outage kernel needs for one reference uplink.
///
/// `omega`, `m_interferers` and `activity` are indexed by mobile id; the
/// reference mobile's own slot in `omega` is zero.
struct UplinkInstance
{
    MobileId reference_mobile = 0;
    SectorId serving_sector = 0;
    double omega_r = 1.0;
    std::vector<double> omega;
    unsigned m_desired = 1;
    std::vector<double> m_interferers;
    std::vector<double> activity;
    double snr_gamma = 10.0;

    void validate() const
    {
        if (!(omega_r > 0.0) || !std::isfinite(omega_r))
            throw std::invalid_argument("uplink: omega_r must be positive and finite");
        if (m_desired < 1)
            throw std::invalid_argument("uplink: desired-link m must be a positive integer");
        if (!(snr_gamma > 0.0))
            throw std::invalid_argument("uplink: snr must be positive");
        if (m_interferers.size() != omega.size() || activity.size() != omega.size())
            throw std::invalid_argument("uplink: omega, m and activity lengths differ");
        for (std::size_t i = 0; i < omega.size(); ++i) {
            if (!(omega[i] >= 0.0) || !std::isfinite(omega[i]))
                throw std::invalid_argument("uplink: omega[" + std::to_string(i) + "] is negative or not finite");
            if (!(activity[i] >= 0.0 && activity[i] <= 1.0))
                throw std::invalid_argument("uplink: activity[" + std::to_string(i) + "] outside [0, 1]");
            if (omega[i] > 0.0 && !(m_interferers[i] > 0.0))
                throw std::invalid_argument("uplink: m[" + std::to_string(i) + "] must be positive");
        }
    }
};

/// P_i / P_0 under power control towards sector k: the inverse of the
/// shadowed path gain.
inline double normalized_transmit_power(const NetworkRealization& real, MobileId mobile, SectorId sector,
                                        const ChannelParams& channel)
{
    return 1.0 / shadowed_gain(real, mobile, bs_of(sector), channel.alpha, channel.d0);
}

/// Normalized mean despread powers seen by the serving antenna of
/// `reference`, with power control in force on every served mobile.
///
/// Distances are in network units: snr_gamma is the SNR of an unshadowed,
/// unfaded mobile at unit distance. Intracell interferers all get
/// (h/G) * omega_r; intercell interferers get
/// (h/G) 10^(xi'/10) (d_ji d_jr / d_ki)^-alpha with xi' = xi_ij + xi_rj - xi_ik.
/// Denied mobiles and mobiles outside the antenna's sector contribute zero.
inline UplinkInstance omega_vector(const NetworkRealization& real, const AssociationState& assoc,
                                   MobileId reference, const ChannelParams& channel, double r_bs,
                                   double activity)
{
    if (reference >= real.num_mobiles())
        throw std::out_of_range("omega_vector: reference mobile out of range");
    if (!assoc.serving[reference])
        throw std::invalid_argument("omega_vector: reference mobile " + std::to_string(reference) +
                                    " is denied service");

    const std::size_t M = real.num_mobiles();
    const SectorId j = *assoc.serving[reference];
    const std::size_t bj = bs_of(j);
    const double alpha = channel.alpha;
    const double hg = channel.interference_scale();
    const double d_jr = real.link_distance(reference, bj);
    const double xi_rj = real.shadow_db(reference, bj);

    UplinkInstance link;
    link.reference_mobile = reference;
    link.serving_sector = j;
    link.snr_gamma = channel.snr_gamma;
    link.omega_r = db_to_linear(xi_rj) * std::pow(d_jr, -alpha);
    link.m_desired = static_cast<unsigned>(nakagami_m(d_jr, r_bs, channel.fading, LinkRole::Desired));
    link.omega.assign(M, 0.0);
    link.m_interferers.assign(M, 1.0);
    link.activity.assign(M, activity);

    const double intracell = hg * link.omega_r;
    for (MobileId i = 0; i < M; ++i) {
        if (i == reference)
            continue;
        const double d_ji = real.link_distance(i, bj);
        link.m_interferers[i] = nakagami_m(d_ji, r_bs, channel.fading, LinkRole::Interferer);
        const auto& k = assoc.serving[i];
        if (!k || assoc.covering_sector(i, bj) != j)
            continue;
        if (*k == j) {
            link.omega[i] = intracell;
            continue;
        }
        const std::size_t bk = bs_of(*k);
        const double d_ki = real.link_distance(i, bk);
        const double xi_prime = real.shadow_db(i, bj) + xi_rj - real.shadow_db(i, bk);
        link.omega[i] = hg * db_to_linear(xi_prime) * std::pow(d_ji * d_jr / d_ki, -alpha);
    }
    return link;
}

} // namespace cdma
