#pragma once

#include "cdma/power.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace cdma {

inline double psi(double beta0, double omega_i, double m_i) noexcept
{
    return 1.0 / (beta0 * omega_i / m_i + 1.0);
}

/// Rising factorial m (m+1) ... (m+ell-1), i.e. Gamma(ell+m)/Gamma(m).
inline double rising_factorial(double m, unsigned ell) noexcept
{
    double r = 1.0;
    for (unsigned k = 0; k < ell; ++k)
        r *= m + k;
    return r;
}

/// Coefficient of x^ell in the generating polynomial of one interferer.
inline double g_coeff(unsigned ell, double psi_i, double omega_i, double m_i, double p_i)
{
    if (ell == 0)
        return 1.0 - p_i * (1.0 - std::pow(psi_i, m_i));
    double fact = 1.0;
    for (unsigned k = 2; k <= ell; ++k)
        fact *= k;
    return p_i * rising_factorial(m_i, ell) / fact * std::pow(omega_i / m_i, static_cast<double>(ell)) *
           std::pow(psi_i, m_i + ell);
}

struct Interferer
{
    double omega = 0.0;
    double m = 1.0;
    double p = 1.0;
};

namespace detail {

// Integer m is the overwhelmingly common case; avoid std::pow there.
inline double pow_m(double base, double m, int m_int) noexcept
{
    if (m_int > 0) {
        double r = base;
        for (int k = 1; k < m_int; ++k)
            r *= base;
        return r;
    }
    return std::pow(base, m);
}

inline int integral_shape(double m) noexcept
{
    return (m >= 1.0 && m <= 64.0 && std::floor(m) == m) ? static_cast<int>(m) : 0;
}

// 1 - ps^m without cancellation when ps is close to 1; u = (1 - ps) / ps.
inline double one_minus_pow(double ps, double u, double m, int m_int) noexcept
{
    if (m_int > 0) {
        const double d = u * ps; // 1 - ps
        double geo = 1.0, pk = 1.0;
        for (int k = 1; k < m_int; ++k) {
            pk *= ps;
            geo += pk;
        }
        return d * geo;
    }
    return -std::expm1(-m * std::log1p(u));
}

/// Multiplies the truncated polynomial `h` (degree < h.size()) in place by
/// the generating polynomial of every interferer. Returns 1 - h[0] computed
/// as a sum of non-negative terms, accurate even when h[0] is close to 1.
inline double accumulate_h(std::span<double> h, std::span<const Interferer> interferers,
                           std::span<const int> m_int, double beta0, std::span<double> g)
{
    const std::size_t T = h.size();
    double d0 = 1.0 - h[0];
    for (std::size_t n = 0; n < interferers.size(); ++n) {
        const auto& it = interferers[n];
        if (!(it.omega > 0.0) || !(it.p > 0.0))
            continue;
        const int mi = m_int.empty() ? integral_shape(it.m) : m_int[n];
        const double ratio = it.omega / it.m;
        const double u = beta0 * ratio;
        const double ps = 1.0 / (u + 1.0);
        const double a = it.p * one_minus_pow(ps, u, it.m, mi);
        const double g0 = 1.0 - a;
        d0 += a * (1.0 - d0);
        if (T == 1) {
            h[0] *= g0;
            continue;
        }
        const double ps_m = pow_m(ps, it.m, mi);
        g[0] = g0;
        g[1] = it.p * it.omega * ps_m * ps;
        for (std::size_t ell = 2; ell < T; ++ell)
            g[ell] = g[ell - 1] * ((it.m + static_cast<double>(ell) - 1.0) / static_cast<double>(ell)) * ratio * ps;
        for (std::size_t t = T; t-- > 0;) {
            double acc = 0.0;
            for (std::size_t ell = 0; ell <= t; ++ell)
                acc += g[ell] * h[t - ell];
            h[t] = acc;
        }
    }
    return d0;
}

// Below this x the complement form avoids cancellation in 1 - e^{-x} sum.
inline constexpr double kSmallX = 1.0;

/// `d0` is 1 - h[0]. For small x the outage is evaluated as
/// e^{-x} (sum_s x^s (1/s! - c_s) + sum_{s >= T} x^s / s!), every term of
/// which is small, instead of subtracting a sum close to one.
inline double combine(std::span<const double> h, double d0, double beta0, double snr)
{
    const double x = beta0 / snr;
    const std::size_t T = h.size();
    double fact[64];
    fact[0] = 1.0;
    for (std::size_t k = 1; k < T; ++k)
        fact[k] = fact[k - 1] * static_cast<double>(k);

    double eps;
    if (x < kSmallX) {
        double sum = 0.0;
        double xs = 1.0;
        for (std::size_t s = 0; s < T; ++s) {
            double inner = d0 / fact[s];
            double snr_t = snr;
            for (std::size_t t = 1; t <= s; ++t) {
                inner -= snr_t * h[t] / fact[s - t];
                snr_t *= snr;
            }
            sum += xs * inner;
            xs *= x;
        }
        double term = xs / (fact[T - 1] * static_cast<double>(T)); // x^T / T!
        double tail = 0.0;
        for (std::size_t s = T; term > tail * 1e-18; ++s) {
            tail += term;
            term *= x / static_cast<double>(s + 1);
        }
        eps = std::exp(-x) * (sum + tail);
    } else {
        double sum = 0.0;
        double xs = 1.0;
        for (std::size_t s = 0; s < T; ++s) {
            double inner = 0.0;
            double snr_t = 1.0;
            for (std::size_t t = 0; t <= s; ++t) {
                inner += snr_t * h[t] / fact[s - t];
                snr_t *= snr;
            }
            sum += xs * inner;
            xs *= x;
        }
        eps = 1.0 - std::exp(-x) * sum;
    }
    return std::clamp(eps, 0.0, 1.0);
}

inline constexpr unsigned kMaxDesiredM = 64;

} // namespace detail

/// H_0..H_max_degree: coefficients of the product of the interferers'
/// generating polynomials sum_ell G_ell x^ell, truncated.
inline std::vector<double> h_coeffs(std::span<const Interferer> interferers, double beta0, unsigned max_degree)
{
    std::vector<double> h(max_degree + 1, 0.0);
    h[0] = 1.0;
    std::vector<double> g(max_degree + 1, 0.0);
    detail::accumulate_h(h, interferers, {}, beta0, g);
    return h;
}

/// Uplink reduced to what the kernel touches: active interferers with a
/// nonzero mean power, in mobile-id order.
struct PreparedUplink
{
    MobileId reference_mobile = 0;
    SectorId serving_sector = 0;
    unsigned m_desired = 1;
    double omega_r = 1.0;
    double snr_gamma = 1.0;
    std::vector<Interferer> interferers;
    std::vector<int> m_int;
};

inline PreparedUplink prepare(const UplinkInstance& link)
{
    link.validate();
    if (link.m_desired > detail::kMaxDesiredM)
        throw std::invalid_argument("outage: desired-link m above supported maximum");
    PreparedUplink out;
    out.reference_mobile = link.reference_mobile;
    out.serving_sector = link.serving_sector;
    out.m_desired = link.m_desired;
    out.omega_r = link.omega_r;
    out.snr_gamma = link.snr_gamma;
    for (std::size_t i = 0; i < link.omega.size(); ++i) {
        if (i == link.reference_mobile)
            continue;
        if (link.omega[i] > 0.0 && link.activity[i] > 0.0) {
            out.interferers.push_back({link.omega[i], link.m_interferers[i], link.activity[i]});
            out.m_int.push_back(detail::integral_shape(link.m_interferers[i]));
        }
    }
    return out;
}

/// Conditional outage probability P[SINR <= beta | Omega] of one uplink,
/// averaged in closed form over Nakagami fading and interferer activity.
inline double outage_probability(const PreparedUplink& link, double beta)
{
    if (!(beta >= 0.0))
        throw std::invalid_argument("outage: beta must be non-negative");
    const double beta0 = beta * link.m_desired / link.omega_r;
    std::array<double, detail::kMaxDesiredM> h;
    std::array<double, detail::kMaxDesiredM> g;
    const std::span<double> hs(h.data(), link.m_desired);
    std::fill(hs.begin(), hs.end(), 0.0);
    hs[0] = 1.0;
    const double d0 =
        detail::accumulate_h(hs, link.interferers, link.m_int, beta0, std::span<double>(g.data(), link.m_desired));
    return detail::combine(hs, d0, beta0, link.snr_gamma);
}

inline double outage_probability(const UplinkInstance& link, double beta)
{
    return outage_probability(prepare(link), beta);
}

} // namespace cdma
