#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

namespace cdma {

inline double db_to_linear(double x_db) noexcept
{
    return std::pow(10.0, x_db / 10.0);
}

inline double linear_to_db(double x) noexcept
{
    return 10.0 * std::log10(x);
}

/// Power-law attenuation (d/d0)^-alpha, valid in the far field d >= d0.
inline double path_gain(double distance, double d0, double alpha)
{
    if (!(d0 > 0.0))
        throw std::invalid_argument("path_gain: d0 must be positive");
    if (distance < d0)
        throw std::domain_error("path_gain: distance " + std::to_string(distance) +
                                " is inside the far-field radius");
    return std::pow(distance / d0, -alpha);
}

enum class FadingKind { Rayleigh, DistanceDependent, Fixed };

struct FadingModel
{
    FadingKind kind = FadingKind::DistanceDependent;
    double m = 1.0;                          // Fixed only; desired links
    std::optional<double> interferer_m;      // Fixed only; defaults to m

    static FadingModel rayleigh() { return {FadingKind::Rayleigh, 1.0, std::nullopt}; }
    static FadingModel distance_dependent() { return {FadingKind::DistanceDependent, 1.0, std::nullopt}; }
    static FadingModel fixed(double m, std::optional<double> interferer_m = std::nullopt)
    {
        return {FadingKind::Fixed, m, interferer_m};
    }
};

enum class LinkRole { Desired, Interferer };

/// Nakagami parameter of a link of the given length.
///
/// Distance-dependent model: 3 within r_bs/2, 2 up to r_bs, 1 beyond.
inline double nakagami_m(double distance, double r_bs, const FadingModel& model,
                         LinkRole role = LinkRole::Desired)
{
    switch (model.kind) {
    case FadingKind::Rayleigh:
        return 1.0;
    case FadingKind::DistanceDependent:
        if (distance <= r_bs / 2.0)
            return 3.0;
        if (distance <= r_bs)
            return 2.0;
        return 1.0;
    case FadingKind::Fixed:
        if (role == LinkRole::Interferer && model.interferer_m)
            return *model.interferer_m;
        return model.m;
    }
    return 1.0;
}

struct ChannelParams
{
    double alpha = 3.0;
    double d0 = 0.01;
    double shadow_std_db = 8.0;
    double snr_gamma = 10.0; // linear; 10 dB
    double chip_factor = 2.0 / 3.0;
    unsigned spreading_factor = 16;
    FadingModel fading = FadingModel::distance_dependent();

    double interference_scale() const noexcept { return chip_factor / spreading_factor; }

    void validate() const
    {
        if (!(alpha >= 2.0))
            throw std::invalid_argument("channel: alpha must be at least 2");
        if (!(d0 > 0.0))
            throw std::invalid_argument("channel: d0 must be positive");
        if (!(shadow_std_db >= 0.0))
            throw std::invalid_argument("channel: shadow_std_db must be non-negative");
        if (!(snr_gamma > 0.0))
            throw std::invalid_argument("channel: snr must be positive");
        if (!(chip_factor > 0.0 && chip_factor <= 1.0))
            throw std::invalid_argument("channel: chip_factor must lie in (0, 1]");
        if (spreading_factor < 1)
            throw std::invalid_argument("channel: spreading_factor must be at least 1");
        if (fading.kind == FadingKind::Fixed) {
            // the closed-form outage needs an integer desired-link parameter
            if (!(fading.m >= 1.0) || std::floor(fading.m) != fading.m)
                throw std::invalid_argument("channel: fixed desired-link m must be a positive integer");
            if (fading.interferer_m && !(*fading.interferer_m > 0.0))
                throw std::invalid_argument("channel: interferer m must be positive");
        }
    }
};

} // namespace cdma
