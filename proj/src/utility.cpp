#include "tipcue/utility.hpp"

#include <cmath>

#include "tipcue/error.hpp"

namespace tipcue {

namespace {

void check_common(double priority, double floor) {
    if (!(priority >= 0.0 && priority <= 1.0)) {
        throw ConfigError("utility priority must lie in [0, 1]");
    }
    if (!(floor >= 0.0)) throw ConfigError("utility floor must be non-negative");
}

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

}  // namespace

UtilityFunction UtilityFunction::gaussian(double t_peak, double sigma, double priority,
                                          double floor) {
    if (!(sigma > 0.0) || !std::isfinite(t_peak)) throw ConfigError("gaussian utility needs sigma > 0");
    check_common(priority, floor);
    return UtilityFunction(GaussianProfile{t_peak, sigma}, priority, floor);
}

UtilityFunction UtilityFunction::exp_decay(double t0, double rate, double priority, double floor) {
    if (!(rate > 0.0) || !std::isfinite(t0)) throw ConfigError("decay utility needs rate > 0");
    check_common(priority, floor);
    return UtilityFunction(DecayProfile{t0, rate}, priority, floor);
}

double UtilityFunction::unfloored(double t) const {
    return std::visit(overloaded{[&](const GaussianProfile& g) {
                                     const double x = (t - g.t_peak) / g.sigma;
                                     return priority_ * std::exp(-x * x);
                                 },
                                 [&](const DecayProfile& d) {
                                     if (t < d.t0) return 0.0;
                                     return priority_ * std::exp(-d.rate * (t - d.t0));
                                 }},
                      profile_);
}

double UtilityFunction::value(double t) const {
    const double u = unfloored(t);
    return u < floor_ ? 0.0 : u;
}

double UtilityFunction::derivative(double t) const {
    return std::visit(overloaded{[&](const GaussianProfile& g) {
                                     const double x = (t - g.t_peak) / g.sigma;
                                     return -2.0 * x / g.sigma * priority_ * std::exp(-x * x);
                                 },
                                 [&](const DecayProfile& d) {
                                     if (t < d.t0) return 0.0;
                                     return -d.rate * priority_ * std::exp(-d.rate * (t - d.t0));
                                 }},
                      profile_);
}

std::optional<std::pair<double, double>> UtilityFunction::support() const {
    if (priority_ <= 0.0 || priority_ < floor_) return std::nullopt;
    // floor == 0 means every point with positive value counts.
    const double log_ratio = floor_ > 0.0 ? std::log(priority_ / floor_) : HUGE_VAL;
    return std::visit(overloaded{[&](const GaussianProfile& g) {
                                     const double half = g.sigma * std::sqrt(log_ratio);
                                     return std::make_pair(g.t_peak - half, g.t_peak + half);
                                 },
                                 [&](const DecayProfile& d) {
                                     return std::make_pair(d.t0, d.t0 + log_ratio / d.rate);
                                 }},
                      profile_);
}

std::optional<double> UtilityFunction::stationary_point() const {
    if (const auto* g = std::get_if<GaussianProfile>(&profile_)) return g->t_peak;
    return std::nullopt;
}

double UtilityFunction::lipschitz_bound(double time_unit_s) const {
    return std::visit(overloaded{[&](const GaussianProfile& g) {
                                     // |d2/dx2 exp(-x^2)| peaks at x = 0 with value 2.
                                     const double sigma = g.sigma / time_unit_s;
                                     return 2.0 * priority_ / (sigma * sigma);
                                 },
                                 [&](const DecayProfile& d) {
                                     const double rate = d.rate * time_unit_s;
                                     return priority_ * rate * rate;
                                 }},
                      profile_);
}

UtilityFunction UtilityFunction::with_priority(double priority) const {
    check_common(priority, floor_);
    return UtilityFunction(profile_, priority, floor_);
}

}  // namespace tipcue
