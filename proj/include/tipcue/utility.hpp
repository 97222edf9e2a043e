#pragma once

#include <optional>
#include <utility>
#include <variant>

namespace tipcue {

inline constexpr double kDefaultUtilityFloor = 1e-3;
inline constexpr double kSecondsPerHour = 3600.0;

/// exp(-((t - t_peak) / sigma)^2); times in seconds.
struct GaussianProfile {
    double t_peak{};
    double sigma{};
};

/// exp(-rate * (t - t0)) for t >= t0, zero before the detection time t0.
struct DecayProfile {
    double t0{};
    double rate{};  // per second
};

/// Time-varying value u(t) = s * psi(t) of acquiring an observation.
///
/// `value` applies the floor (anything below it reads as exactly zero);
/// `derivative` is the analytic derivative of s * psi and ignores the floor so
/// the optimizer sees a smooth objective.
class UtilityFunction {
public:
    using Profile = std::variant<GaussianProfile, DecayProfile>;

    /// Throws ConfigError on sigma <= 0, priority outside [0, 1] or floor < 0.
    static UtilityFunction gaussian(double t_peak, double sigma, double priority,
                                    double floor = kDefaultUtilityFloor);
    /// Throws ConfigError on rate <= 0, priority outside [0, 1] or floor < 0.
    static UtilityFunction exp_decay(double t0, double rate, double priority,
                                     double floor = kDefaultUtilityFloor);

    double value(double t) const;
    double unfloored(double t) const;
    double derivative(double t) const;

    /// Closed time range on which value() >= floor, or nullopt when the
    /// priority itself is below the floor.
    std::optional<std::pair<double, double>> support() const;

    /// Interior maximizer of the unfloored curve, if the family has one.
    std::optional<double> stationary_point() const;

    /// Global Lipschitz constant of derivative() with time measured in units
    /// of `time_unit_s` seconds.
    double lipschitz_bound(double time_unit_s = 1.0) const;

    /// Same family and shape with the base priority replaced.
    UtilityFunction with_priority(double priority) const;

    const Profile& profile() const { return profile_; }
    double priority() const { return priority_; }
    double floor() const { return floor_; }
    bool is_gaussian() const { return std::holds_alternative<GaussianProfile>(profile_); }

private:
    UtilityFunction(Profile profile, double priority, double floor)
        : profile_(profile), priority_(priority), floor_(floor) {}

    Profile profile_;
    double priority_;
    double floor_;
};

inline double utility_eval(const UtilityFunction& u, double t) { return u.value(t); }
inline double utility_grad(const UtilityFunction& u, double t) { return u.derivative(t); }

}  // namespace tipcue
