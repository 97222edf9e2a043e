#include <doctest.h>

#include <cmath>
#include <random>

#include "tipcue/error.hpp"
#include "tipcue/utility.hpp"

using namespace tipcue;

namespace {
constexpr double H = 3600.0;

double central_difference(const UtilityFunction& u, double t) {
    const double h = 1e-2;
    return (u.unfloored(t + h) - u.unfloored(t - h)) / (2.0 * h);
}
}  // namespace

TEST_SUITE("utility") {

TEST_CASE("gaussian values") {
    const auto u = UtilityFunction::gaussian(5 * H, 1 * H, 1.0);
    CHECK(u.value(5 * H) == 1.0);
    CHECK(u.value(6 * H) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
    CHECK(u.value(4 * H) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
    CHECK(u.derivative(5 * H) == 0.0);
}

TEST_CASE("decay values and floor") {
    const double t0 = 1000.0;
    const auto u = UtilityFunction::exp_decay(t0, 0.2 / H, 1.0);
    CHECK(u.value(t0) == 1.0);
    CHECK(u.value(t0 - 1.0) == 0.0);
    const double cutoff = std::log(1000.0) / 0.2 * H;  // ~34.54 h
    CHECK(u.value(t0 + cutoff - 60.0) > 0.0);
    CHECK(u.value(t0 + cutoff + 60.0) == 0.0);
    // derivative ignores the floor
    CHECK(u.derivative(t0 + cutoff + 60.0) < 0.0);
}

TEST_CASE("decay derivative at t0") {
    const auto u = UtilityFunction::exp_decay(0.0, 0.3 / H, 1.0);
    CHECK(u.derivative(0.0) * H == doctest::Approx(-0.3).epsilon(1e-12));
}

TEST_CASE("derivative matches central differences") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    int checked = 0;
    for (int k = 0; k < 1000; ++k) {
        const double s = 0.05 + 0.95 * U(rng);
        const double tp = 2 * H + 20 * H * U(rng);
        const double sigma = (0.5 + 1.5 * U(rng)) * H;
        const auto g = UtilityFunction::gaussian(tp, sigma, s);
        const double t = tp + (U(rng) * 6.0 - 3.0) * sigma;
        const double a = g.derivative(t), fd = central_difference(g, t);
        CHECK(std::abs(a - fd) <= 1e-6 * std::max(std::abs(a), std::abs(fd)) + 1e-13);

        const double t0 = 2 * H * U(rng);
        const double rate = (0.05 + U(rng)) / H;
        const auto d = UtilityFunction::exp_decay(t0, rate, s);
        const double td = t0 + 1.0 + 10 * H * U(rng);
        const double ad = d.derivative(td), fdd = central_difference(d, td);
        CHECK(std::abs(ad - fdd) <= 1e-6 * std::abs(fdd) + 1e-13);
        ++checked;
    }
    CHECK(checked > 900);
}

TEST_CASE("value stays within [0, s]") {
    const auto g = UtilityFunction::gaussian(10 * H, 0.7 * H, 0.2);
    const auto d = UtilityFunction::exp_decay(5 * H, 0.4 / H, 0.2);
    for (double t = 0; t < 30 * H; t += 97.0) {
        CHECK(g.value(t) >= 0.0);
        CHECK(g.value(t) <= 0.2);
        CHECK(d.value(t) >= 0.0);
        CHECK(d.value(t) <= 0.2);
        if (t != 10 * H) CHECK(g.value(t) < 0.2);
    }
}

TEST_CASE("support half-width") {
    const auto narrow = UtilityFunction::gaussian(0.0, 0.5 * H, 0.2);
    const auto wide = UtilityFunction::gaussian(0.0, 2.0 * H, 0.2);
    const double half = 0.5 * H * std::sqrt(std::log(0.2 / 1e-3));
    REQUIRE(narrow.support());
    CHECK(narrow.support()->second == doctest::Approx(half).epsilon(1e-12));
    CHECK(narrow.support()->second < wide.support()->second);
    CHECK(narrow.value(half * 0.999) > 0.0);
    CHECK(narrow.value(half * 1.001) == 0.0);
    CHECK_FALSE(UtilityFunction::gaussian(0.0, H, 0.0).support());
}

TEST_CASE("lipschitz bound is tight") {
    const auto g = UtilityFunction::gaussian(0.0, 1.3, 0.8);
    const auto d = UtilityFunction::exp_decay(0.0, 0.7, 0.8);
    double gmax = 0.0, dmax = 0.0;
    const double h = 1e-5;
    for (double t = -5.0; t <= 5.0; t += 1e-3) {
        gmax = std::max(gmax, std::abs(g.derivative(t + h) - g.derivative(t - h)) / (2 * h));
        if (t > h) dmax = std::max(dmax, std::abs(d.derivative(t + h) - d.derivative(t - h)) / (2 * h));
    }
    CHECK(gmax <= g.lipschitz_bound() * (1 + 1e-6));
    CHECK(gmax >= 0.999 * g.lipschitz_bound());
    CHECK(dmax <= d.lipschitz_bound() * (1 + 1e-6));
    CHECK(dmax >= 0.99 * d.lipschitz_bound());
    // units: bound in hours scales with the squared unit
    CHECK(g.lipschitz_bound(10.0) == doctest::Approx(g.lipschitz_bound() * 100.0));
}

TEST_CASE("invalid parameters") {
    CHECK_THROWS_AS(UtilityFunction::gaussian(0, 0, 0.5), ConfigError);
    CHECK_THROWS_AS(UtilityFunction::exp_decay(0, -1, 0.5), ConfigError);
    CHECK_THROWS_AS(UtilityFunction::gaussian(0, 1, 1.5), ConfigError);
}

}
