#include <doctest.h>

#include <cmath>
#include <string>

#include "driftdiff/errors.hpp"
#include "driftdiff/langevin.hpp"
#include "helpers.hpp"

using namespace driftdiff;

namespace {

LangevinModel ou_model(double theta, double d2, double dt, double x0 = 0.0) {
    LangevinModel m;
    m.drift[1] = -theta;
    m.d2[0] = d2;
    m.dt = dt;
    m.x0 = x0;
    return m;
}

}  // namespace

TEST_SUITE("langevin") {

TEST_CASE("zero drift and zero diffusion give a constant path") {
    LangevinModel m;
    m.x0 = 0.7;
    m.dt = 0.1;
    const SimulatedPath path = euler_maruyama(m, 100, 1);
    for (double v : path.values) CHECK(v == 0.7);
}

TEST_CASE("OU stationary variance matches D2/theta") {
    // dX = -X dt + 0.5 dW  =>  D2 = 0.125, stationary variance 0.125.
    const SimulatedPath path = euler_maruyama(ou_model(1.0, 0.125, 0.01), 500000, 42);
    const double var = testing_helpers::variance(path.values);
    CHECK(var == doctest::Approx(0.125).epsilon(0.03));
}

TEST_CASE("identical seeds give bit-identical paths") {
    const LangevinModel m = ou_model(1.0, 0.125, 0.01);
    const SimulatedPath a = euler_maruyama(m, 10000, 42);
    const SimulatedPath b = euler_maruyama(m, 10000, 42);
    CHECK(a.values == b.values);
    const SimulatedPath c = euler_maruyama(m, 10000, 43);
    CHECK(a.values != c.values);
}

TEST_CASE("single-step increments have the model's mean and variance") {
    LangevinModel m;
    m.drift[0] = 0.3;
    m.drift[1] = -0.5;
    m.d2[0] = 0.1;
    m.d2[2] = 0.04;  // D2(x) = 0.1 + 0.04 x^2
    m.dt = 0.05;
    m.x0 = 0.7;
    const double drift_expected = m.drift_at(0.7) * m.dt;
    const double var_expected = 2.0 * m.d2_at(0.7) * m.dt;

    const std::size_t n = 100000;
    std::vector<double> increments(n);
    for (std::size_t s = 0; s < n; ++s) {
        increments[s] = euler_maruyama(m, 1, s).values[1] - m.x0;
    }
    const double mean = testing_helpers::mean(increments);
    const double var = testing_helpers::variance(increments);
    // 4 sigma Monte Carlo bands.
    CHECK(std::fabs(mean - drift_expected) < 4.0 * std::sqrt(var_expected / n));
    CHECK(var == doctest::Approx(var_expected).epsilon(0.02));
}

TEST_CASE("negative diffusion raises a simulation error naming the step") {
    LangevinModel m;
    m.d2[0] = -0.1;
    try {
        euler_maruyama(m, 10, 0);
        FAIL("expected SimulationError");
    } catch (const SimulationError& e) {
        CHECK(std::string(e.what()).find("step 0") != std::string::npos);
    }
}

TEST_CASE("reflecting domain keeps a multiplicative-noise path inside") {
    LangevinModel m;
    m.d2[2] = 0.08;  // D2 = 0.08 x^2, positive on [0.5, 2]
    m.dt = 0.01;
    m.x0 = 1.0;
    m.domain = {{0.5, 2.0}};
    const SimulatedPath path = euler_maruyama(m, 200000, 9);
    for (double v : path.values) {
        CHECK(v >= 0.5);
        CHECK(v <= 2.0);
    }
}

TEST_CASE("single-segment regime series reduces to euler_maruyama") {
    const LangevinModel m = ou_model(1.0, 0.125, 0.01, 0.2);
    const SimulatedPath direct = euler_maruyama(m, 5000, 17);
    const RegimePath regime = synthetic_regime_series({{m, 5000}}, 17);
    CHECK(regime.path.values == direct.values);
    CHECK(regime.change_indices.empty());
}

TEST_CASE("two equal segments change at the midpoint") {
    const LangevinModel m1 = ou_model(1.0, 0.125, 0.01);
    LangevinModel m2 = ou_model(3.0, 0.125, 0.01);
    const RegimePath regime = synthetic_regime_series({{m1, 1000}, {m2, 1000}}, 5);
    REQUIRE(regime.change_indices.size() == 1);
    CHECK(regime.change_indices[0] == 1000);
    CHECK(regime.path.values.size() == 2001);
}

TEST_CASE("segments are continuous at the boundary") {
    const LangevinModel m1 = ou_model(1.0, 0.125, 0.01, 0.5);
    LangevinModel m2 = ou_model(2.0, 0.05, 0.01, -99.0);  // x0 of later segments is ignored
    const RegimePath regime = synthetic_regime_series({{m1, 200}, {m2, 200}}, 3);
    const SimulatedPath first = euler_maruyama(m1, 200, 3);
    CHECK(regime.path.values[200] == first.values[200]);
}

}  // TEST_SUITE
