#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace driftdiff {

// dx/dt = a(x) + b(x) * white noise, parameterized through the diffusion
// function D2(x) = b^2(x)/2 so simulator and estimator share one convention.
struct LangevinModel {
    // a(x) = drift[0] + drift[1]*x + drift[2]*x^2
    double drift[3] = {0.0, 0.0, 0.0};
    // D2(x) = d2[0] + d2[1]*x + d2[2]*x^2  (constant, linear, quadratic)
    double d2[3] = {0.0, 0.0, 0.0};
    double dt = 0.01;
    double x0 = 0.0;
    // Reflecting bounds keeping the path inside a D2 > 0 region.
    std::optional<std::pair<double, double>> domain;

    double drift_at(double x) const { return drift[0] + x * (drift[1] + x * drift[2]); }
    double d2_at(double x) const { return d2[0] + x * (d2[1] + x * d2[2]); }
};

struct SimulatedPath {
    std::vector<double> values;  // n_steps + 1 states, starting at x0
    std::uint64_t seed = 0;
    LangevinModel model;
};

// Ito Euler scheme: x' = x + a(x) dt + sqrt(2 D2(x) dt) xi, xi iid standard
// normal from a counter-based stream keyed by `seed`. Identical seed gives a
// bit-identical path. Throws SimulationError (naming the step) when D2 turns
// negative or the state stops being finite.
SimulatedPath euler_maruyama(const LangevinModel& model, std::size_t n_steps, std::uint64_t seed);

struct RegimeSegment {
    LangevinModel model;
    std::size_t length = 0;  // steps simulated under this model
};

struct RegimePath {
    SimulatedPath path;
    std::vector<std::size_t> change_indices;  // index of the first state of each new regime
};

// Concatenated simulation; each segment starts from the previous endpoint.
// One noise stream spans the whole series.
RegimePath synthetic_regime_series(const std::vector<RegimeSegment>& segments,
                                   std::uint64_t seed);

}  // namespace driftdiff
