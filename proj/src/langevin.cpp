#include "driftdiff/langevin.hpp"

#include <cmath>
#include <string>

#include "driftdiff/errors.hpp"
#include "driftdiff/rng.hpp"

namespace driftdiff {

namespace {

void check_model(const LangevinModel& model) {
    if (!(model.dt > 0.0)) throw ValidationError("langevin model: dt must be positive");
    if (model.domain && !(model.domain->first < model.domain->second)) {
        throw ValidationError("langevin model: domain bounds must satisfy lo < hi");
    }
}

double reflect(double x, double lo, double hi) {
    // Fold back into [lo, hi]; the loop terminates because each pass shrinks
    // the overshoot by the interval width.
    while (x < lo || x > hi) {
        if (x < lo) x = 2.0 * lo - x;
        if (x > hi) x = 2.0 * hi - x;
    }
    return x;
}

void simulate_into(const LangevinModel& model, std::size_t n_steps, RandomStream& noise,
                   std::vector<double>& values, std::size_t step_offset) {
    double x = values.back();
    for (std::size_t k = 0; k < n_steps; ++k) {
        const double diffusion = model.d2_at(x);
        if (diffusion < 0.0) {
            throw SimulationError("negative diffusion D2(x) = " + std::to_string(diffusion) +
                                  " at step " + std::to_string(step_offset + k));
        }
        x += model.drift_at(x) * model.dt +
             std::sqrt(2.0 * diffusion * model.dt) * noise.normal();
        if (model.domain) x = reflect(x, model.domain->first, model.domain->second);
        if (!std::isfinite(x)) {
            throw SimulationError("state became non-finite at step " +
                                  std::to_string(step_offset + k));
        }
        values.push_back(x);
    }
}

}  // namespace

SimulatedPath euler_maruyama(const LangevinModel& model, std::size_t n_steps,
                             std::uint64_t seed) {
    check_model(model);
    SimulatedPath out;
    out.seed = seed;
    out.model = model;
    out.values.reserve(n_steps + 1);
    out.values.push_back(model.x0);
    RandomStream noise(seed);
    simulate_into(model, n_steps, noise, out.values, 0);
    return out;
}

RegimePath synthetic_regime_series(const std::vector<RegimeSegment>& segments,
                                   std::uint64_t seed) {
    if (segments.empty()) throw ValidationError("regime series: no segments");
    RegimePath out;
    out.path.seed = seed;
    out.path.model = segments.front().model;
    out.path.values.push_back(segments.front().model.x0);
    RandomStream noise(seed);
    std::size_t offset = 0;
    for (std::size_t s = 0; s < segments.size(); ++s) {
        LangevinModel model = segments[s].model;
        check_model(model);
        // The shared boundary state: last point of the old regime, start of the new.
        if (s > 0) out.change_indices.push_back(out.path.values.size() - 1);
        simulate_into(model, segments[s].length, noise, out.path.values, offset);
        offset += segments[s].length;
    }
    return out;
}

}  // namespace driftdiff
