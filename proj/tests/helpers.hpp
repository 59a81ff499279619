#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "driftdiff/dates.hpp"
#include "driftdiff/rng.hpp"
#include "driftdiff/series.hpp"

namespace testing_helpers {

using driftdiff::Date;
using driftdiff::ReturnSeries;

// Wraps raw values as an unmasked return series with synthetic daily dates.
inline ReturnSeries make_returns(std::vector<double> values, double step = 1.0) {
    ReturnSeries r;
    const Date start = Date::from_ymd(2000, 1, 1);
    for (std::size_t i = 0; i < values.size(); ++i) {
        r.dates.push_back(Date{start.serial + static_cast<std::int32_t>(i)});
    }
    r.values = std::move(values);
    r.clip_mask.assign(r.values.size(), 0);
    r.sigma = driftdiff::sample_std(r.values);
    r.step = step;
    return r;
}

inline double mean(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

inline double variance(const std::vector<double>& v) {
    const double m = mean(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return ss / static_cast<double>(v.size() - 1);
}

// x_t = e_t + b1 e_{t-1} + b2 e_{t-2}; non-Markov for b2 != 0.
inline std::vector<double> simulate_ma2(std::size_t n, double b1, double b2,
                                        std::uint64_t seed) {
    driftdiff::RandomStream rng(seed);
    std::vector<double> x(n);
    double e1 = rng.normal(), e2 = rng.normal();
    for (std::size_t t = 0; t < n; ++t) {
        const double e0 = rng.normal();
        x[t] = e0 + b1 * e1 + b2 * e2;
        e2 = e1;
        e1 = e0;
    }
    return x;
}

// Stationary AR(1) with the given marginal variance.
inline std::vector<double> simulate_ar1(std::size_t n, double phi, double target_variance,
                                        std::uint64_t seed) {
    driftdiff::RandomStream rng(seed);
    const double noise_std = std::sqrt(target_variance * (1.0 - phi * phi));
    std::vector<double> x(n);
    double state = std::sqrt(target_variance) * rng.normal();
    for (std::size_t t = 0; t < n; ++t) {
        state = phi * state + noise_std * rng.normal();
        x[t] = state;
    }
    return x;
}

// Two-state Markov chain emitting the given levels.
inline std::vector<double> simulate_two_state_chain(std::size_t n, double p01, double p10,
                                                    double level0, double level1,
                                                    std::uint64_t seed) {
    driftdiff::RandomStream rng(seed);
    std::vector<double> x(n);
    int state = 0;
    for (std::size_t t = 0; t < n; ++t) {
        const double u = rng.uniform();
        state = state == 0 ? (u < p01 ? 1 : 0) : (u < p10 ? 0 : 1);
        x[t] = state == 0 ? level0 : level1;
    }
    return x;
}

// Banded k-state chain, transition weight 1/(1 + |i - j|), states emitted as
// the integers 0..k-1.
inline std::vector<double> simulate_k_state_chain(std::size_t n, int k, std::uint64_t seed) {
    std::vector<std::vector<double>> cumulative(k, std::vector<double>(k));
    for (int i = 0; i < k; ++i) {
        double total = 0.0;
        for (int j = 0; j < k; ++j) total += 1.0 / (1.0 + std::abs(i - j));
        double acc = 0.0;
        for (int j = 0; j < k; ++j) {
            acc += 1.0 / (1.0 + std::abs(i - j)) / total;
            cumulative[i][j] = acc;
        }
    }
    driftdiff::RandomStream rng(seed);
    std::vector<double> x(n);
    int state = 0;
    for (std::size_t t = 0; t < n; ++t) {
        const double u = rng.uniform();
        int next = k - 1;
        for (int j = 0; j < k; ++j) {
            if (u < cumulative[state][j]) {
                next = j;
                break;
            }
        }
        state = next;
        x[t] = static_cast<double>(state);
    }
    return x;
}

}  // namespace testing_helpers
