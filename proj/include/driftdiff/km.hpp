#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "driftdiff/series.hpp"

namespace driftdiff {

struct KMOrders {
    bool first = true;
    bool second = true;
    bool fourth = true;
};

// Per-bin conditional-moment estimates. Convention: D_n = (raw increment
// moment) / (n! * step), so D2 = b^2/2 matches the simulator and D1 = a
// directly. Bins with counts below min_count are marked invalid and excluded
// from fits. Unrequested orders are NaN.
struct KMProfile {
    std::vector<double> bin_centers;
    std::vector<std::int64_t> counts;
    std::vector<double> d1;
    std::vector<double> d2;
    std::vector<double> d4;
    std::vector<char> valid;
    double step = 1.0;
    int min_count = 10;
    KMOrders orders;
    std::string convention = "moment/n!";

    std::size_t n_bins() const { return bin_centers.size(); }
    std::size_t valid_count() const;
};

// d1 ~ alpha * r + gamma, count-weighted least squares over valid bins.
struct DriftFit {
    double alpha = 0.0;
    double gamma = 0.0;
    double r_squared = 0.0;
};

// d2 ~ beta * r^2 + delta * r (+ epsilon when the constant term is enabled;
// epsilon is NaN otherwise). Count-weighted least squares over valid bins.
struct DiffusionFit {
    double beta = 0.0;
    double delta = 0.0;
    double epsilon = 0.0;
    bool has_constant_term = false;
    double r_squared = 0.0;
};

// Binned conditional moments of one-step increments, conditioning on the
// unmasked X_i. A transition contributes only when both endpoints are
// unmasked. Bins are equal-width over the retained-value range; a degenerate
// range collapses everything into one bin.
KMProfile estimate_km(const ReturnSeries& r, int n_bins, int min_count = 10,
                      KMOrders orders = {});

DriftFit fit_drift(const KMProfile& profile);

DiffusionFit fit_diffusion(const KMProfile& profile, bool constant_term = false);

// d4 / d2^2 per bin; NaN where the bin is invalid or d2 <= 0. For
// finite-step Gaussian increments the expected value is step/2.
std::vector<double> pawula_ratio(const KMProfile& profile);

}  // namespace driftdiff
