#pragma once

#include <cstdint>
#include <vector>

#include "driftdiff/series.hpp"

namespace driftdiff {

// Mean within-window sample variance W(S) per window size S; a saturating
// curve indicates weak stationarity.
struct StationarityCurve {
    std::vector<int> window_sizes;
    std::vector<double> w_values;
};

// Conditional transition probabilities between equal-width value bins.
// probs is row-major with row = source bin; rows with zero occupancy are
// all-zero and flagged undefined.
struct TransitionMatrix {
    int n_bins = 0;
    std::vector<double> edges;       // n_bins + 1 boundaries
    std::vector<double> probs;       // n_bins * n_bins, row = source
    std::vector<std::int64_t> occupancy;  // per source bin

    bool defined(int source) const { return occupancy[source] > 0; }
    double at(int source, int destination) const {
        return probs[static_cast<std::size_t>(source) * n_bins + destination];
    }
};

struct MarkovTestResult {
    std::vector<int> lags;
    std::vector<double> q_values;
    double amplitude = 0.0;      // fitted A in Q(T) = A exp(-T / T_M)
    double markov_length = 0.0;  // fitted T_M in units of the sampling step
    double fit_residual = 0.0;   // sum of squared log-residuals
    bool fit_ok = false;         // false when the decay fit gives T_M <= 0
};

// W(S) over all start positions (stride 1); masked points are excluded from
// each window's variance, windows with fewer than two retained points are
// skipped. Throws on S < 2 or S > length.
StationarityCurve sliding_variance(const ReturnSeries& r, const std::vector<int>& window_sizes);

// Pair-based estimate from (r(t), r(t+lag)) with both endpoints retained;
// bins are equal-width over the retained-value range.
TransitionMatrix transition_matrix(const ReturnSeries& r, int lag, int n_bins);

// L1 deviation between the direct 2T-step conditional matrix and the
// composition of the two T-step matrices, all three estimated from fully
// retained triplets (r(t), r(t+T), r(t+2T)). Source bins with fewer than
// min_occupancy triplets are excluded from the sum.
double ck_deviation(const ReturnSeries& r, int lag, int n_bins = 100, int min_occupancy = 5);

// Log-linear least squares of ln Q on T. Non-positive q values are excluded
// with a warning; a non-negative slope is reported as fit_ok = false rather
// than an error.
MarkovTestResult fit_markov_length(const std::vector<int>& lags,
                                   const std::vector<double>& q_values);

}  // namespace driftdiff
