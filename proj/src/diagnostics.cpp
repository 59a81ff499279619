#include "driftdiff/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "driftdiff/errors.hpp"

namespace driftdiff {

namespace {

bool retained(const ReturnSeries& r, std::size_t i) {
    return r.clip_mask.empty() || r.clip_mask[i] == 0;
}

struct BinGrid {
    double lo = 0.0;
    double width = 0.0;
    int n_bins = 0;

    int index(double v) const {
        if (width <= 0.0) return 0;
        return std::clamp(static_cast<int>((v - lo) / width), 0, n_bins - 1);
    }
};

BinGrid retained_grid(const ReturnSeries& r, int n_bins) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (!retained(r, i)) continue;
        lo = std::min(lo, r.values[i]);
        hi = std::max(hi, r.values[i]);
    }
    if (!(lo <= hi)) throw EstimationError("no retained observations");
    return BinGrid{lo, (hi - lo) / n_bins, n_bins};
}

// Row-normalizes a count matrix into conditional probabilities.
std::vector<double> normalize_rows(const std::vector<std::int64_t>& counts,
                                   const std::vector<std::int64_t>& row_totals, int n) {
    std::vector<double> probs(static_cast<std::size_t>(n) * n, 0.0);
    for (int a = 0; a < n; ++a) {
        if (row_totals[a] == 0) continue;
        const double total = static_cast<double>(row_totals[a]);
        for (int b = 0; b < n; ++b) {
            probs[static_cast<std::size_t>(a) * n + b] =
                static_cast<double>(counts[static_cast<std::size_t>(a) * n + b]) / total;
        }
    }
    return probs;
}

}  // namespace

StationarityCurve sliding_variance(const ReturnSeries& r, const std::vector<int>& window_sizes) {
    const std::size_t n = r.size();
    for (int s : window_sizes) {
        if (s < 2) throw std::invalid_argument("sliding_variance: window size must be >= 2");
        if (static_cast<std::size_t>(s) > n) {
            throw std::invalid_argument("sliding_variance: window size exceeds series length");
        }
    }
    if (!std::is_sorted(window_sizes.begin(), window_sizes.end()) ||
        std::adjacent_find(window_sizes.begin(), window_sizes.end()) != window_sizes.end()) {
        throw std::invalid_argument("sliding_variance: window sizes must be strictly increasing");
    }

    // Prefix sums over retained points give each window's variance in O(1).
    // Values are centered on the global retained mean first; variance is
    // shift-invariant and this keeps the cancellation benign (a constant
    // series comes out exactly zero).
    double global_mean = 0.0;
    std::size_t retained_total = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!retained(r, i)) continue;
        global_mean += r.values[i];
        ++retained_total;
    }
    if (retained_total > 0) global_mean /= static_cast<double>(retained_total);
    std::vector<double> csum(n + 1, 0.0), csq(n + 1, 0.0);
    std::vector<std::int64_t> ccount(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const bool keep = retained(r, i);
        const double v = keep ? r.values[i] - global_mean : 0.0;
        csum[i + 1] = csum[i] + v;
        csq[i + 1] = csq[i] + v * v;
        ccount[i + 1] = ccount[i] + (keep ? 1 : 0);
    }

    StationarityCurve curve;
    curve.window_sizes = window_sizes;
    for (int s : window_sizes) {
        double total = 0.0;
        std::size_t windows = 0;
        for (std::size_t start = 0; start + s <= n; ++start) {
            const std::int64_t m = ccount[start + s] - ccount[start];
            if (m < 2) continue;
            const double sum = csum[start + s] - csum[start];
            const double sq = csq[start + s] - csq[start];
            const double var = (sq - sum * sum / static_cast<double>(m)) /
                               static_cast<double>(m - 1);
            total += std::max(0.0, var);
            ++windows;
        }
        if (windows == 0) throw EstimationError("sliding_variance: no window with 2+ retained points");
        curve.w_values.push_back(total / static_cast<double>(windows));
    }
    return curve;
}

TransitionMatrix transition_matrix(const ReturnSeries& r, int lag, int n_bins) {
    if (lag < 1) throw std::invalid_argument("transition_matrix: lag must be >= 1");
    if (n_bins < 2) throw std::invalid_argument("transition_matrix: need at least 2 bins");
    const BinGrid grid = retained_grid(r, n_bins);

    TransitionMatrix m;
    m.n_bins = n_bins;
    m.edges.resize(n_bins + 1);
    for (int b = 0; b <= n_bins; ++b) m.edges[b] = grid.lo + b * grid.width;
    std::vector<std::int64_t> counts(static_cast<std::size_t>(n_bins) * n_bins, 0);
    m.occupancy.assign(n_bins, 0);

    const std::size_t n = r.size();
    std::size_t pairs = 0;
    for (std::size_t t = 0; t + lag < n; ++t) {
        if (!retained(r, t) || !retained(r, t + lag)) continue;
        const int src = grid.index(r.values[t]);
        const int dst = grid.index(r.values[t + lag]);
        counts[static_cast<std::size_t>(src) * n_bins + dst] += 1;
        m.occupancy[src] += 1;
        ++pairs;
    }
    if (pairs == 0) throw EstimationError("transition_matrix: no valid pairs at lag " +
                                          std::to_string(lag));
    m.probs = normalize_rows(counts, m.occupancy, n_bins);
    return m;
}

double ck_deviation(const ReturnSeries& r, int lag, int n_bins, int min_occupancy) {
    if (lag < 1) throw std::invalid_argument("ck_deviation: lag must be >= 1");
    if (n_bins < 2) throw std::invalid_argument("ck_deviation: need at least 2 bins");
    const std::size_t n = r.size();
    if (2 * static_cast<std::size_t>(lag) >= n) {
        throw EstimationError("ck_deviation: series too short for lag " + std::to_string(lag));
    }
    const BinGrid grid = retained_grid(r, n_bins);

    const std::size_t nb = static_cast<std::size_t>(n_bins);
    std::vector<std::int64_t> c1(nb * nb, 0), c2(nb * nb, 0), c3(nb * nb, 0);
    std::vector<std::int64_t> rows1(nb, 0), rows2(nb, 0);
    std::size_t triplets = 0;
    for (std::size_t t = 0; t + 2 * lag < n; ++t) {
        if (!retained(r, t) || !retained(r, t + lag) || !retained(r, t + 2 * lag)) continue;
        const int a = grid.index(r.values[t]);
        const int b = grid.index(r.values[t + lag]);
        const int c = grid.index(r.values[t + 2 * lag]);
        c1[a * nb + b] += 1;
        c2[b * nb + c] += 1;
        c3[a * nb + c] += 1;
        rows1[a] += 1;
        rows2[b] += 1;
        ++triplets;
    }
    if (triplets == 0) {
        throw EstimationError("ck_deviation: no retained triplets at lag " + std::to_string(lag));
    }

    const std::vector<double> p1 = normalize_rows(c1, rows1, n_bins);
    const std::vector<double> p2 = normalize_rows(c2, rows2, n_bins);
    const std::vector<double> p3 = normalize_rows(c3, rows1, n_bins);  // same conditioning as P1

    double q = 0.0;
    for (std::size_t a = 0; a < nb; ++a) {
        if (rows1[a] < min_occupancy) continue;
        for (std::size_t c = 0; c < nb; ++c) {
            double composed = 0.0;
            for (std::size_t b = 0; b < nb; ++b) {
                const double step1 = p1[a * nb + b];
                if (step1 == 0.0) continue;
                composed += step1 * p2[b * nb + c];
            }
            q += std::fabs(p3[a * nb + c] - composed);
        }
    }
    return q;
}

MarkovTestResult fit_markov_length(const std::vector<int>& lags,
                                   const std::vector<double>& q_values) {
    if (lags.size() != q_values.size()) {
        throw std::invalid_argument("fit_markov_length: lags and q_values differ in length");
    }
    std::vector<double> x, y;
    for (std::size_t i = 0; i < lags.size(); ++i) {
        if (!(q_values[i] > 0.0)) {
            warn("fit_markov_length: dropping non-positive Q at lag " + std::to_string(lags[i]));
            continue;
        }
        x.push_back(static_cast<double>(lags[i]));
        y.push_back(std::log(q_values[i]));
    }
    if (x.size() < 3) {
        throw std::invalid_argument("fit_markov_length: need at least 3 positive Q values");
    }

    const double n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double denom = n * sxx - sx * sx;
    const double slope = (n * sxy - sx * sy) / denom;
    const double intercept = (sy - slope * sx) / n;

    MarkovTestResult out;
    out.lags = lags;
    out.q_values = q_values;
    out.amplitude = std::exp(intercept);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double res = y[i] - (intercept + slope * x[i]);
        out.fit_residual += res * res;
    }
    if (slope < 0.0) {
        out.markov_length = -1.0 / slope;
        out.fit_ok = true;
    } else {
        out.markov_length = std::numeric_limits<double>::quiet_NaN();
        out.fit_ok = false;
    }
    return out;
}

}  // namespace driftdiff
