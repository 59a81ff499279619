#include "driftdiff/km.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "driftdiff/errors.hpp"

namespace driftdiff {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Count-weighted least squares of y on up to three regressors, via normal
// equations with partial pivoting. Small and dense; fine for p <= 3.
struct WlsResult {
    double coef[3] = {0.0, 0.0, 0.0};
    double r_squared = 0.0;
};

WlsResult weighted_least_squares(const std::vector<const double*>& regressors,
                                 const std::vector<double>& y,
                                 const std::vector<double>& w) {
    const std::size_t p = regressors.size();
    const std::size_t n = y.size();
    double ata[3][3] = {};
    double atb[3] = {};
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t a = 0; a < p; ++a) {
            const double xa = regressors[a][i];
            atb[a] += w[i] * xa * y[i];
            for (std::size_t b = 0; b <= a; ++b) {
                ata[a][b] += w[i] * xa * regressors[b][i];
            }
        }
    }
    for (std::size_t a = 0; a < p; ++a)
        for (std::size_t b = a + 1; b < p; ++b) ata[a][b] = ata[b][a];

    // Gaussian elimination with partial pivoting.
    std::size_t perm[3] = {0, 1, 2};
    for (std::size_t col = 0; col < p; ++col) {
        std::size_t pivot = col;
        for (std::size_t row = col + 1; row < p; ++row) {
            if (std::fabs(ata[perm[row]][col]) > std::fabs(ata[perm[pivot]][col])) pivot = row;
        }
        std::swap(perm[col], perm[pivot]);
        const double diag = ata[perm[col]][col];
        if (diag == 0.0) throw FitError("singular normal equations in weighted fit");
        for (std::size_t row = col + 1; row < p; ++row) {
            const double factor = ata[perm[row]][col] / diag;
            for (std::size_t k = col; k < p; ++k) ata[perm[row]][k] -= factor * ata[perm[col]][k];
            atb[perm[row]] -= factor * atb[perm[col]];
        }
    }
    WlsResult out;
    for (std::size_t col = p; col-- > 0;) {
        double v = atb[perm[col]];
        for (std::size_t k = col + 1; k < p; ++k) v -= ata[perm[col]][k] * out.coef[k];
        out.coef[col] = v / ata[perm[col]][col];
    }

    double wsum = 0.0, wy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        wsum += w[i];
        wy += w[i] * y[i];
    }
    const double ybar = wy / wsum;
    double sst = 0.0, ssr = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double fit = 0.0;
        for (std::size_t a = 0; a < p; ++a) fit += out.coef[a] * regressors[a][i];
        const double res = y[i] - fit;
        const double dev = y[i] - ybar;
        ssr += w[i] * res * res;
        sst += w[i] * dev * dev;
        scale += w[i] * y[i] * y[i];
    }
    // Zero-variance targets: define R^2 = 1 when the residuals also vanish,
    // 0 otherwise, so NaN never reaches the rolling filter.
    const double floor = 1e-12 * scale + std::numeric_limits<double>::min();
    if (sst <= floor) {
        out.r_squared = (ssr <= floor) ? 1.0 : 0.0;
    } else {
        out.r_squared = 1.0 - ssr / sst;
    }
    return out;
}

struct ValidBins {
    std::vector<double> centers;
    std::vector<double> weights;
};

ValidBins collect_valid(const KMProfile& profile) {
    ValidBins out;
    for (std::size_t b = 0; b < profile.n_bins(); ++b) {
        if (!profile.valid[b]) continue;
        out.centers.push_back(profile.bin_centers[b]);
        out.weights.push_back(static_cast<double>(profile.counts[b]));
    }
    return out;
}

}  // namespace

std::size_t KMProfile::valid_count() const {
    return static_cast<std::size_t>(std::count(valid.begin(), valid.end(), char(1)));
}

KMProfile estimate_km(const ReturnSeries& r, int n_bins, int min_count, KMOrders orders) {
    if (n_bins < 5) throw std::invalid_argument("estimate_km: need at least 5 bins");
    if (min_count < 1) throw std::invalid_argument("estimate_km: min_count must be >= 1");
    const std::size_t n = r.size();
    const bool has_mask = !r.clip_mask.empty();

    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        if (has_mask && r.masked(i)) continue;
        lo = std::min(lo, r.values[i]);
        hi = std::max(hi, r.values[i]);
    }
    if (!(lo <= hi)) throw EstimationError("estimate_km: no retained observations");

    KMProfile profile;
    profile.step = r.step;
    profile.min_count = min_count;
    profile.orders = orders;
    const double width = (hi - lo) / n_bins;
    profile.bin_centers.resize(n_bins);
    for (int b = 0; b < n_bins; ++b) profile.bin_centers[b] = lo + (b + 0.5) * width;
    if (width == 0.0) profile.bin_centers.assign(n_bins, lo);

    std::vector<std::int64_t> counts(n_bins, 0);
    std::vector<double> s1(n_bins, 0.0), s2(n_bins, 0.0), s4(n_bins, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (has_mask && (r.masked(i) || r.masked(i + 1))) continue;
        int b = 0;
        if (width > 0.0) {
            b = static_cast<int>((r.values[i] - lo) / width);
            b = std::clamp(b, 0, n_bins - 1);
        }
        const double dx = r.values[i + 1] - r.values[i];
        const double dx2 = dx * dx;
        counts[b] += 1;
        s1[b] += dx;
        s2[b] += dx2;
        s4[b] += dx2 * dx2;
    }

    profile.counts = std::move(counts);
    profile.d1.assign(n_bins, kNaN);
    profile.d2.assign(n_bins, kNaN);
    profile.d4.assign(n_bins, kNaN);
    profile.valid.assign(n_bins, 0);
    bool any_valid = false;
    for (int b = 0; b < n_bins; ++b) {
        const auto c = profile.counts[b];
        if (c == 0) continue;
        const double denom = static_cast<double>(c) * r.step;
        if (orders.first) profile.d1[b] = s1[b] / denom;
        if (orders.second) profile.d2[b] = s2[b] / (2.0 * denom);
        if (orders.fourth) profile.d4[b] = s4[b] / (24.0 * denom);
        if (c >= min_count) {
            profile.valid[b] = 1;
            any_valid = true;
        }
    }
    if (!any_valid) {
        throw EstimationError("estimate_km: no bin reaches min_count = " +
                              std::to_string(min_count));
    }
    return profile;
}

DriftFit fit_drift(const KMProfile& profile) {
    if (!profile.orders.first) throw FitError("fit_drift: first-order moments not estimated");
    const ValidBins bins = collect_valid(profile);
    if (bins.centers.size() < 3) {
        throw FitError("fit_drift: need at least 3 valid bins, got " +
                       std::to_string(bins.centers.size()));
    }
    std::vector<double> y;
    y.reserve(bins.centers.size());
    std::vector<double> ones(bins.centers.size(), 1.0);
    for (std::size_t b = 0; b < profile.n_bins(); ++b) {
        if (profile.valid[b]) y.push_back(profile.d1[b]);
    }
    const WlsResult res =
        weighted_least_squares({bins.centers.data(), ones.data()}, y, bins.weights);
    return DriftFit{res.coef[0], res.coef[1], res.r_squared};
}

DiffusionFit fit_diffusion(const KMProfile& profile, bool constant_term) {
    if (!profile.orders.second) throw FitError("fit_diffusion: second-order moments not estimated");
    const ValidBins bins = collect_valid(profile);
    if (bins.centers.size() < 3) {
        throw FitError("fit_diffusion: need at least 3 valid bins, got " +
                       std::to_string(bins.centers.size()));
    }
    std::vector<double> y;
    std::vector<double> sq(bins.centers.size());
    std::vector<double> ones(bins.centers.size(), 1.0);
    for (std::size_t i = 0; i < bins.centers.size(); ++i) sq[i] = bins.centers[i] * bins.centers[i];
    for (std::size_t b = 0; b < profile.n_bins(); ++b) {
        if (profile.valid[b]) y.push_back(profile.d2[b]);
    }
    std::vector<const double*> regressors = {sq.data(), bins.centers.data()};
    if (constant_term) regressors.push_back(ones.data());
    const WlsResult res = weighted_least_squares(regressors, y, bins.weights);
    DiffusionFit fit;
    fit.beta = res.coef[0];
    fit.delta = res.coef[1];
    fit.epsilon = constant_term ? res.coef[2] : kNaN;
    fit.has_constant_term = constant_term;
    fit.r_squared = res.r_squared;
    return fit;
}

std::vector<double> pawula_ratio(const KMProfile& profile) {
    if (!profile.orders.second || !profile.orders.fourth) {
        throw FitError("pawula_ratio: orders 2 and 4 must both be estimated");
    }
    std::vector<double> ratio(profile.n_bins(), kNaN);
    for (std::size_t b = 0; b < profile.n_bins(); ++b) {
        if (!profile.valid[b]) continue;
        if (!(profile.d2[b] > 0.0)) continue;  // 0/0 stays flagged as NaN
        ratio[b] = profile.d4[b] / (profile.d2[b] * profile.d2[b]);
    }
    return ratio;
}

}  // namespace driftdiff
