#include "driftdiff/rolling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "driftdiff/errors.hpp"
#include "driftdiff/km.hpp"

namespace driftdiff {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void validate_config(const RollingConfig& cfg, std::size_t series_length) {
    if (cfg.bin_counts.empty()) throw std::invalid_argument("rolling: bin_counts is empty");
    if (cfg.step < 1) throw std::invalid_argument("rolling: step must be >= 1");
    const int min_bins = *std::min_element(cfg.bin_counts.begin(), cfg.bin_counts.end());
    if (cfg.window_length < 10 * min_bins) {
        throw std::invalid_argument("rolling: window_length must be >= 10 * min(bin_counts)");
    }
    if (static_cast<std::size_t>(cfg.window_length) > series_length) {
        throw std::invalid_argument("rolling: window longer than series");
    }
    if (!(cfg.r2_threshold > 0.0 && cfg.r2_threshold <= 1.0)) {
        throw std::invalid_argument("rolling: r2_threshold must be in (0, 1]");
    }
}

// Window slice with its own sigma and clip mask; dates are not needed here.
ReturnSeries make_window(const ReturnSeries& r, std::size_t start, std::size_t length,
                         const RollingConfig& cfg) {
    ReturnSeries w;
    w.values.assign(r.values.begin() + start, r.values.begin() + start + length);
    w.step = r.step;
    w.sigma = cfg.sigma_mode == SigmaMode::Global ? r.sigma : sample_std(w.values);
    w.clip_mask.assign(length, 0);
    if (w.sigma > 0.0) {
        const double bound = cfg.clip_k * w.sigma;
        for (std::size_t i = 0; i < length; ++i) {
            w.clip_mask[i] = std::fabs(w.values[i]) > bound ? 1 : 0;
        }
    }
    return w;
}

}  // namespace

std::vector<int> RollingConfig::default_bin_counts() {
    std::vector<int> counts;
    for (int b = 30; b <= 100; b += 5) counts.push_back(b);
    return counts;
}

bool CoefficientTrack::defined(std::size_t i) const { return !std::isnan(alpha[i]); }

CoefficientTrack rolling_estimate(const ReturnSeries& r, const RollingConfig& cfg,
                                  std::vector<WindowDetail>* details) {
    validate_config(cfg, r.size());
    const std::size_t window = static_cast<std::size_t>(cfg.window_length);
    CoefficientTrack track;
    if (details) details->clear();

    bool any_defined = false;
    for (std::size_t start = 0; start + window <= r.size(); start += cfg.step) {
        const ReturnSeries w = make_window(r, start, window, cfg);
        WindowDetail detail;
        double sum_alpha = 0.0, sum_beta = 0.0, sum_gamma = 0.0, sum_delta = 0.0;
        int passed = 0;
        for (int bins : cfg.bin_counts) {
            double a = kNaN, b = kNaN, g = kNaN, d = kNaN;
            bool pass = false;
            try {
                const KMProfile profile =
                    estimate_km(w, bins, cfg.min_count, KMOrders{true, true, false});
                const DriftFit drift = fit_drift(profile);
                const DiffusionFit diffusion =
                    fit_diffusion(profile, cfg.diffusion_constant_term);
                a = drift.alpha;
                g = drift.gamma;
                b = diffusion.beta;
                d = diffusion.delta;
                pass = !(drift.r_squared < cfg.r2_threshold) &&
                       !(diffusion.r_squared < cfg.r2_threshold);
            } catch (const EstimationError&) {
                // Configuration unusable for this window; counts as not passing.
            }
            if (pass) {
                sum_alpha += a;
                sum_beta += b;
                sum_gamma += g;
                sum_delta += d;
                ++passed;
            }
            if (details) {
                detail.bin_counts.push_back(bins);
                detail.passed.push_back(pass ? 1 : 0);
                detail.alpha.push_back(a);
                detail.beta.push_back(b);
                detail.gamma.push_back(g);
                detail.delta.push_back(d);
            }
        }

        const std::size_t right = start + window - 1;
        track.times.push_back(r.dates.empty() ? Date{static_cast<std::int32_t>(right)}
                                              : r.dates[right]);
        track.right_edge_index.push_back(static_cast<int>(right));
        const double inv = passed > 0 ? 1.0 / passed : 0.0;
        track.alpha.push_back(passed > 0 ? sum_alpha * inv : kNaN);
        track.beta.push_back(passed > 0 ? sum_beta * inv : kNaN);
        track.gamma.push_back(passed > 0 ? sum_gamma * inv : kNaN);
        track.delta.push_back(passed > 0 ? sum_delta * inv : kNaN);
        track.pass_fraction.push_back(static_cast<double>(passed) /
                                      static_cast<double>(cfg.bin_counts.size()));
        any_defined = any_defined || passed > 0;
        if (details) details->push_back(std::move(detail));
    }
    if (!any_defined) warn("rolling_estimate: no window produced a defined estimate");
    return track;
}

const std::vector<std::string>& SensitivityReport::names() {
    static const std::vector<std::string> kNames = {"alpha", "beta", "gamma", "delta"};
    return kNames;
}

namespace {

const std::vector<double>& coefficient(const CoefficientTrack& t, std::size_t which) {
    switch (which) {
        case 0: return t.alpha;
        case 1: return t.beta;
        case 2: return t.gamma;
        default: return t.delta;
    }
}

// Defined knots of one coefficient, ready for interpolation over the
// observation index. Gaps wider than max_gap index units stay undefined.
struct Knots {
    std::vector<double> x;
    std::vector<double> v;

    Knots(const CoefficientTrack& t, std::size_t which) {
        const std::vector<double>& values = coefficient(t, which);
        for (std::size_t i = 0; i < t.size(); ++i) {
            if (std::isnan(values[i])) continue;
            x.push_back(static_cast<double>(t.right_edge_index[i]));
            v.push_back(values[i]);
        }
    }

    double at(double query, double max_gap) const {
        if (x.empty() || query < x.front() || query > x.back()) return kNaN;
        const auto it = std::lower_bound(x.begin(), x.end(), query);
        const std::size_t hi = static_cast<std::size_t>(it - x.begin());
        if (x[hi] == query) return v[hi];
        const std::size_t lo = hi - 1;
        if (x[hi] - x[lo] > max_gap) return kNaN;
        const double f = (query - x[lo]) / (x[hi] - x[lo]);
        return v[lo] + f * (v[hi] - v[lo]);
    }
};

}  // namespace

SensitivityReport sensitivity(const ReturnSeries& r, const RollingConfig& cfg,
                              const std::vector<int>& alt_windows) {
    for (int w : alt_windows) {
        if (static_cast<std::size_t>(w) > r.size()) {
            throw std::invalid_argument("sensitivity: alternative window exceeds series length");
        }
    }
    const CoefficientTrack baseline = rolling_estimate(r, cfg);
    const double max_gap = 3.0 * cfg.step;

    SensitivityReport report;
    report.baseline_window = cfg.window_length;
    report.alt_windows = alt_windows;
    report.times = baseline.times;
    report.deviation.assign(4, {});
    report.deviation_std.assign(4, {});
    report.mean_deviation_std.assign(4, 0.0);

    for (int w : alt_windows) {
        RollingConfig alt_cfg = cfg;
        alt_cfg.window_length = w;
        const CoefficientTrack alt = rolling_estimate(r, alt_cfg);
        for (std::size_t which = 0; which < 4; ++which) {
            const Knots knots(alt, which);
            std::vector<double> abs_dev(baseline.size(), kNaN);
            double sum = 0.0, sumsq = 0.0;
            std::size_t defined = 0;
            const std::vector<double>& base_values = coefficient(baseline, which);
            for (std::size_t i = 0; i < baseline.size(); ++i) {
                if (std::isnan(base_values[i])) continue;
                const double x = static_cast<double>(baseline.right_edge_index[i]);
                const double alt_value = knots.at(x, max_gap);
                if (std::isnan(alt_value)) continue;
                const double diff = alt_value - base_values[i];
                abs_dev[i] = std::fabs(diff);
                sum += diff;
                sumsq += diff * diff;
                ++defined;
            }
            if (defined == 0) {
                throw EstimationError("sensitivity: no overlap between baseline and window " +
                                      std::to_string(w) + " grids");
            }
            const double mean = sum / static_cast<double>(defined);
            const double var = std::max(0.0, sumsq / static_cast<double>(defined) - mean * mean);
            report.deviation[which].push_back(std::move(abs_dev));
            report.deviation_std[which].push_back(std::sqrt(var));
        }
    }
    for (std::size_t which = 0; which < 4; ++which) {
        double total = 0.0;
        for (double s : report.deviation_std[which]) total += s;
        report.mean_deviation_std[which] =
            alt_windows.empty() ? 0.0 : total / static_cast<double>(alt_windows.size());
    }
    return report;
}

}  // namespace driftdiff
