#pragma once

#include <string>
#include <vector>

#include "driftdiff/series.hpp"

namespace driftdiff {

enum class SigmaMode {
    Global,     // clip against the whole-series sigma
    PerWindow,  // recompute sigma inside each window (regime shifts move local volatility)
};

struct RollingConfig {
    int window_length = 2000;
    int step = 10;
    std::vector<int> bin_counts = default_bin_counts();
    double r2_threshold = 0.8;
    double clip_k = 1.5;
    SigmaMode sigma_mode = SigmaMode::PerWindow;
    int min_count = 10;
    bool diffusion_constant_term = false;

    static std::vector<int> default_bin_counts();  // 30..100 step 5
};

// Time-resolved coefficients, one entry per window position, timestamped at
// the window's right edge so no value uses future data. Entries are NaN
// where no bin configuration passed the R^2 gate.
struct CoefficientTrack {
    std::vector<Date> times;
    std::vector<int> right_edge_index;  // observation index of each window's last point
    std::vector<double> alpha;
    std::vector<double> beta;
    std::vector<double> gamma;
    std::vector<double> delta;
    std::vector<double> pass_fraction;

    std::size_t size() const { return times.size(); }
    bool defined(std::size_t i) const;
};

// Per-window, per-bin-count fit outcomes, for callers that need to inspect
// the sweep (tests, diagnostics).
struct WindowDetail {
    std::vector<int> bin_counts;
    std::vector<char> passed;
    std::vector<double> alpha, beta, gamma, delta;  // NaN where the fit failed outright
};

// For each window: clip against the window's sigma (per sigma_mode), run the
// bin-count sweep, keep configurations whose drift and diffusion fits both
// reach the R^2 gate, and average the survivors.
CoefficientTrack rolling_estimate(const ReturnSeries& r, const RollingConfig& cfg,
                                  std::vector<WindowDetail>* details = nullptr);

// Window-size robustness: alternative tracks interpolated onto the baseline
// grid (linear over the observation index, gaps wider than 3 baseline steps
// stay undefined). deviation holds |alt - baseline| per baseline time;
// deviation_std is the per-alternative standard deviation over time of the
// signed differences, mean_deviation_std its mean over alternatives.
struct SensitivityReport {
    int baseline_window = 0;
    std::vector<int> alt_windows;
    std::vector<Date> times;  // baseline grid
    // Indexed [coefficient][alternative][time]; coefficient order matches names().
    std::vector<std::vector<std::vector<double>>> deviation;
    std::vector<std::vector<double>> deviation_std;   // [coefficient][alternative]
    std::vector<double> mean_deviation_std;           // [coefficient]

    static const std::vector<std::string>& names();  // alpha, beta, gamma, delta
};

SensitivityReport sensitivity(const ReturnSeries& r, const RollingConfig& cfg,
                              const std::vector<int>& alt_windows);

}  // namespace driftdiff
