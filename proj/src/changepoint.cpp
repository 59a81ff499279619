#include "driftdiff/changepoint.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include "driftdiff/errors.hpp"

namespace driftdiff {

namespace {

// Prefix sums giving the squared-error cost of any segment in O(1).
class SegmentCost {
public:
    explicit SegmentCost(const std::vector<double>& values)
        : csum_(values.size() + 1, 0.0), csq_(values.size() + 1, 0.0) {
        for (std::size_t i = 0; i < values.size(); ++i) {
            csum_[i + 1] = csum_[i] + values[i];
            csq_[i + 1] = csq_[i] + values[i] * values[i];
        }
    }

    // Cost of [first, last) against its own mean.
    double operator()(int first, int last) const {
        const double n = last - first;
        const double sum = csum_[last] - csum_[first];
        return std::max(0.0, csq_[last] - csq_[first] - sum * sum / n);
    }

private:
    std::vector<double> csum_;
    std::vector<double> csq_;
};

struct BestSplit {
    int index = -1;
    double gain = -1.0;  // negative means no admissible split
};

// Best admissible split of [first, last); candidates are multiples of jump
// leaving min_segment points on each side. Ties go to the smallest index.
BestSplit best_split(const SegmentCost& cost, int first, int last, int min_segment, int jump) {
    BestSplit best;
    const double whole = cost(first, last);
    int t = first + min_segment;
    if (jump > 1) t += (jump - t % jump) % jump;
    for (; t <= last - min_segment; t += jump) {
        const double gain = whole - cost(first, t) - cost(t, last);
        if (gain > best.gain) {
            best.gain = gain;
            best.index = t;
        }
    }
    return best;
}

}  // namespace

Signal impute_undefined(const Signal& s) {
    std::vector<double> defined;
    defined.reserve(s.values.size());
    for (double v : s.values) {
        if (!std::isnan(v)) defined.push_back(v);
    }
    if (defined.empty()) throw EstimationError("impute_undefined: all entries undefined");
    std::sort(defined.begin(), defined.end());
    const std::size_t n = defined.size();
    const double median =
        n % 2 == 1 ? defined[n / 2] : 0.5 * (defined[n / 2 - 1] + defined[n / 2]);
    Signal out = s;
    for (double& v : out.values) {
        if (std::isnan(v)) v = median;
    }
    return out;
}

BinsegResult binseg(const std::vector<double>& values, const SegmentationConfig& cfg) {
    const int n = static_cast<int>(values.size());
    if (cfg.n_breakpoints < 1) throw std::invalid_argument("binseg: n_breakpoints must be >= 1");
    if (cfg.min_segment < 2) throw std::invalid_argument("binseg: min_segment must be >= 2");
    if (cfg.jump < 1) throw std::invalid_argument("binseg: jump must be >= 1");
    if (static_cast<std::int64_t>(cfg.n_breakpoints + 1) * cfg.min_segment > n) {
        throw std::invalid_argument("binseg: signal too short for requested segmentation");
    }
    for (double v : values) {
        if (std::isnan(v)) throw std::invalid_argument("binseg: signal contains NaN; impute first");
    }

    const SegmentCost cost(values);

    struct Segment {
        int first, last;
        BestSplit split;
    };
    std::vector<Segment> segments{{0, n, best_split(cost, 0, n, cfg.min_segment, cfg.jump)}};

    BinsegResult result;
    result.total_cost = cost(0, n);
    while (static_cast<int>(result.breakpoints.size()) < cfg.n_breakpoints) {
        int chosen = -1;
        for (std::size_t i = 0; i < segments.size(); ++i) {
            if (segments[i].split.index < 0) continue;
            if (chosen < 0 || segments[i].split.gain > segments[chosen].split.gain ||
                (segments[i].split.gain == segments[chosen].split.gain &&
                 segments[i].split.index < segments[chosen].split.index)) {
                chosen = static_cast<int>(i);
            }
        }
        if (chosen < 0) break;  // nothing left to split

        const Segment seg = segments[chosen];
        result.breakpoints.push_back(seg.split.index);
        result.gains.push_back(seg.split.gain);
        result.total_cost -= seg.split.gain;
        segments[chosen] = {seg.first, seg.split.index,
                            best_split(cost, seg.first, seg.split.index, cfg.min_segment,
                                       cfg.jump)};
        segments.push_back({seg.split.index, seg.last,
                            best_split(cost, seg.split.index, seg.last, cfg.min_segment,
                                       cfg.jump)});
    }
    std::sort(result.breakpoints.begin(), result.breakpoints.end());
    return result;
}

DpResult dp_optimal(const std::vector<double>& values, int n_breakpoints, int min_segment) {
    const int n = static_cast<int>(values.size());
    const int n_segments = n_breakpoints + 1;
    if (n_breakpoints < 1) throw std::invalid_argument("dp_optimal: n_breakpoints must be >= 1");
    if (min_segment < 2) throw std::invalid_argument("dp_optimal: min_segment must be >= 2");
    if (static_cast<std::int64_t>(n_segments) * min_segment > n) {
        throw std::invalid_argument("dp_optimal: signal too short for requested segmentation");
    }

    const SegmentCost cost(values);
    const double inf = std::numeric_limits<double>::infinity();
    // best[m][j]: optimal cost of covering [0, j) with m segments.
    std::vector<std::vector<double>> best(n_segments + 1, std::vector<double>(n + 1, inf));
    std::vector<std::vector<int>> arg(n_segments + 1, std::vector<int>(n + 1, -1));
    for (int j = min_segment; j <= n; ++j) best[1][j] = cost(0, j);
    for (int m = 2; m <= n_segments; ++m) {
        for (int j = m * min_segment; j <= n; ++j) {
            // Last segment is [t, j); iterate t ascending so ties keep the
            // smallest breakpoint.
            for (int t = (m - 1) * min_segment; t + min_segment <= j; ++t) {
                if (best[m - 1][t] == inf) continue;
                const double c = best[m - 1][t] + cost(t, j);
                if (c < best[m][j]) {
                    best[m][j] = c;
                    arg[m][j] = t;
                }
            }
        }
    }

    DpResult result;
    result.total_cost = best[n_segments][n];
    int j = n;
    for (int m = n_segments; m > 1; --m) {
        const int t = arg[m][j];
        result.breakpoints.push_back(t);
        j = t;
    }
    std::reverse(result.breakpoints.begin(), result.breakpoints.end());
    return result;
}

BreakpointReport union_and_density(const std::vector<int>& alpha_breaks,
                                   const std::vector<int>& beta_breaks,
                                   const std::vector<Date>& times, int bin_months) {
    if (bin_months < 1) throw std::invalid_argument("union_and_density: bin_months must be >= 1");
    const int n = static_cast<int>(times.size());
    for (int idx : alpha_breaks) {
        if (idx <= 0 || idx >= n) throw std::invalid_argument("union_and_density: break index out of range");
    }
    for (int idx : beta_breaks) {
        if (idx <= 0 || idx >= n) throw std::invalid_argument("union_and_density: break index out of range");
    }

    BreakpointReport report;
    report.bin_months = bin_months;
    report.alpha_breaks = alpha_breaks;
    report.beta_breaks = beta_breaks;
    std::sort(report.alpha_breaks.begin(), report.alpha_breaks.end());
    std::sort(report.beta_breaks.begin(), report.beta_breaks.end());
    for (int idx : report.alpha_breaks) report.alpha_dates.push_back(times[idx]);
    for (int idx : report.beta_breaks) report.beta_dates.push_back(times[idx]);

    std::set<int> merged(report.alpha_breaks.begin(), report.alpha_breaks.end());
    merged.insert(report.beta_breaks.begin(), report.beta_breaks.end());
    report.union_breaks.assign(merged.begin(), merged.end());
    for (int idx : report.union_breaks) report.union_dates.push_back(times[idx]);

    if (times.empty()) return report;

    // Consecutive calendar bins anchored at the first track date, spanning
    // the whole track so quiet periods show up as zeros.
    const Date anchor = times.front();
    const Date last = times.back();
    for (int k = 0;; ++k) {
        DensityBin bin;
        bin.start = add_months(anchor, k * bin_months);
        bin.end = add_months(anchor, (k + 1) * bin_months);
        if (bin.start > last) break;
        report.density.push_back(bin);
        if (bin.end > last) break;
    }
    for (Date d : report.union_dates) {
        for (auto& bin : report.density) {
            if (d >= bin.start && d < bin.end) {
                ++bin.count;
                break;
            }
        }
    }
    return report;
}

}  // namespace driftdiff
