#include "driftdiff/series.hpp"

#include <cmath>

#include "driftdiff/errors.hpp"

namespace driftdiff {

void validate(const PriceSeries& p) {
    if (p.values.size() != p.dates.size()) {
        throw ValidationError("price series: dates and values differ in length");
    }
    if (p.size() < 2) {
        throw ValidationError("price series: need at least 2 observations, got " +
                              std::to_string(p.size()));
    }
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (!(p.values[i] > 0.0) || !std::isfinite(p.values[i])) {
            throw ValidationError("price series: non-positive price at " +
                                  format_date(p.dates[i]));
        }
        if (i > 0 && !(p.dates[i - 1] < p.dates[i])) {
            throw ValidationError("price series: dates not strictly increasing at " +
                                  format_date(p.dates[i]));
        }
    }
}

double sample_std(const std::vector<double>& values) {
    const std::size_t n = values.size();
    if (n < 2) return 0.0;
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double v : values) {
        const double d = v - mean;
        ss += d * d;
    }
    return std::sqrt(ss / static_cast<double>(n - 1));
}

ReturnSeries log_returns(const PriceSeries& p) {
    validate(p);
    ReturnSeries r;
    r.label = p.label;
    const std::size_t n = p.size() - 1;
    r.dates.reserve(n);
    r.values.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        r.dates.push_back(p.dates[i + 1]);
        r.values.push_back(std::log(p.values[i + 1] / p.values[i]));
    }
    r.clip_mask.assign(n, 0);
    r.sigma = sample_std(r.values);
    return r;
}

ReturnSeries clip_returns(const ReturnSeries& r, double k) {
    if (!(k > 0.0)) throw ValidationError("clip threshold k must be positive");
    ReturnSeries out = r;
    if (out.clip_mask.size() != out.values.size()) out.clip_mask.assign(out.values.size(), 0);
    if (out.sigma == 0.0) {
        warn("clip_returns: sigma is 0, retaining all points");
        for (auto& m : out.clip_mask) m = 0;
        return out;
    }
    const double bound = k * out.sigma;
    for (std::size_t i = 0; i < out.values.size(); ++i) {
        out.clip_mask[i] = std::fabs(out.values[i]) > bound ? 1 : 0;
    }
    return out;
}

std::size_t ReturnSeries::retained_count() const {
    std::size_t n = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (clip_mask.empty() || clip_mask[i] == 0) ++n;
    }
    return n;
}

}  // namespace driftdiff
