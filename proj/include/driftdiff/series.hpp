#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "driftdiff/dates.hpp"

namespace driftdiff {

// Dated, strictly positive price observations. Consecutive observations are
// one unit step apart regardless of calendar gaps; dates are labels only.
struct PriceSeries {
    std::vector<Date> dates;
    std::vector<double> values;
    std::string label;

    std::size_t size() const { return values.size(); }
};

// Throws ValidationError unless: length >= 2, all values > 0, dates strictly
// increasing.
void validate(const PriceSeries& p);

// Log-returns with date alignment and clipping metadata. `sigma` is the
// sample standard deviation of the unclipped values; `clip_mask[i] != 0`
// marks values excluded from estimation by the |r| <= k*sigma rule. Masked
// points are retained so window boundaries stay date-addressable.
struct ReturnSeries {
    std::vector<Date> dates;  // date of the later observation of each return
    std::vector<double> values;
    std::vector<char> clip_mask;
    double sigma = 0.0;
    double step = 1.0;  // nominal sampling interval (delta t0)
    std::string label;

    std::size_t size() const { return values.size(); }
    bool masked(std::size_t i) const { return clip_mask[i] != 0; }
    std::size_t retained_count() const;
};

// values[i] = ln(p[i+1] / p[i]); sigma = sample std (n-1 denominator) over
// all returns, 0 when fewer than two returns exist. No point is masked yet.
ReturnSeries log_returns(const PriceSeries& p);

// Marks |value| > k * sigma. sigma is left untouched, so the operation is
// idempotent for fixed k. sigma == 0 retains every point and warns.
ReturnSeries clip_returns(const ReturnSeries& r, double k = 1.5);

// Sample standard deviation (n-1 denominator); 0 for fewer than two values.
double sample_std(const std::vector<double>& values);

}  // namespace driftdiff
