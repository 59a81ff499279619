#pragma once

#include <cstdint>
#include <vector>

#include "driftdiff/dates.hpp"

namespace driftdiff {

// A coefficient series to segment; NaN marks undefined entries.
struct Signal {
    std::vector<double> values;
    std::vector<Date> times;
};

struct SegmentationConfig {
    int n_breakpoints = 30;
    int min_segment = 2;
    int jump = 1;  // candidate split indices restricted to multiples of jump
};

// Undefined entries replaced by the median of the defined ones.
Signal impute_undefined(const Signal& s);

// A breakpoint at index t splits the signal between t-1 and t.
struct BinsegResult {
    std::vector<int> breakpoints;  // sorted, strictly inside (0, n)
    std::vector<double> gains;     // cost reduction of each greedy split, in split order
    double total_cost = 0.0;       // sum of squared deviations after all splits
};

// Greedy binary segmentation under the piecewise-constant-mean squared-error
// cost. Repeatedly splits the segment whose best admissible split most
// reduces the total cost, ties broken toward the smallest index. Stops early
// if no admissible split remains.
BinsegResult binseg(const std::vector<double>& values, const SegmentationConfig& cfg);

struct DpResult {
    std::vector<int> breakpoints;
    double total_cost = 0.0;
};

// Exact minimizer of the same cost over all segmentations with k breakpoints
// and the given minimum segment length; O(n^2 k) dynamic program. Oracle for
// validating binseg.
DpResult dp_optimal(const std::vector<double>& values, int n_breakpoints, int min_segment);

struct DensityBin {
    Date start;  // inclusive
    Date end;    // exclusive
    int count = 0;
};

struct BreakpointReport {
    std::vector<int> alpha_breaks;
    std::vector<int> beta_breaks;
    std::vector<Date> alpha_dates;
    std::vector<Date> beta_dates;
    std::vector<int> union_breaks;  // merged, deduplicated, sorted
    std::vector<Date> union_dates;
    std::vector<DensityBin> density;
    int bin_months = 6;
};

// Merges the two break sets, maps indices to dates through the shared time
// grid, and bins the union dates into consecutive calendar bins anchored at
// the first track date.
BreakpointReport union_and_density(const std::vector<int>& alpha_breaks,
                                   const std::vector<int>& beta_breaks,
                                   const std::vector<Date>& times, int bin_months = 6);

}  // namespace driftdiff
