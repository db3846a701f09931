#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace taillab {

// A positive sample sorted in descending order, with cached logs and log
// prefix sums so that a Hill estimate for any k is O(1). run_end groups ties:
// run_end[i] is one past the last index holding the same value as values[i].
// Tail samples of integer network degrees are heavily tied, and the KS
// distance only changes at distinct values, so the grouped scan pays off.
struct OrderedSample {
    std::vector<double> values;        // descending, values[0] is the maximum
    std::vector<double> log_values;    // log(values[i])
    std::vector<double> log_prefix;    // log_prefix[i] = sum of log_values[0..i]
    std::vector<std::uint32_t> run_end;
    bool has_ties = false;

    int n() const { return static_cast<int>(values.size()); }
};

// Sorts and caches. Rejects empty input and any non-positive or non-finite
// entry (the error message names the offending index).
OrderedSample order_sample(std::span<const double> data);

}  // namespace taillab
