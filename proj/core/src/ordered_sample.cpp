#include "taillab/ordered_sample.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

namespace taillab {

OrderedSample order_sample(std::span<const double> data) {
    if (data.empty()) throw std::invalid_argument("order_sample: empty sample");
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (!std::isfinite(data[i]) || data[i] <= 0.0) {
            throw std::invalid_argument("order_sample: non-positive or non-finite entry at index " +
                                        std::to_string(i));
        }
    }

    OrderedSample s;
    s.values.assign(data.begin(), data.end());
    std::sort(s.values.begin(), s.values.end(), std::greater<>());

    const std::size_t n = s.values.size();
    s.log_values.resize(n);
    for (std::size_t i = 0; i < n; ++i) s.log_values[i] = std::log(s.values[i]);

    // Kahan-compensated prefix sums; Hill estimates difference these.
    s.log_prefix.resize(n);
    double sum = 0.0, comp = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double y = s.log_values[i] - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        s.log_prefix[i] = sum;
    }

    s.run_end.resize(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i + 1;
        while (j < n && s.values[j] == s.values[i]) ++j;
        for (std::size_t q = i; q < j; ++q) s.run_end[q] = static_cast<std::uint32_t>(j);
        if (j - i > 1) s.has_ties = true;
        i = j;
    }
    return s;
}

}  // namespace taillab
