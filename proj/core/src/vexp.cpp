#include "taillab/vexp.hpp"

#include <cmath>

namespace taillab {

void exp_inplace(double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] = std::exp(x[i]);
}

}  // namespace taillab
