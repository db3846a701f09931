#pragma once

#include <cstddef>

namespace taillab {

// Elementwise x[i] = exp(x[i]). Lives in its own translation unit compiled so
// the compiler may emit libmvec vector calls; the KS profile spends most of
// its time here.
void exp_inplace(double* x, std::size_t n);

}  // namespace taillab
