#pragma once

#include <complex>
#include <vector>

namespace fourvol::fft {

enum class Direction { forward = -1, backward = +1 };

/// In-place unnormalized DFT: x[k] <- sum_m x[m] exp(sign * 2 pi i k m / n),
/// sign = -1 for forward and +1 for backward. Plans are cached per size and
/// direction; safe to call from several threads.
void transform(std::vector<std::complex<double>>& x, Direction dir);

}  // namespace fourvol::fft
