#pragma once

#include <complex>
#include <vector>

namespace imclean::fft {

/// In-place 2-D complex DFT on a row-major n x n buffer.
/// sign = -1 forward, +1 backward; neither direction is normalized.
/// Thread-safe: plan creation is serialized internally, execution is not.
void transform_2d(std::complex<double>* data, int n, int sign);

/// Forward 2-D DFT of a real map into a full complex spectrum (row-major).
std::vector<std::complex<double>> forward_2d(const double* map, int n);

}  // namespace imclean::fft
