#pragma once

#include "slarev/types.hpp"

namespace slarev::detail {

/// Sums of delayed unit phasors on a DFT grid:
///
///   F(m, e) = sum_j coeffs(j, e) exp(2 pi i m delays(j) / fft_length),  m = 0 .. num_bins-1
///
/// evaluated by Gaussian gridding onto a 2x oversampled grid (type-1
/// non-uniform FFT). Relative accuracy is around 1e-12.
MatrixXc delay_phasor_sums(const VectorXd& delays, const MatrixXc& coeffs, int fft_length,
                           int num_bins);

}  // namespace slarev::detail
