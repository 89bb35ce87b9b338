#include "detail/nufft.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>

namespace slarev::detail {

namespace {
constexpr int kSpread = 12;         // grid points per side
constexpr int kOversample = 2;
constexpr int kChunk = 32;          // coefficient columns gridded together
}  // namespace

MatrixXc delay_phasor_sums(const VectorXd& delays, const MatrixXc& coeffs, int fft_length,
                           int num_bins) {
  if (coeffs.rows() != delays.size()) throw DomainError("delay_phasor_sums: size mismatch");
  if (num_bins > fft_length / 2 + 1) throw DomainError("delay_phasor_sums: too many bins");

  const int modes = fft_length;
  const int grid_len = kOversample * modes;
  const double h = 2.0 * kPi / grid_len;
  // Greengard-Lee Gaussian width for R = 2
  const double tau = kPi * kSpread / (double(modes) * modes * kOversample * (kOversample - 0.5));
  const double inv4tau = 1.0 / (4.0 * tau);

  const Eigen::Index num_points = delays.size();
  std::vector<int> first(static_cast<std::size_t>(num_points));
  MatrixXd weights(2 * kSpread, num_points);
  for (Eigen::Index j = 0; j < num_points; ++j) {
    double x = std::fmod(2.0 * kPi * delays(j) / fft_length, 2.0 * kPi);
    if (x < 0.0) x += 2.0 * kPi;
    const int l0 = static_cast<int>(std::floor(x / h));
    first[j] = l0 - kSpread + 1;
    for (int t = 0; t < 2 * kSpread; ++t) {
      const double d = x - (first[j] + t) * h;
      weights(t, j) = std::exp(-d * d * inv4tau);
    }
  }

  VectorXd deconv(num_bins);
  const double pre = std::sqrt(kPi / tau);
  for (int m = 0; m < num_bins; ++m) deconv(m) = pre * std::exp(double(m) * m * tau);

  MatrixXc out(num_bins, coeffs.cols());
  Eigen::FFT<double> fft;
  std::vector<Complex> grid_buf(static_cast<std::size_t>(grid_len));
  std::vector<Complex> spec(static_cast<std::size_t>(grid_len));
  MatrixXc grid(kChunk, grid_len);

  for (Eigen::Index c0 = 0; c0 < coeffs.cols(); c0 += kChunk) {
    const Eigen::Index nc = std::min<Eigen::Index>(kChunk, coeffs.cols() - c0);
    grid.setZero();
    const MatrixXc chunk = coeffs.middleCols(c0, nc).transpose();
    for (Eigen::Index j = 0; j < num_points; ++j) {
      for (int t = 0; t < 2 * kSpread; ++t) {
        int l = first[j] + t;
        l = ((l % grid_len) + grid_len) % grid_len;
        grid.col(l).head(nc) += weights(t, j) * chunk.col(j);
      }
    }
    for (Eigen::Index e = 0; e < nc; ++e) {
      for (int l = 0; l < grid_len; ++l) grid_buf[l] = grid(e, l);
      fft.inv(spec, grid_buf);  // (1/M) sum_l g_l e^{+2 pi i m l / M}
      for (int m = 0; m < num_bins; ++m) out(m, c0 + e) = deconv(m) * spec[m];
    }
  }
  return out;
}

}  // namespace slarev::detail
