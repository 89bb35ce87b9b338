#pragma once

// Complex orthonormal spherical harmonics
//
//   Y_n^m(theta, phi) = sqrt((2n+1)/(4 pi) (n-m)!/(n+m)!) P_n^m(cos theta) e^{i m phi}
//
// with Y_n^{-m} = (-1)^m conj(Y_n^m). Vectors are stored in ACN order.

#include "slarev/special_functions.hpp"
#include "slarev/types.hpp"

namespace slarev {

template <typename T>
using SHVector = Eigen::Matrix<std::complex<T>, Eigen::Dynamic, 1>;

/// Single SH value Y_n^m(dir).
template <typename T = double>
std::complex<T> sh_eval(const ModeIndex& mode, const Direction& dir) {
  if (!mode.valid()) throw DomainError("sh_eval: invalid mode index");
  const int n = mode.n;
  const int am = std::abs(mode.m);
  // (n-m)!/(n+m)! accumulated as a product to stay in range
  T ratio = T(1);
  for (int k = n - am + 1; k <= n + am; ++k) ratio /= T(k);
  const T norm = std::sqrt(T(2 * n + 1) / (T(4) * T(kPi)) * ratio);
  const T p = assoc_legendre<T>(n, am, T(std::cos(dir.elevation)));
  const std::complex<T> y = norm * p * std::polar(T(1), T(am) * T(dir.azimuth));
  if (mode.m >= 0) return y;
  return (am % 2 == 0 ? T(1) : T(-1)) * std::conj(y);
}

/// All Y_n^m(dir) for n <= order, ACN order, via the normalized Legendre recurrence.
template <typename T = double>
SHVector<T> sh_vector(int order, const Direction& dir) {
  if (order < 0) throw DomainError("sh_vector: negative order");
  const int count = num_channels(order);
  SHVector<T> y(count);
  const T x = std::cos(T(dir.elevation));
  const T s = std::sin(T(dir.elevation));

  // pbar[n][m] for m >= 0, row-major in a flat buffer.
  std::vector<T> pbar(static_cast<std::size_t>((order + 1) * (order + 1)), T(0));
  auto at = [order, &pbar](int n, int m) -> T& { return pbar[n * (order + 1) + m]; };
  at(0, 0) = T(1) / std::sqrt(T(4) * T(kPi));
  for (int m = 1; m <= order; ++m)
    at(m, m) = -std::sqrt(T(2 * m + 1) / T(2 * m)) * s * at(m - 1, m - 1);
  for (int m = 0; m < order; ++m) at(m + 1, m) = std::sqrt(T(2 * m + 3)) * x * at(m, m);
  for (int m = 0; m <= order; ++m) {
    for (int n = m + 2; n <= order; ++n) {
      const T a = std::sqrt(T(4 * n * n - 1) / T(n * n - m * m));
      const T b = std::sqrt(T((n - 1) * (n - 1) - m * m) / T(4 * (n - 1) * (n - 1) - 1));
      at(n, m) = a * (x * at(n - 1, m) - b * at(n - 2, m));
    }
  }

  for (int m = 0; m <= order; ++m) {
    const std::complex<T> phase = std::polar(T(1), T(m) * T(dir.azimuth));
    const T sign = (m % 2 == 0) ? T(1) : T(-1);
    for (int n = m; n <= order; ++n) {
      const std::complex<T> v = at(n, m) * phase;
      y(ModeIndex(n, m).acn()) = v;
      if (m > 0) y(ModeIndex(n, -m).acn()) = sign * std::conj(v);
    }
  }
  return y;
}

/// Per-channel order n for an ACN vector of length num_channels(order).
inline Eigen::VectorXi channel_orders(int order) {
  Eigen::VectorXi n(num_channels(order));
  for (int i = 0; i < n.size(); ++i) n(i) = ModeIndex::from_acn(i).n;
  return n;
}

}  // namespace slarev
