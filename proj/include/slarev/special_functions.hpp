#pragma once

// Associated Legendre functions and spherical Bessel/Hankel functions.
//
// All routines are templated on the real scalar type. The Legendre functions
// carry the Condon-Shortley phase (-1)^m. Hankel functions are of the first
// kind, h_n = j_n + i y_n, matching an e^{+ikr} outgoing wave.

#include "slarev/types.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <vector>

namespace slarev {

/// P_n^m(x) for 0 <= m <= n, |x| <= 1, including the Condon-Shortley phase.
template <typename T>
T assoc_legendre(int n, int m, T x) {
  using std::abs;
  using std::sqrt;
  if (m < 0 || m > n) throw DomainError("assoc_legendre: require 0 <= m <= n");
  if (!(abs(x) <= T(1))) throw DomainError("assoc_legendre: |x| > 1");

  // P_m^m = (-1)^m (2m-1)!! (1-x^2)^{m/2}
  T pmm = T(1);
  const T s = sqrt((T(1) - x) * (T(1) + x));
  T odd = T(1);
  for (int i = 1; i <= m; ++i) {
    pmm *= -odd * s;
    odd += T(2);
  }
  if (n == m) return pmm;

  T pm1 = x * T(2 * m + 1) * pmm;
  if (n == m + 1) return pm1;

  T pl = T(0);
  for (int l = m + 2; l <= n; ++l) {
    pl = (x * T(2 * l - 1) * pm1 - T(l + m - 1) * pmm) / T(l - m);
    pmm = pm1;
    pm1 = pl;
  }
  return pl;
}

namespace detail {

// Double factorial (2n+1)!! as a floating value.
template <typename T>
T odd_double_factorial(int n) {
  T r = T(1);
  for (int k = 3; k <= 2 * n + 1; k += 2) r *= T(k);
  return r;
}

// j_0..j_nmax at x > 0 by Miller's downward recurrence, normalized against
// whichever of the closed forms j_0 or j_1 is better conditioned.
template <typename T>
void bessel_j_downward(int nmax, T x, std::vector<T>& out) {
  using std::abs;
  using std::cos;
  using std::sin;
  using std::sqrt;
  const int start = nmax + 20 + static_cast<int>(sqrt(T(40) * (T(nmax) + x)));
  std::vector<T> f(static_cast<std::size_t>(start) + 2, T(0));
  f[start + 1] = T(0);
  f[start] = std::numeric_limits<T>::min() * T(1e10);
  const T big = T(1e200);
  for (int k = start; k >= 1; --k) {
    f[k - 1] = T(2 * k + 1) / x * f[k] - f[k + 1];
    if (abs(f[k - 1]) > big) {
      for (int i = k - 1; i <= start; ++i) f[i] /= big;
    }
  }
  const T j0 = sin(x) / x;
  const T j1 = sin(x) / (x * x) - cos(x) / x;
  const T scale = abs(j0) >= abs(j1) ? j0 / f[0] : j1 / f[1];
  out.resize(static_cast<std::size_t>(nmax) + 1);
  for (int k = 0; k <= nmax; ++k) out[k] = f[k] * scale;
}

}  // namespace detail

/// j_0(x) .. j_nmax(x) for x >= 0.
template <typename T>
std::vector<T> sph_bessel_j_all(int nmax, T x) {
  using std::cos;
  using std::sin;
  if (nmax < 0) throw DomainError("sph_bessel_j: negative order");
  if (!(x >= T(0))) throw DomainError("sph_bessel_j: x < 0");
  std::vector<T> out(static_cast<std::size_t>(nmax) + 1, T(0));
  if (x == T(0)) {
    out[0] = T(1);
    return out;
  }
  // Power series for tiny arguments: j_n(x) ~ x^n/(2n+1)!! (1 - x^2/(2(2n+3)) + ...)
  if (x < T(1e-6)) {
    T xn = T(1);
    for (int n = 0; n <= nmax; ++n) {
      const T x2 = x * x;
      out[n] = xn / detail::odd_double_factorial<T>(n) *
               (T(1) - x2 / T(2 * (2 * n + 3)) + x2 * x2 / T(8 * (2 * n + 3) * (2 * n + 5)));
      xn *= x;
    }
    return out;
  }
  if (x > T(nmax)) {
    // Upward recurrence is stable once x exceeds the order.
    out[0] = sin(x) / x;
    if (nmax >= 1) out[1] = sin(x) / (x * x) - cos(x) / x;
    for (int n = 1; n < nmax; ++n) out[n + 1] = T(2 * n + 1) / x * out[n] - out[n - 1];
    return out;
  }
  detail::bessel_j_downward(nmax, x, out);
  return out;
}

/// y_0(x) .. y_nmax(x) for x > 0 by upward recurrence.
template <typename T>
std::vector<T> sph_bessel_y_all(int nmax, T x) {
  using std::cos;
  using std::sin;
  if (!(x > T(0))) throw DomainError("sph_bessel_y: x must be positive");
  std::vector<T> out(static_cast<std::size_t>(nmax) + 1);
  out[0] = -cos(x) / x;
  if (nmax >= 1) out[1] = -cos(x) / (x * x) - sin(x) / x;
  for (int n = 1; n < nmax; ++n) out[n + 1] = T(2 * n + 1) / x * out[n] - out[n - 1];
  return out;
}

template <typename T>
T sph_bessel_j(int n, T x) {
  return sph_bessel_j_all(n, x)[static_cast<std::size_t>(n)];
}

/// j_n'(x) via j_n' = j_{n-1} - (n+1)/x j_n, and j_0' = -j_1.
template <typename T>
T sph_bessel_j_deriv(int n, T x) {
  if (n < 0) throw DomainError("sph_bessel_j_deriv: negative order");
  if (x == T(0)) return n == 1 ? T(1) / T(3) : T(0);
  const auto j = sph_bessel_j_all(n + 1, x);
  if (n == 0) return -j[1];
  return j[n - 1] - T(n + 1) / x * j[n];
}

template <typename T>
T sph_bessel_y(int n, T x) {
  return sph_bessel_y_all(n, x)[static_cast<std::size_t>(n)];
}

/// Spherical Hankel function of the first kind h_n(x) = j_n(x) + i y_n(x).
template <typename T>
std::complex<T> sph_hankel1(int n, T x) {
  if (n < 0) throw DomainError("sph_hankel1: negative order");
  if (!(x > T(0))) throw DomainError("sph_hankel1: singular at x <= 0");
  return {sph_bessel_j(n, x), sph_bessel_y(n, x)};
}

/// h_n'(x) via h_n' = h_{n-1} - (n+1)/x h_n, and h_0' = -h_1.
template <typename T>
std::complex<T> sph_hankel1_deriv(int n, T x) {
  if (n < 0) throw DomainError("sph_hankel1_deriv: negative order");
  if (!(x > T(0))) throw DomainError("sph_hankel1_deriv: singular at x <= 0");
  const auto j = sph_bessel_j_all(n + 1, x);
  const auto y = sph_bessel_y_all(n + 1, x);
  if (n == 0) return {-j[1], -y[1]};
  const T f = T(n + 1) / x;
  return {j[n - 1] - f * j[n], y[n - 1] - f * y[n]};
}

}  // namespace slarev
