#pragma once

// Rigid-sphere radial functions (mode strengths) for a spherical loudspeaker
// array and a spherical microphone array.

#include "slarev/types.hpp"

namespace slarev {

enum class ArrayKind { Loudspeaker, Microphone };

struct ArrayPhysics {
  double radius = 0.1;            // m
  int sh_order = 0;
  ArrayKind kind = ArrayKind::Loudspeaker;
  double air_density = 1.2;       // kg/m^3
  double speed_of_sound = 343.0;  // m/s

  void validate() const;
  int channels() const { return num_channels(sh_order); }
  /// Same physics with a lower SH order.
  ArrayPhysics truncated(int order) const;
};

/// j_n(x) - j_n'(x)/h_n'(x) h_n(x), the rigid-sphere bracket.
Complex rigid_sphere_term(int n, double x);

/// rho c r^2 (-i)^{n+1} (j_n - j_n'/h_n' h_n) at x = k r_L.
Complex radial_sla(int n, double k, const ArrayPhysics& phys);

/// 4 pi (-i)^n (j_n - j_n'/h_n' h_n) at x = k r_M.
Complex radial_sma(int n, double k, const ArrayPhysics& phys);

/// b_0 .. b_N for the array's kind and order.
VectorXc mode_strengths(double k, const ArrayPhysics& phys);

/// Mode strengths repeated over degrees: the diagonal of B_L or B_M (ACN order).
VectorXc mode_strength_diagonal(double k, const ArrayPhysics& phys);

inline double wavenumber(double frequency_hz, double speed_of_sound) {
  return 2.0 * kPi * frequency_hz / speed_of_sound;
}

}  // namespace slarev
