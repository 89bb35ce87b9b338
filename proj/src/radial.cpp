#include "slarev/radial.hpp"

#include "slarev/special_functions.hpp"

namespace slarev {

namespace {

Complex minus_i_pow(int p) {
  switch (((p % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, -1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, 1.0};
  }
}

}  // namespace

void ArrayPhysics::validate() const {
  if (!(radius > 0.0)) throw DomainError("array radius must be positive");
  if (sh_order < 0) throw DomainError("array SH order must be non-negative");
  if (!(air_density > 0.0)) throw DomainError("air density must be positive");
  if (!(speed_of_sound > 0.0)) throw DomainError("speed of sound must be positive");
}

ArrayPhysics ArrayPhysics::truncated(int order) const {
  if (order < 0 || order > sh_order) throw DomainError("truncated: order out of range");
  ArrayPhysics p = *this;
  p.sh_order = order;
  return p;
}

Complex rigid_sphere_term(int n, double x) {
  const double j = sph_bessel_j(n, x);
  const double jd = sph_bessel_j_deriv(n, x);
  const Complex h = sph_hankel1(n, x);
  const Complex hd = sph_hankel1_deriv(n, x);
  return j - jd / hd * h;
}

Complex radial_sla(int n, double k, const ArrayPhysics& phys) {
  if (!(k > 0.0)) throw DomainError("radial_sla: wavenumber must be positive");
  if (phys.kind != ArrayKind::Loudspeaker) throw DomainError("radial_sla: not a loudspeaker array");
  const double r = phys.radius;
  return phys.air_density * phys.speed_of_sound * r * r * minus_i_pow(n + 1) *
         rigid_sphere_term(n, k * r);
}

Complex radial_sma(int n, double k, const ArrayPhysics& phys) {
  if (!(k > 0.0)) throw DomainError("radial_sma: wavenumber must be positive");
  if (phys.kind != ArrayKind::Microphone) throw DomainError("radial_sma: not a microphone array");
  return 4.0 * kPi * minus_i_pow(n) * rigid_sphere_term(n, k * phys.radius);
}

VectorXc mode_strengths(double k, const ArrayPhysics& phys) {
  VectorXc b(phys.sh_order + 1);
  for (int n = 0; n <= phys.sh_order; ++n)
    b(n) = phys.kind == ArrayKind::Loudspeaker ? radial_sla(n, k, phys) : radial_sma(n, k, phys);
  return b;
}

VectorXc mode_strength_diagonal(double k, const ArrayPhysics& phys) {
  const VectorXc b = mode_strengths(k, phys);
  VectorXc d(phys.channels());
  for (int n = 0; n <= phys.sh_order; ++n)
    d.segment(n * n, 2 * n + 1).setConstant(b(n));
  return d;
}

}  // namespace slarev
