#include "slarev/radial.hpp"
#include "slarev/special_functions.hpp"

#include <gtest/gtest.h>

using namespace slarev;

namespace {

const Complex I(0.0, 1.0);

// Closed forms h_0 = -i e^{ix}/x, h_1 = -e^{ix}(x + i)/x^2 and their derivatives.
Complex h0(double x) { return -I * std::exp(I * x) / x; }
Complex h1(double x) { return -std::exp(I * x) * (x + I) / (x * x); }
Complex h1_deriv(double x) { return h0(x) - 2.0 / x * h1(x); }

Complex bracket_closed(int n, double x) {
  if (n == 0) {
    const double j = std::sin(x) / x;
    const double jd = -(std::sin(x) / (x * x) - std::cos(x) / x);
    return j - jd / (-h1(x)) * h0(x);
  }
  const double j = std::sin(x) / (x * x) - std::cos(x) / x;
  const double jd = std::sin(x) / x - 2.0 / x * j;
  return j - jd / h1_deriv(x) * h1(x);
}

ArrayPhysics sla() { return {0.2, 4, ArrayKind::Loudspeaker, 1.2, 343.0}; }
ArrayPhysics sma() { return {0.12, 5, ArrayKind::Microphone, 1.2, 343.0}; }

}  // namespace

TEST(RigidSphere, MatchesClosedForms) {
  for (double x : {0.05, 0.5, 1.0, 1.8153, 3.3, 9.0}) {
    EXPECT_LT(std::abs(rigid_sphere_term(0, x) - bracket_closed(0, x)), 1e-12 * std::abs(bracket_closed(0, x)));
    EXPECT_LT(std::abs(rigid_sphere_term(1, x) - bracket_closed(1, x)), 1e-12 * std::abs(bracket_closed(1, x)));
  }
}

TEST(RigidSphere, WronskianForm) {
  for (int n = 0; n <= 8; ++n)
    for (double x : {0.1, 0.6, 2.0, 7.5, 30.0}) {
      const Complex expected = I / (x * x * sph_hankel1_deriv(n, x));
      EXPECT_LT(std::abs(rigid_sphere_term(n, x) - expected), 1e-10 * std::abs(expected));
    }
}

TEST(RigidSphere, SmallArgumentLimit) {
  // b_0 -> 1 as x -> 0; b_n ~ x^n scaling for n >= 1
  EXPECT_NEAR(std::abs(rigid_sphere_term(0, 1e-4) - 1.0), 0.0, 1e-6);
  const double r = std::abs(rigid_sphere_term(2, 2e-3)) / std::abs(rigid_sphere_term(2, 1e-3));
  EXPECT_NEAR(r, 4.0, 1e-3);
}

TEST(ModeStrengths, MicrophonePrefactor) {
  const ArrayPhysics m = sma();
  const double k = 0.5 / m.radius;
  EXPECT_LT(std::abs(radial_sma(1, k, m) - 4.0 * kPi * (-I) * bracket_closed(1, 0.5)), 1e-12);
  EXPECT_LT(std::abs(radial_sma(0, 1e-3 / m.radius, m) - 4.0 * kPi), 1e-4);
  // (-i)^2 = -1 relative to the bracket
  const Complex ratio = radial_sma(2, 8.0, m) / rigid_sphere_term(2, 8.0 * m.radius);
  EXPECT_NEAR(ratio.real(), -4.0 * kPi, 1e-10);
  EXPECT_NEAR(ratio.imag(), 0.0, 1e-10);
}

TEST(ModeStrengths, LoudspeakerPrefactor) {
  const ArrayPhysics l = sla();
  const double k = 9.07;
  const double pre = l.air_density * l.speed_of_sound * l.radius * l.radius;
  const Complex want0 = pre * (-I) * rigid_sphere_term(0, k * l.radius);
  const Complex want3 = pre * Complex(1.0, 0.0) * rigid_sphere_term(3, k * l.radius);  // (-i)^4
  EXPECT_LT(std::abs(radial_sla(0, k, l) - want0), 1e-12 * std::abs(want0));
  EXPECT_LT(std::abs(radial_sla(3, k, l) - want3), 1e-12 * std::abs(want3));
}

TEST(ModeStrengths, DiagonalRepeatsOverDegrees) {
  const ArrayPhysics m = sma();
  const double k = wavenumber(1000.0, m.speed_of_sound);
  const VectorXc b = mode_strengths(k, m);
  const VectorXc d = mode_strength_diagonal(k, m);
  ASSERT_EQ(d.size(), 36);
  for (int i = 0; i < d.size(); ++i) EXPECT_EQ(d(i), b(ModeIndex::from_acn(i).n));
}

TEST(ModeStrengths, HigherOrdersWeakAtLowFrequency) {
  const ArrayPhysics l = sla();
  const VectorXc b = mode_strengths(wavenumber(200.0, l.speed_of_sound), l);
  for (int n = 1; n <= l.sh_order; ++n) EXPECT_LT(std::abs(b(n)), std::abs(b(n - 1)));
}

TEST(ArrayPhysicsValidation, RejectsBadValues) {
  ArrayPhysics p = sma();
  EXPECT_NO_THROW(p.validate());
  p.radius = 0.0;
  EXPECT_THROW(p.validate(), DomainError);
  p = sma();
  p.air_density = -1.0;
  EXPECT_THROW(p.validate(), DomainError);
  p = sma();
  p.speed_of_sound = 0.0;
  EXPECT_THROW(p.validate(), DomainError);
  EXPECT_THROW(sma().truncated(6), DomainError);
  EXPECT_EQ(sma().truncated(2).channels(), 9);
  EXPECT_THROW(radial_sma(0, 0.0, sma()), DomainError);
  EXPECT_THROW(radial_sla(0, 1.0, sma()), DomainError);
  EXPECT_THROW(radial_sma(0, 1.0, sla()), DomainError);
}
