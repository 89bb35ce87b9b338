#include "slarev/beamformers.hpp"
#include "slarev/metrics.hpp"
#include "slarev/spherical_harmonics.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

using namespace slarev;
using slarev::testing::Gen;

namespace {

SimulationGrid grid() { return {16000.0, 8192, 300.0, 5660.0}; }

Placement placement() {
  Placement p;
  p.sla_position = {2.0, 3.0, 1.5};
  p.sma_position = {5.5, 4.5, 2.0};
  return p;
}

struct Case {
  RirTensor rir;
  TimeSplit split;
};

Case room_case(double alpha, int sla_order = 4) {
  const RoomSpec room{{8.0, 7.0, 4.0}, alpha, 343.0};
  const ArrayPhysics sla{0.2, sla_order, ArrayKind::Loudspeaker};
  const ArrayPhysics sma{0.12, 0, ArrayKind::Microphone};
  const auto refl = image_sources(room, placement(), 0.45);
  const RtfMatrix G = normalize_rtf(assemble_rtf(refl, sla, sma, grid()), sla, sma);
  Case c;
  c.rir = rtf_to_rir(G, grid());
  c.split = build_time_split(c.rir, placement(), 343.0);
  return c;
}

const Case& small_room() {
  static const Case c = room_case(0.5);
  return c;
}

MatrixXc random_hermitian_pd(Gen& gen, int n) {
  const MatrixXc m = gen.complex_matrix(n, n);
  return m * m.adjoint() + 0.1 * MatrixXc::Identity(n, n);
}

double c50_of(const Case& c, const VectorXc& gamma) {
  return c50(render_scalar_rir(c.rir, gamma, VectorXc::Ones(1)), c.split).db();
}

}  // namespace

TEST(FixedBeamformers, OmniSelectors) {
  const auto o = omni_sma(5);
  EXPECT_EQ(o.weights.size(), 36);
  EXPECT_EQ(o.weights(0), Complex(1.0));
  EXPECT_EQ(o.weights.tail(35).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(omni_sla(4).weights.size(), 25);
  EXPECT_THROW(omni_sla(-1), DomainError);
}

TEST(FixedBeamformers, PlaneWaveDecompositionPattern) {
  Gen gen(51);
  const Direction look = gen.direction();
  const auto p = pwd_sma(look, 5);
  const double on = std::abs(beam_pattern(p, look));
  EXPECT_NEAR(on, 36.0 / (4 * kPi), 1e-12);
  const double back = std::abs(beam_pattern(p, look.antipode()));
  EXPECT_GE(20.0 * std::log10(on / back), 15.0);
  for (int trial = 0; trial < 500; ++trial) ASSERT_LE(std::abs(beam_pattern(p, gen.direction())), on + 1e-12);
  const auto p0 = pwd_sma(look, 0);
  EXPECT_NEAR(std::abs(beam_pattern(p0, gen.direction())), 1.0 / (4 * kPi), 1e-15);
  EXPECT_NEAR(std::abs(p0.weights(0)), 1.0 / std::sqrt(4 * kPi), 1e-15);
}

TEST(FixedBeamformers, MaxDirectivityPeaksAtLook) {
  Gen gen(52);
  for (int order = 1; order <= 4; ++order) {
    const Direction look = gen.direction();
    const auto b = max_directivity_sla(look, order);
    EXPECT_NEAR(b.weights.norm(), 1.0, 1e-14);
    const double on = std::abs(beam_pattern(b, look));
    for (int trial = 0; trial < 1000; ++trial) ASSERT_LE(std::abs(beam_pattern(b, gen.direction())), on + 1e-12);
  }
}

TEST(FixedBeamformers, CardioidLegendreCoefficients) {
  const VectorXd c1 = cardioid_legendre_coefficients(1);
  EXPECT_NEAR(c1(0), 0.5, 1e-15);
  EXPECT_NEAR(c1(1), 0.5, 1e-15);
  const VectorXd c2 = cardioid_legendre_coefficients(2);
  EXPECT_NEAR(c2(0), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(c2(1), 0.5, 1e-15);
  EXPECT_NEAR(c2(2), 1.0 / 6.0, 1e-15);
  for (int order = 0; order <= 6; ++order)
    for (double x : {-0.9, -0.2, 0.4, 1.0}) {
      double s = 0.0;
      const VectorXd c = cardioid_legendre_coefficients(order);
      for (int n = 0; n <= order; ++n) s += c(n) * assoc_legendre(n, 0, x);
      EXPECT_NEAR(s, std::pow(0.5 * (1.0 + x), order), 1e-13);
    }
}

TEST(FixedBeamformers, CardioidNullAndShape) {
  Gen gen(53);
  for (int order = 1; order <= 4; ++order) {
    const Direction null_dir = gen.direction();
    const auto b = cardioid_sla(null_dir, order);
    EXPECT_NEAR(b.weights.norm(), 1.0, 1e-14);
    const Complex peak = beam_pattern(b, null_dir.antipode());
    EXPECT_LT(std::abs(beam_pattern(b, null_dir)), 1e-12 * std::abs(peak));
    for (int trial = 0; trial < 50; ++trial) {
      const Direction d = gen.direction();
      const double cosang = d.unit().dot(null_dir.antipode().unit());
      const Complex ratio = beam_pattern(b, d) / peak;
      ASSERT_NEAR(ratio.real(), std::pow(0.5 * (1.0 + cosang), order), 1e-10);
      ASSERT_NEAR(ratio.imag(), 0.0, 1e-10);
    }
  }
}

TEST(Gevd, DiagonalProblem) {
  GevdProblem p;
  p.A = VectorXd::LinSpaced(4, 1.0, 4.0).cast<Complex>().asDiagonal();
  p.B = MatrixXc::Identity(4, 4);
  const GevdExtremes e = solve_gevd_extremes(p);
  EXPECT_NEAR(e.upsilon_max, 4.0, 1e-14);
  EXPECT_NEAR(e.upsilon_min, 1.0, 1e-14);
  EXPECT_NEAR(std::abs(e.gamma_max(3)), 1.0, 1e-14);
  EXPECT_NEAR(std::abs(e.gamma_min(0)), 1.0, 1e-14);
}

TEST(Gevd, RandomProblemsResidualAndExtremality) {
  Gen gen(54);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = gen.integer(2, 25);
    GevdProblem p;
    p.A = random_hermitian_pd(gen, n);
    p.B = random_hermitian_pd(gen, n);
    const GevdExtremes e = solve_gevd_extremes(p);
    EXPECT_NEAR(e.gamma_max.norm(), 1.0, 1e-12);
    EXPECT_LT((p.A * e.gamma_max - e.upsilon_max * p.B * e.gamma_max).norm(), 1e-9 * p.A.norm());
    EXPECT_LT((p.A * e.gamma_min - e.upsilon_min * p.B * e.gamma_min).norm(), 1e-9 * p.A.norm());
    const double qmax = rayleigh_quotient(p.A, p.B, e.gamma_max);
    const double qmin = rayleigh_quotient(p.A, p.B, e.gamma_min);
    for (int s = 0; s < 2000; ++s) {
      const double q = rayleigh_quotient(p.A, p.B, gen.unit_vector(n));
      ASSERT_LE(q, qmax);
      ASSERT_GE(q, qmin);
    }
  }
}

TEST(Gevd, RejectsNonHermitianInput) {
  Gen gen(55);
  GevdProblem p;
  p.A = gen.complex_matrix(3, 3);
  p.B = MatrixXc::Identity(3, 3);
  EXPECT_THROW(solve_gevd_extremes(p), DomainError);
  p.A = MatrixXc::Identity(3, 3);
  p.B = MatrixXc::Identity(4, 4);
  EXPECT_THROW(solve_gevd_extremes(p), DomainError);
}

TEST(EnergyMatrices, PartitionOfTheGramMatrix) {
  Gen gen(56);
  RirTensor rir;
  rir.sla_order = 4;
  rir.cols = 2;
  rir.samples = gen.complex_matrix(100000, 50);
  const VectorXc lambda = gen.complex_vector(2);
  const GevdProblem p = build_AB(rir, lambda, 30000, 4);
  EXPECT_LE((p.A - p.A.adjoint()).norm(), 1e-12 * p.A.norm());
  EXPECT_LE((p.B - p.B.adjoint()).norm(), 1e-12 * p.B.norm());
  MatrixXc g = lambda(0) * rir.column_block(0) + lambda(1) * rir.column_block(1);
  const MatrixXc gram = g * g.adjoint();
  EXPECT_LT((p.A + p.B - gram).norm(), 1e-10 * gram.norm());
  const MatrixXc early = g.leftCols(30001) * g.leftCols(30001).adjoint();
  EXPECT_LT((p.A - early).norm(), 1e-10 * early.norm());
  EXPECT_FALSE(p.b_singular);
  const GevdProblem low = build_AB(rir, lambda, 30000, 2);
  EXPECT_EQ(low.dim(), 9);
  EXPECT_LT((low.A - p.A.topLeftCorner(9, 9)).norm(), 1e-10 * low.A.norm());
  EXPECT_THROW(build_AB(rir, lambda, 30000, 5), DomainError);
  EXPECT_THROW(build_AB(rir, VectorXc::Ones(3), 30000, 4), DomainError);
}

TEST(EnergyMatrices, RankDeficientLatePartIsSingular) {
  Gen gen(57);
  RirTensor rir;
  rir.sla_order = 1;
  rir.samples = gen.complex_matrix(200, 4);
  rir.samples.bottomRows(150).rightCols(2).setZero();
  const GevdProblem p = build_AB(rir, VectorXc::Ones(1), 49, 1);
  EXPECT_TRUE(p.b_singular);
}

TEST(Designs, ExtremalOverRandomUnitVectors) {
  Gen gen(58);
  const Case& c = small_room();
  for (Metric metric : {Metric::DRR, Metric::C50}) {
    const int split = metric == Metric::DRR ? c.split.t_d : c.split.t_c;
    const GevdProblem p = build_AB(c.rir, VectorXc::Ones(1), split, 3);
    const DesignResult hi = design(c.rir, c.split, metric, Sense::Max, 3);
    const DesignResult lo = design(c.rir, c.split, metric, Sense::Min, 3);
    EXPECT_FALSE(hi.degenerate);
    const double qmax = rayleigh_quotient(p.A, p.B, hi.beam.weights);
    const double qmin = rayleigh_quotient(p.A, p.B, lo.beam.weights);
    for (int s = 0; s < 10000; ++s) {
      const double q = rayleigh_quotient(p.A, p.B, gen.unit_vector(p.dim()));
      ASSERT_LE(q, qmax);
      ASSERT_GE(q, qmin);
    }
  }
}

TEST(Designs, ClarityOfRandomBeamsLiesBetweenTheDesigns) {
  Gen gen(59);
  const Case& c = small_room();
  const double hi = c50_of(c, design(c.rir, c.split, Metric::C50, Sense::Max, 4).beam.weights);
  const double lo = c50_of(c, design(c.rir, c.split, Metric::C50, Sense::Min, 4).beam.weights);
  for (int s = 0; s < 1000; ++s) {
    const double v = c50_of(c, gen.unit_vector(25));
    ASSERT_LE(v, hi + 1e-9);
    ASSERT_GE(v, lo - 1e-9);
  }
}

TEST(Designs, QuotientGrowsWithOrder) {
  const Case& c = small_room();
  double prev_max = -1.0, prev_min = std::numeric_limits<double>::infinity();
  for (int order = 1; order <= 4; ++order) {
    const double up = design(c.rir, c.split, Metric::C50, Sense::Max, order).upsilon;
    const double down = design(c.rir, c.split, Metric::C50, Sense::Min, order).upsilon;
    EXPECT_GE(up, prev_max * (1.0 - 1e-12));
    EXPECT_LE(down, prev_min * (1.0 + 1e-12));
    prev_max = up;
    prev_min = down;
  }
}

TEST(Designs, PhaseInvariantMetric) {
  Gen gen(60);
  const Case& c = small_room();
  const VectorXc g = design(c.rir, c.split, Metric::C50, Sense::Max, 3).beam.weights;
  const double base = c50_of(c, g);
  for (int s = 0; s < 10; ++s) {
    const Complex phase = std::polar(1.0, gen.uniform(0.0, 2.0 * kPi));
    EXPECT_NEAR(c50_of(c, phase * g), base, 1e-9);
  }
}

TEST(Designs, FreeFieldLateEnergyIsDegenerate) {
  const Case c = room_case(1.0, 2);
  const DesignResult r = design(c.rir, c.split, Metric::DRR, Sense::Max, 2);
  EXPECT_TRUE(r.degenerate);
  EXPECT_TRUE(r.beam.weights.allFinite());
}

TEST(TimeSplits, WindowsFromDelay) {
  const TimeSplit s = time_split_from_delay(500, 48000.0);
  EXPECT_EQ(s.direct_delay, 500);
  EXPECT_EQ(s.t_d, 620);
  EXPECT_EQ(s.t_c, 2900);
  const Case& c = small_room();
  const int delay = static_cast<int>(std::lround(placement().direct_distance() / 343.0 * 16000.0));
  EXPECT_EQ(c.split.direct_delay, delay);
  EXPECT_LT(c.split.t_d, c.split.t_c);
  RirTensor shortened = c.rir;
  shortened.samples.conservativeResize(c.split.t_c, Eigen::NoChange);
  EXPECT_THROW(build_time_split(shortened, placement(), 343.0), DomainError);
}

TEST(BeamformerFiles, JsonRoundTripIsExact) {
  Gen gen(61);
  BeamformerVector b{"maxC50", 3, BeamDomain::Sla, gen.unit_vector(16)};
  const BeamformerVector back = beamformer_from_json(beamformer_json(b));
  EXPECT_EQ(back.label, b.label);
  EXPECT_EQ(back.order, 3);
  EXPECT_EQ(back.domain, BeamDomain::Sla);
  EXPECT_EQ((back.weights - b.weights).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_THROW(beamformer_from_json(R"({"label":"x","order":2,"domain":"normalized-sla","weights":[[1,0]]})"),
               ConfigError);
}
