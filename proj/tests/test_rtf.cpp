#include "slarev/experiment.hpp"
#include "slarev/rtf.hpp"
#include "slarev/spherical_harmonics.hpp"

#include <gtest/gtest.h>

using namespace slarev;

namespace {

SimulationGrid small_grid() { return {16000.0, 4096, 300.0, 5660.0}; }
ArrayPhysics sla(int order = 3) { return {0.2, order, ArrayKind::Loudspeaker}; }
ArrayPhysics sma(int order = 4) { return {0.12, order, ArrayKind::Microphone}; }

Placement placement() {
  Placement p;
  p.sla_position = {2.0, 3.0, 1.5};
  p.sma_position = {5.0, 4.0, 2.0};
  return p;
}

ReflectionList free_field() { return image_sources({{8.0, 7.0, 4.0}, 1.0, 343.0}, placement(), 0.1); }
ReflectionList small_room() { return image_sources({{8.0, 7.0, 4.0}, 0.5, 343.0}, placement(), 0.1); }

// Unnormalized H at one bin straight from the definition.
MatrixXc H_oracle(const ReflectionList& refl, const ArrayPhysics& l, const ArrayPhysics& m, double f) {
  const double k = wavenumber(f, l.speed_of_sound);
  MatrixXc G = MatrixXc::Zero(l.channels(), m.channels());
  for (const auto& r : refl)
    G += (r.attenuation / r.path_length) * std::exp(Complex(0.0, k * r.path_length)) *
         sh_vector(l.sh_order, r.dor) * sh_vector(m.sh_order, r.doa).adjoint();
  return mode_strength_diagonal(k, l).asDiagonal() * G * mode_strength_diagonal(k, m).asDiagonal();
}

}  // namespace

TEST(RtfAssembly, MatchesDefinitionAtSampledBins) {
  const auto refl = small_room();
  const SimulationGrid grid = small_grid();
  const RtfMatrix H = assemble_rtf(refl, sla(), sma(), grid);
  EXPECT_FALSE(H.normalized);
  EXPECT_EQ(H.num_bins(), grid.num_bins());
  EXPECT_EQ(H.at(0).cwiseAbs().maxCoeff(), 0.0);
  for (int bin : {1, 77, 400, 1023, 2048}) {
    const MatrixXc ref = H_oracle(refl, sla(), sma(), grid.bin_frequency(bin));
    EXPECT_LT((H.at(bin) - ref).norm(), 1e-9 * ref.norm()) << "bin " << bin;
  }
}

TEST(RtfAssembly, FreeFieldIsRankOne) {
  const RtfMatrix H = assemble_rtf(free_field(), sla(), sma(), small_grid());
  for (int bin = 1; bin < H.num_bins(); ++bin) {
    const Eigen::JacobiSVD<MatrixXc> svd(H.at(bin));
    const auto s = svd.singularValues();
    ASSERT_LT(s(1), 1e-10 * s(0)) << "bin " << bin;
  }
}

TEST(RtfNormalization, ExactRoundTrip) {
  const RtfMatrix H = assemble_rtf(small_room(), sla(), sma(), small_grid());
  const RtfMatrix G = normalize_rtf(H, sla(), sma(), Regularization::exact());
  EXPECT_TRUE(G.normalized);
  const RtfMatrix back = denormalize_rtf(G, sla(), sma());
  EXPECT_LT((back.spectra - H.spectra).norm(), 1e-6 * H.spectra.norm());
  for (int bin = 1; bin < G.num_bins(); ++bin) ASSERT_TRUE(G.bin_clean(bin));
}

TEST(RtfNormalization, ExactInverseRecoversGeometricSum) {
  const auto refl = small_room();
  const SimulationGrid grid = small_grid();
  const RtfMatrix G = normalize_rtf(assemble_rtf(refl, sla(), sma(), grid), sla(), sma(), Regularization::exact());
  const int bin = 512;
  const double k = wavenumber(grid.bin_frequency(bin), 343.0);
  MatrixXc ref = MatrixXc::Zero(G.rows(), G.cols());
  for (const auto& r : refl)
    ref += (r.attenuation / r.path_length) * std::exp(Complex(0.0, k * r.path_length)) *
           sh_vector(3, r.dor) * sh_vector(4, r.doa).adjoint();
  EXPECT_LT((G.at(bin) - ref).norm(), 1e-8 * ref.norm());
}

TEST(RtfNormalization, RegularizedMatchesDirectBinEvaluation) {
  const auto refl = small_room();
  const SimulationGrid grid = small_grid();
  const Regularization reg{};
  const RtfMatrix G = normalize_rtf(assemble_rtf(refl, sla(), sma(), grid), sla(), sma(), reg);
  for (int bin : {20, 300, 1500}) {
    const MatrixXc direct = normalized_rtf_at_bin(refl, sla(), sma(), grid, bin, reg);
    EXPECT_LT((G.at(bin) - direct).norm(), 1e-9 * direct.norm()) << "bin " << bin;
  }
}

TEST(RtfNormalization, MasksFlagWeakHighOrdersAtLowFrequency) {
  const RtfMatrix G = normalize_rtf(assemble_rtf(free_field(), sla(), sma(), small_grid()), sla(), sma());
  const SimulationGrid grid = small_grid();
  const int low = grid.nearest_bin(100.0);
  const int high = grid.nearest_bin(5000.0);
  EXPECT_FALSE(G.sla_mask(low, 0));
  EXPECT_TRUE(G.sla_mask(low, 3));
  EXPECT_TRUE(G.sma_mask(low, 4));
  EXPECT_FALSE(G.bin_clean(low));
  EXPECT_TRUE(G.bin_clean(high));
  // Masked orders are attenuated, never amplified beyond 1/(2 eps).
  EXPECT_TRUE(G.spectra.allFinite());
}

TEST(RtfNormalization, RejectsMisuse) {
  const RtfMatrix H = assemble_rtf(free_field(), sla(), sma(), small_grid());
  const RtfMatrix G = normalize_rtf(H, sla(), sma());
  EXPECT_THROW(normalize_rtf(G, sla(), sma()), DomainError);
  EXPECT_THROW(denormalize_rtf(H, sla(), sma()), DomainError);
  EXPECT_THROW(normalize_rtf(H, sla(2), sma()), DomainError);
  EXPECT_THROW(assemble_rtf(free_field(), sma(), sla(), small_grid()), DomainError);
  EXPECT_THROW(assemble_rtf({}, sla(), sma(), small_grid()), DomainError);
}

TEST(RtfMatrixLayout, TruncationKeepsLeadingBlock) {
  const RtfMatrix H = assemble_rtf(small_room(), sla(), sma(), small_grid());
  const RtfMatrix T = H.truncated(2, 0);
  EXPECT_EQ(T.rows(), 9);
  EXPECT_EQ(T.cols(), 1);
  for (int bin : {5, 600}) EXPECT_EQ((T.at(bin) - H.at(bin).topLeftCorner(9, 1)).norm(), 0.0);
  EXPECT_THROW(H.truncated(4, 0), DomainError);
}

TEST(SimulationGrids, Validation) {
  EXPECT_NO_THROW(small_grid().validate());
  SimulationGrid g = small_grid();
  g.fft_length = 3000;
  EXPECT_THROW(g.validate(), DomainError);
  g = small_grid();
  g.band_high = 9000.0;
  EXPECT_THROW(g.validate(), DomainError);
  g = small_grid();
  g.band_low = 6000.0;
  EXPECT_THROW(g.validate(), DomainError);
  EXPECT_EQ(small_grid().num_bins(), 2049);
  EXPECT_EQ(small_grid().nearest_bin(1000.0), 256);
}

TEST(Regularizations, EpsilonScale) {
  EXPECT_NEAR(Regularization{}.epsilon(5.0), 0.05, 1e-15);
  EXPECT_NEAR(Regularization{20.0}.epsilon(2.0), 0.2, 1e-15);
  EXPECT_EQ(Regularization::exact().epsilon(3.0), 0.0);
}

TEST(ReflectionDelays, SamplesFromPathLength) {
  const auto refl = small_room();
  const VectorXd d = reflection_delays(refl, 16000.0, 343.0);
  for (std::size_t i = 0; i < refl.size(); ++i)
    EXPECT_NEAR(d(static_cast<Eigen::Index>(i)), refl[i].path_length * 16000.0 / 343.0, 1e-12);
}
