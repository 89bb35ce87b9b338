#include "slarev/rtf.hpp"

#include "detail/nufft.hpp"
#include "slarev/spherical_harmonics.hpp"

#include <cmath>

namespace slarev {

void SimulationGrid::validate() const {
  if (!(sample_rate > 0.0)) throw DomainError("sample rate must be positive");
  if (fft_length < 2 || (fft_length & (fft_length - 1)) != 0)
    throw DomainError("fft_length must be a power of two");
  if (!(band_low > 0.0 && band_low < band_high && band_high < sample_rate / 2.0))
    throw DomainError("band edges must satisfy 0 < low < high < fs/2");
}

int SimulationGrid::nearest_bin(double frequency) const {
  return static_cast<int>(std::lround(frequency * fft_length / sample_rate));
}

MatrixXc RtfMatrix::at(int bin) const {
  MatrixXc m(rows(), cols());
  for (int j = 0; j < cols(); ++j)
    for (int i = 0; i < rows(); ++i) m(i, j) = spectra(bin, entry(i, j));
  return m;
}

void RtfMatrix::set(int bin, const MatrixXc& value) {
  for (int j = 0; j < cols(); ++j)
    for (int i = 0; i < rows(); ++i) spectra(bin, entry(i, j)) = value(i, j);
}

RtfMatrix RtfMatrix::truncated(int sla_order_new, int sma_order_new) const {
  if (sla_order_new < 0 || sla_order_new > sla_order || sma_order_new < 0 ||
      sma_order_new > sma_order)
    throw DomainError("RtfMatrix::truncated: order out of range");
  RtfMatrix out;
  out.sla_order = sla_order_new;
  out.sma_order = sma_order_new;
  out.grid = grid;
  out.normalized = normalized;
  out.spectra.resize(num_bins(), Eigen::Index(out.rows()) * out.cols());
  for (int j = 0; j < out.cols(); ++j)
    for (int i = 0; i < out.rows(); ++i) out.spectra.col(out.entry(i, j)) = spectra.col(entry(i, j));
  if (sla_mask.size() > 0) out.sla_mask = sla_mask.leftCols(sla_order_new + 1);
  if (sma_mask.size() > 0) out.sma_mask = sma_mask.leftCols(sma_order_new + 1);
  return out;
}

bool RtfMatrix::bin_clean(int bin) const {
  const bool l = sla_mask.size() == 0 || !sla_mask.row(bin).any();
  const bool m = sma_mask.size() == 0 || !sma_mask.row(bin).any();
  return l && m;
}

double Regularization::epsilon(double max_mode_strength) const {
  if (std::isinf(snr_db)) return 0.0;
  return std::pow(10.0, -snr_db / 20.0) * max_mode_strength;
}

VectorXd reflection_delays(const ReflectionList& reflections, double sample_rate,
                           double speed_of_sound) {
  VectorXd d(static_cast<Eigen::Index>(reflections.size()));
  for (std::size_t g = 0; g < reflections.size(); ++g)
    d(g) = reflections[g].path_length * sample_rate / speed_of_sound;
  return d;
}

namespace {

void check_arrays(const ArrayPhysics& sla, const ArrayPhysics& sma) {
  sla.validate();
  sma.validate();
  if (sla.kind != ArrayKind::Loudspeaker || sma.kind != ArrayKind::Microphone)
    throw DomainError("expected a loudspeaker array and a microphone array");
  if (sla.speed_of_sound != sma.speed_of_sound)
    throw DomainError("arrays disagree on the speed of sound");
}

}  // namespace

RtfMatrix assemble_rtf(const ReflectionList& reflections, const ArrayPhysics& sla,
                       const ArrayPhysics& sma, const SimulationGrid& grid) {
  if (reflections.empty()) throw DomainError("assemble_rtf: empty reflection list");
  check_arrays(sla, sma);
  grid.validate();

  const int rows = sla.channels();
  const int cols = sma.channels();
  const auto num_refl = static_cast<Eigen::Index>(reflections.size());
  const double c = sla.speed_of_sound;

  // Frequency-independent part of each reflection: (a_g / r_g) Y_L(beta_g), Y_M(xi_g)
  MatrixXc yl(num_refl, rows);
  MatrixXc ym(num_refl, cols);
  for (Eigen::Index g = 0; g < num_refl; ++g) {
    const Reflection& r = reflections[g];
    yl.row(g) = (r.attenuation / r.path_length) * sh_vector(sla.sh_order, r.dor).transpose();
    ym.row(g) = sh_vector(sma.sh_order, r.doa).transpose();
  }
  const VectorXd delays = reflection_delays(reflections, grid.sample_rate, c);

  RtfMatrix H;
  H.sla_order = sla.sh_order;
  H.sma_order = sma.sh_order;
  H.grid = grid;
  H.normalized = false;
  H.spectra.resize(grid.num_bins(), Eigen::Index(rows) * cols);

  MatrixXc coeffs(num_refl, rows);
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) coeffs.col(i) = yl.col(i).cwiseProduct(ym.col(j).conjugate());
    H.spectra.middleCols(Eigen::Index(j) * rows, rows) =
        detail::delay_phasor_sums(delays, coeffs, grid.fft_length, grid.num_bins());
  }

  H.spectra.row(0).setZero();
  for (int bin = 1; bin < grid.num_bins(); ++bin) {
    const double k = wavenumber(grid.bin_frequency(bin), c);
    const VectorXc bl = mode_strength_diagonal(k, sla);
    const VectorXc bm = mode_strength_diagonal(k, sma);
    for (int j = 0; j < cols; ++j)
      for (int i = 0; i < rows; ++i) H.spectra(bin, H.entry(i, j)) *= bl(i) * bm(j);
  }
  return H;
}

namespace {

// Regularized reciprocal of the mode strengths at one bin; flags orders where eps dominates.
VectorXc regularized_inverse(const VectorXc& b, const Regularization& reg,
                             Eigen::Ref<Eigen::Array<bool, 1, Eigen::Dynamic>> mask) {
  const double eps = reg.epsilon(b.cwiseAbs().maxCoeff());
  VectorXc inv(b.size());
  for (Eigen::Index n = 0; n < b.size(); ++n) {
    const double mag2 = std::norm(b(n));
    inv(n) = std::conj(b(n)) / (mag2 + eps * eps);
    mask(n) = std::abs(b(n)) < eps;
  }
  return inv;
}

VectorXc per_channel(const VectorXc& per_order) {
  const auto order = static_cast<int>(per_order.size()) - 1;
  VectorXc d(num_channels(order));
  for (int n = 0; n <= order; ++n) d.segment(n * n, 2 * n + 1).setConstant(per_order(n));
  return d;
}

}  // namespace

RtfMatrix normalize_rtf(const RtfMatrix& H, const ArrayPhysics& sla, const ArrayPhysics& sma,
                        const Regularization& reg) {
  if (H.normalized) throw DomainError("normalize_rtf: input is already normalized");
  check_arrays(sla, sma);
  if (sla.sh_order != H.sla_order || sma.sh_order != H.sma_order)
    throw DomainError("normalize_rtf: array orders do not match the RTF");

  RtfMatrix G = H;
  G.normalized = true;
  G.sla_mask = BoolArray::Constant(H.num_bins(), H.sla_order + 1, true);
  G.sma_mask = BoolArray::Constant(H.num_bins(), H.sma_order + 1, true);
  G.spectra.row(0).setZero();
  const double c = sla.speed_of_sound;
  Eigen::Array<bool, 1, Eigen::Dynamic> ml(H.sla_order + 1), mm(H.sma_order + 1);
  for (int bin = 1; bin < H.num_bins(); ++bin) {
    const double k = wavenumber(H.grid.bin_frequency(bin), c);
    const VectorXc il = per_channel(regularized_inverse(mode_strengths(k, sla), reg, ml));
    const VectorXc im = per_channel(regularized_inverse(mode_strengths(k, sma), reg, mm));
    G.sla_mask.row(bin) = ml;
    G.sma_mask.row(bin) = mm;
    for (int j = 0; j < G.cols(); ++j)
      for (int i = 0; i < G.rows(); ++i) G.spectra(bin, G.entry(i, j)) *= il(i) * im(j);
  }
  return G;
}

RtfMatrix denormalize_rtf(const RtfMatrix& G, const ArrayPhysics& sla, const ArrayPhysics& sma) {
  if (!G.normalized) throw DomainError("denormalize_rtf: input is not normalized");
  check_arrays(sla, sma);
  RtfMatrix H = G;
  H.normalized = false;
  H.spectra.row(0).setZero();
  for (int bin = 1; bin < G.num_bins(); ++bin) {
    const double k = wavenumber(G.grid.bin_frequency(bin), sla.speed_of_sound);
    const VectorXc bl = mode_strength_diagonal(k, sla);
    const VectorXc bm = mode_strength_diagonal(k, sma);
    for (int j = 0; j < G.cols(); ++j)
      for (int i = 0; i < G.rows(); ++i) H.spectra(bin, H.entry(i, j)) *= bl(i) * bm(j);
  }
  return H;
}

}  // namespace slarev
