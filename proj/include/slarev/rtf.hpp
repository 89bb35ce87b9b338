#pragma once

// SH-domain MIMO room transfer functions: assembly from an image-source list
// and normalization by the arrays' mode strengths.

#include "slarev/radial.hpp"
#include "slarev/room.hpp"
#include "slarev/types.hpp"

#include <limits>

namespace slarev {

struct SimulationGrid {
  double sample_rate = 48000.0;
  int fft_length = 1 << 17;
  double band_low = 300.0;
  double band_high = 5660.0;

  void validate() const;
  int num_bins() const { return fft_length / 2 + 1; }
  double bin_frequency(int bin) const { return bin * sample_rate / fft_length; }
  int nearest_bin(double frequency) const;
  double duration() const { return fft_length / sample_rate; }
};

using BoolArray = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// Per-bin (N_L+1)^2 x (N_M+1)^2 transfer matrices, stored entry-major so each
/// matrix entry's spectrum is contiguous.
struct RtfMatrix {
  int sla_order = 0;
  int sma_order = 0;
  SimulationGrid grid;
  bool normalized = false;
  MatrixXc spectra;   // num_bins x (rows * cols), column i + j * rows
  BoolArray sla_mask;  // num_bins x (sla_order + 1), set where regularization dominates b_n
  BoolArray sma_mask;  // num_bins x (sma_order + 1)

  int rows() const { return num_channels(sla_order); }
  int cols() const { return num_channels(sma_order); }
  int num_bins() const { return static_cast<int>(spectra.rows()); }
  Eigen::Index entry(int i, int j) const { return i + Eigen::Index(j) * rows(); }

  MatrixXc at(int bin) const;
  void set(int bin, const MatrixXc& value);
  /// Leading-block restriction to lower array orders.
  RtfMatrix truncated(int sla_order_new, int sma_order_new) const;
  /// Whether any order used at `bin` was dominated by regularization.
  bool bin_clean(int bin) const;
};

struct Regularization {
  /// Floor of the regularized inverse, in dB below the largest |b_n| at each bin.
  double snr_db = 40.0;

  static Regularization exact() { return {std::numeric_limits<double>::infinity()}; }
  double epsilon(double max_mode_strength) const;
};

/// Unnormalized H(k) = sum_g a_g h^L_g(k) [h^M_g(k)]^H on the grid's bins. Bin 0 is zero.
RtfMatrix assemble_rtf(const ReflectionList& reflections, const ArrayPhysics& sla,
                       const ArrayPhysics& sma, const SimulationGrid& grid);

/// G(k) = B_L^+(k) H(k) B_M^+(k), with x^+ = conj(x) / (|x|^2 + eps^2).
RtfMatrix normalize_rtf(const RtfMatrix& H, const ArrayPhysics& sla, const ArrayPhysics& sma,
                        const Regularization& reg = {});

/// H(k) = B_L(k) G(k) B_M(k); inverse of normalize_rtf at bins where the mask is clean.
RtfMatrix denormalize_rtf(const RtfMatrix& G, const ArrayPhysics& sla, const ArrayPhysics& sma);

/// Reflection delays in samples, r_g fs / c.
VectorXd reflection_delays(const ReflectionList& reflections, double sample_rate,
                           double speed_of_sound);

}  // namespace slarev
