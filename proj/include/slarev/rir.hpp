#pragma once

// Time-domain MIMO impulse responses G[t] from sampled transfer functions.
//
// Negative frequencies are filled so that every loudspeaker and microphone
// signal is real: G(-k) = J_L conj(G(k)) J_M, where (J v)_{nm} = (-1)^m v_{n,-m}.
// In the complex SH basis this makes G[t] complex with the same conjugation
// symmetry as a real spatial field.

#include "slarev/rtf.hpp"
#include "slarev/types.hpp"

#include <filesystem>
#include <string>

namespace slarev {

/// Zero-phase band-pass: unit gain on [low, high] with raised-cosine skirts
/// over [low/2, low] and [high, high * 2^(1/4)] (clipped at Nyquist).
struct BandPass {
  double low = 300.0;
  double high = 5660.0;

  double gain(double frequency) const;
  static BandPass from_grid(const SimulationGrid& grid) { return {grid.band_low, grid.band_high}; }
};

struct RirTensor {
  int sla_order = 0;
  /// Channels on the microphone side. A tensor projected onto an SMA beamformer has one column.
  int cols = 1;
  double sample_rate = 48000.0;
  MatrixXc samples;  // length x (rows * cols), column i + j * rows
  bool aliasing_warning = false;

  int rows() const { return num_channels(sla_order); }
  int length() const { return static_cast<int>(samples.rows()); }
  Eigen::Index entry(int i, int j) const { return i + Eigen::Index(j) * rows(); }
  MatrixXc at(int t) const;
  /// Rows-by-length view of the responses for microphone column j.
  MatrixXc column_block(int j) const;
  double energy() const { return samples.squaredNorm(); }
};

/// Band-limited inverse DFT of every entry of G.
RirTensor rtf_to_rir(const RtfMatrix& G, const SimulationGrid& grid);

/// Band-limited inverse DFT of G(k) lambda; one microphone column.
RirTensor rtf_to_rir(const RtfMatrix& G, const SimulationGrid& grid, const VectorXc& lambda);

/// Energy of the band-limited spectrum, (1/N) sum over the full DFT of |X|^2, over all entries.
double band_limited_energy(const RtfMatrix& G, const SimulationGrid& grid);

// Container: 8-byte little-endian header length, JSON header, then raw
// little-endian float64 (re, im) pairs, time-major, entry order i + j * rows.
void write_rir(const RirTensor& rir, const std::filesystem::path& path);
RirTensor read_rir(const std::filesystem::path& path);
void write_rir_channel_csv(const RirTensor& rir, int i, int j, const std::filesystem::path& path);

void write_rtf(const RtfMatrix& rtf, const std::filesystem::path& path);
RtfMatrix read_rtf(const std::filesystem::path& path);

}  // namespace slarev
