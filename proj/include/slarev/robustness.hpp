#pragma once

// Monte Carlo sensitivity of fixed SLA designs to additive errors in the RTF matrix.

#include "slarev/beamformers.hpp"
#include "slarev/metrics.hpp"
#include "slarev/rir.hpp"
#include "slarev/rtf.hpp"

#include <cstdint>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

namespace slarev {

/// Where the noise enters. Normalized adds it to G; Physical adds it to
/// H = B_L G B_M and renormalizes, so it is amplified wherever b_n is small.
enum class NoiseDomain { Normalized, Physical };

struct NoiseSpec {
  double snr_db = 30.0;
  std::vector<double> octave_centers{500.0, 1000.0, 2000.0, 4000.0};
  int realizations = 20;
  std::uint64_t seed = 1;
  NoiseDomain domain = NoiseDomain::Normalized;

  static NoiseSpec disabled() {
    NoiseSpec s;
    s.snr_db = std::numeric_limits<double>::infinity();
    return s;
  }
  bool enabled() const { return std::isfinite(snr_db); }
  void validate(const SimulationGrid& grid) const;
};

/// Octave band [center / sqrt 2, center * sqrt 2] with raised-cosine
/// crossovers one sixth of an octave either side of each edge. Neighbouring
/// octaves sum to one across their shared edge.
struct OctaveBand {
  double center = 1000.0;

  double lower_edge() const { return center / std::sqrt(2.0); }
  double upper_edge() const { return center * std::sqrt(2.0); }
  double gain(double frequency) const;
  /// Highest frequency with non-zero gain.
  double stop_frequency() const;
};

/// G + noise. Noise variance per octave band is the element-averaged clean
/// power in that band times 10^(-snr/10); bins outside every band use the
/// nearest band. Deterministic in (spec.seed, realization).
RtfMatrix perturb_rtf(const RtfMatrix& G, const NoiseSpec& spec, int realization);

/// Physical-domain variant; needs the array physics to move between G and H.
RtfMatrix perturb_rtf(const RtfMatrix& G, const NoiseSpec& spec, int realization,
                      const ArrayPhysics& sla, const ArrayPhysics& sma,
                      const Regularization& reg);

/// Zero-phase octave-band filter applied on the full DFT of each sequence.
ScalarRir octave_band_rir(const ScalarRir& h, double center);
RirTensor octave_band_rir(const RirTensor& rir, double center);

struct RobustnessCell {
  double band_hz = 0.0;
  std::string beamformer;
  int order = 0;
  double c50_clean = 0.0;
  double c50_noisy_mean = 0.0;  // mean over realizations of the per-realization C50 in dB
  double c50_noisy_std = 0.0;
  double c50_mean_edc = 0.0;    // C50 of the energy-averaged response
  EdcCurve mean_edc;            // EDC of the energy-averaged response

  double delta() const { return c50_noisy_mean - c50_clean; }
  bool flagged() const { return std::abs(delta()) >= 3.0; }
};

struct RobustnessReport {
  double snr_db = 0.0;
  int realizations = 0;
  std::uint64_t seed = 0;
  std::vector<RobustnessCell> cells;  // band-major, then design order

  const RobustnessCell& find(double band_hz, const std::string& beamformer, int order) const;
};

struct RobustnessInputs {
  /// Normalized RTF; only column 0 (the omni SMA channel) is rendered.
  const RtfMatrix* G = nullptr;
  TimeSplit split;
  /// Needed only for NoiseDomain::Physical.
  const ArrayPhysics* sla = nullptr;
  const ArrayPhysics* sma = nullptr;
  Regularization regularization;
};

RobustnessReport robustness_study(const RobustnessInputs& in,
                                  const std::vector<BeamformerVector>& designs,
                                  const NoiseSpec& spec);

std::string robustness_json(const RobustnessReport& report);
/// band_hz,beamformer,N_L,C50_clean_db,C50_error_db,C50_error_std_db,delta_db,delta_flag
void write_robustness_csv(const RobustnessReport& report, const std::filesystem::path& path);

}  // namespace slarev
