#pragma once

// SH-domain beamformers for the microphone array (omni, plane-wave
// decomposition) and the loudspeaker array (omni, maximum directivity,
// N-th order cardioid, and generalized-eigenvalue designs that maximize or
// minimize an early-to-late energy ratio).

#include "slarev/rir.hpp"
#include "slarev/room.hpp"
#include "slarev/types.hpp"

#include <filesystem>
#include <string>

namespace slarev {

enum class BeamDomain { Sla, Sma };

struct BeamformerVector {
  std::string label;
  int order = 0;
  BeamDomain domain = BeamDomain::Sla;
  VectorXc weights;  // ACN order, length (order + 1)^2
};

/// Directional response gamma^H y(dir) for SLA weights, or y(dir)^H lambda for SMA weights.
Complex beam_pattern(const BeamformerVector& beam, const Direction& dir);

BeamformerVector omni_sla(int order);
BeamformerVector omni_sma(int order);
/// Plane-wave decomposition weights steered at dir: lambda = y(dir).
BeamformerVector pwd_sma(const Direction& dir, int order);
/// gamma proportional to y(look), unit norm.
BeamformerVector max_directivity_sla(const Direction& look, int order);
/// ((1 + cos Theta) / 2)^N about the antipode of `null_toward`, unit norm.
BeamformerVector cardioid_sla(const Direction& null_toward, int order);

/// Legendre coefficients c_n of ((1 + x)/2)^N = sum_n c_n P_n(x), by Gauss-Legendre quadrature.
VectorXd cardioid_legendre_coefficients(int order);

struct TimeSplit {
  int direct_delay = 0;  // samples
  int t_d = 0;           // last sample of the direct-sound window
  int t_c = 0;           // last sample of the early (50 ms) window
};

struct TimeSplitOptions {
  double direct_window_s = 0.0025;
  double clarity_window_s = 0.050;
  int peak_tolerance = 5;  // samples
};

/// Splits derived from the geometric direct delay; verifies the direct peak of
/// the omni/omni response lies within the tolerance. Throws DomainError otherwise.
TimeSplit build_time_split(const RirTensor& rir, const Placement& placement,
                           double speed_of_sound, const TimeSplitOptions& opts = {});

/// Split without the peak check, from a delay in samples.
TimeSplit time_split_from_delay(int direct_delay, double sample_rate,
                                const TimeSplitOptions& opts = {});

struct GevdProblem {
  MatrixXc A;
  MatrixXc B;
  double loading = 0.0;
  bool b_singular = false;

  int dim() const { return static_cast<int>(A.rows()); }
  double default_loading() const { return 1e-6 * B.trace().real() / dim(); }
  MatrixXc loaded_b() const { return B + loading * MatrixXc::Identity(dim(), dim()); }
};

/// A = sum_{t <= split} g g^H, B = sum_{t > split} g g^H with g[t] = G[t] lambda,
/// restricted to the leading (order + 1)^2 loudspeaker channels.
GevdProblem build_AB(const RirTensor& rir, const VectorXc& lambda, int split_at, int order);

struct GevdExtremes {
  VectorXc gamma_max;
  VectorXc gamma_min;
  double upsilon_max = 0.0;
  double upsilon_min = 0.0;
};

/// Extreme generalized eigenpairs of A gamma = upsilon (B + loading I) gamma.
GevdExtremes solve_gevd_extremes(const GevdProblem& p);

/// gamma^H A gamma / gamma^H B gamma
double rayleigh_quotient(const MatrixXc& A, const MatrixXc& B, const VectorXc& gamma);

enum class Metric { DRR, C50 };
enum class Sense { Max, Min };

struct DesignResult {
  BeamformerVector beam;
  double upsilon = 0.0;
  bool degenerate = false;  // B was singular; default loading applied
};

/// Frequency-independent SLA design from a RIR tensor projected onto the SMA
/// omni beamformer (one column) or a full tensor (the omni column is used).
DesignResult design(const RirTensor& rir, const TimeSplit& split, Metric metric, Sense sense,
                    int order);

std::string design_label(Metric metric, Sense sense);

// JSON: {label, order, domain, weights: [[re, im], ...]} in ACN order.
void write_beamformer(const BeamformerVector& beam, const std::filesystem::path& path);
BeamformerVector read_beamformer(const std::filesystem::path& path);
std::string beamformer_json(const BeamformerVector& beam);
BeamformerVector beamformer_from_json(const std::string& text);

}  // namespace slarev
