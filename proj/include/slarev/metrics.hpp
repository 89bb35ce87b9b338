#pragma once

// Room-acoustic metrics on scalar responses and plane-wave decomposition maps.

#include "slarev/beamformers.hpp"
#include "slarev/rir.hpp"
#include "slarev/rtf.hpp"
#include "slarev/types.hpp"

#include <filesystem>
#include <optional>
#include <string>

namespace slarev {

struct ScalarRir {
  VectorXc samples;
  double sample_rate = 48000.0;
  std::string label;

  double energy() const { return samples.squaredNorm(); }
};

/// h[t] = gamma^H G[t] lambda. gamma may address the leading channels of a higher-order tensor.
ScalarRir render_scalar_rir(const RirTensor& rir, const VectorXc& gamma, const VectorXc& lambda,
                            std::string label = {});

struct EdcCurve {
  VectorXd db;
  double sample_rate = 48000.0;
};

inline constexpr double kEdcFloorDb = -120.0;

/// Schroeder backward integral, 10 log10(sum_{tau >= t} |h|^2 / sum |h|^2), floored at -120 dB.
EdcCurve schroeder_edc(const ScalarRir& h);
/// Same on a precomputed energy envelope |h[t]|^2.
EdcCurve schroeder_edc(const VectorXd& energy, double sample_rate);

/// Early energy (t <= split) against late energy (t > split).
struct EnergyRatio {
  double early = 0.0;
  double late = 0.0;

  bool degenerate() const { return !(late > 0.0) || !(early > 0.0); }
  double db() const { return 10.0 * std::log10(early / late); }
};

EnergyRatio split_energy(const VectorXd& energy, int split);
EnergyRatio drr(const ScalarRir& h, const TimeSplit& split);
EnergyRatio c50(const ScalarRir& h, const TimeSplit& split);

struct T20Result {
  double seconds = 0.0;
  bool valid = false;
};

/// Least-squares slope over the -1 .. -21 dB span, extrapolated to 60 dB decay.
T20Result t20(const EdcCurve& edc);

struct PwdMap {
  VectorXd elevations;  // rad
  VectorXd azimuths;    // rad
  MatrixXd db;          // elevation x azimuth, peak 0 dB, clipped at -floor_db
  double frequency = 0.0;
  double floor_db = 20.0;
};

/// |gamma^H G(k_f) lambda^P(xi_q)| over an equiangular grid, in dB relative to the peak.
PwdMap pwd_map(const RtfMatrix& G, const VectorXc& gamma, double frequency,
               double resolution_deg = 2.0, double floor_db = 20.0);
/// Same, from the normalized matrix at a single frequency.
PwdMap pwd_map(const MatrixXc& Gk, int sma_order, const VectorXc& gamma, double frequency,
               double resolution_deg = 2.0, double floor_db = 20.0);

struct MetricsReport {
  std::string room;
  std::string beamformer;
  int order = 0;
  EnergyRatio drr;
  EnergyRatio c50;
  T20Result t20;
  EdcCurve edc;
  std::optional<PwdMap> pwd;
};

MetricsReport evaluate(const ScalarRir& h, const TimeSplit& split, std::string room,
                       std::string beamformer, int order);

std::string metrics_json(const MetricsReport& report);
void write_edc_csv(const EdcCurve& edc, const std::filesystem::path& path);
void write_pwd_csv(const PwdMap& map, const std::filesystem::path& path);

}  // namespace slarev
