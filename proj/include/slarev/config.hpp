#pragma once

// Experiment configuration: JSON ingestion, validation and run profiles.

#include "slarev/beamformers.hpp"
#include "slarev/radial.hpp"
#include "slarev/robustness.hpp"
#include "slarev/room.hpp"
#include "slarev/rtf.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace slarev {

enum class DesignKind { Omni, MaxFix, MinFix, MaxDrr, MinDrr, MaxC50, MinC50 };

std::string to_string(DesignKind kind);
DesignKind design_kind_from_string(const std::string& label);

struct BeamformerCell {
  DesignKind kind = DesignKind::Omni;
  int order = 0;

  std::string label() const { return to_string(kind); }
  /// File stem, e.g. "maxC50_N4" or "omni".
  std::string stem() const;
};

/// omni once, then the six designs at each order.
std::vector<BeamformerCell> standard_cells(const std::vector<int>& orders);

struct ExperimentConfig {
  std::string name = "room";
  RoomSpec room;                     // absorption holds the first entry of `absorptions`
  std::vector<double> absorptions;   // one simulated case per value
  Placement placement;
  ArrayPhysics sla{0.20, 4, ArrayKind::Loudspeaker};
  ArrayPhysics sma{0.12, 5, ArrayKind::Microphone};
  SimulationGrid grid;
  Regularization regularization;
  /// Image sources are kept up to max_time_factor times the Sabine time when max_time is unset.
  double max_time_factor = 1.5;
  std::optional<double> max_time;
  TimeSplitOptions split;
  std::vector<BeamformerCell> cells;
  NoiseSpec noise;
  std::vector<double> snr_sweep_db;  // robustness SNRs; defaults to {noise.snr_db}
  double pwd_frequency = 2500.0;
  double pwd_resolution_deg = 2.0;
  double pwd_floor_db = 20.0;

  void validate() const;
  RoomSpec room_with(double absorption) const;
  /// e.g. "room1_a0.50"
  std::string case_name(double absorption) const;
  double image_max_time(double absorption) const;
};

/// Parses and validates; throws ConfigError with a path-qualified message.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// "paper": 48 kHz, 2^17-point grid, 20 realizations.
/// "desk": 16 kHz, 2^15-point grid, 10 realizations.
void apply_profile(ExperimentConfig& config, const std::string& profile);

}  // namespace slarev
