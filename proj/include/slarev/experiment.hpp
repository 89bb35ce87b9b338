#pragma once

// Pipeline stages shared by the command-line tool and the acceptance suite:
// simulate one (room, absorption) case, design the beamformer cells, tabulate
// metrics, map the field, and run the robustness study.

#include "slarev/beamformers.hpp"
#include "slarev/config.hpp"
#include "slarev/metrics.hpp"
#include "slarev/rir.hpp"
#include "slarev/robustness.hpp"
#include "slarev/rtf.hpp"

#include <string>
#include <vector>

namespace slarev {

struct SimulatedCase {
  std::string name;
  RoomSpec room;
  ReflectionList reflections;
  /// Normalized RTF; SMA truncated to `sma_order` (0 keeps the omni column only).
  RtfMatrix rtf;
  /// Omni-projected RIR tensor, one microphone column.
  RirTensor rir;
  TimeSplit split;
};

/// Image sources, RTF assembly, normalization, band-limited RIR and time split.
SimulatedCase simulate_case(const ExperimentConfig& config, double absorption, int sma_order = 0);

/// Normalized G(k) at one bin by direct summation over the reflections, with
/// the same regularization as normalize_rtf.
MatrixXc normalized_rtf_at_bin(const ReflectionList& reflections, const ArrayPhysics& sla,
                               const ArrayPhysics& sma, const SimulationGrid& grid, int bin,
                               const Regularization& reg);

struct DesignedCell {
  BeamformerCell cell;
  BeamformerVector beam;
  bool degenerate = false;
};

/// SLA direction of the direct path, in the SLA frame.
Direction direct_dor(const SimulatedCase& sim);

DesignedCell design_cell(const SimulatedCase& sim, const BeamformerCell& cell);
std::vector<DesignedCell> design_cells(const SimulatedCase& sim, const std::vector<BeamformerCell>& cells);

struct TableRow {
  std::string beamformer;
  int order = 0;
  std::string room;
  MetricsReport metrics;
};

TableRow evaluate_beamformer(const SimulatedCase& sim, const BeamformerVector& beam);

/// beamformer,N_L,room,C50_db,T20_s,DRR_db
void write_table_csv(const std::vector<TableRow>& rows, const std::filesystem::path& path);
inline constexpr const char* kTableHeader = "beamformer,N_L,room,C50_db,T20_s,DRR_db";

struct DoaAnnotation {
  std::string kind;  // "direct" or "reflection1"
  Direction doa;
};

/// Direct path and first-order reflections as seen from the SMA.
std::vector<DoaAnnotation> low_order_doas(const ReflectionList& reflections);

/// elevation_deg,azimuth_deg,db,kind: the grid ("grid") followed by one row per
/// annotation, carrying the map level at the nearest grid point.
void write_pwd_annotated_csv(const PwdMap& map, const std::vector<DoaAnnotation>& doas,
                             const std::filesystem::path& path);

}  // namespace slarev
