#include "slarev/experiment.hpp"

#include "slarev/spherical_harmonics.hpp"

#include <cmath>
#include <fstream>

namespace slarev {

SimulatedCase simulate_case(const ExperimentConfig& config, double absorption, int sma_order) {
  if (sma_order < 0 || sma_order > config.sma.sh_order)
    throw DomainError("simulate_case: SMA order out of range");
  SimulatedCase sim;
  sim.name = config.case_name(absorption);
  sim.room = config.room_with(absorption);
  sim.reflections = image_sources(sim.room, config.placement, config.image_max_time(absorption));
  const ArrayPhysics sma = config.sma.truncated(sma_order);
  const RtfMatrix H = assemble_rtf(sim.reflections, config.sla, sma, config.grid);
  sim.rtf = normalize_rtf(H, config.sla, sma, config.regularization);
  sim.rir = rtf_to_rir(sim.rtf.truncated(sim.rtf.sla_order, 0), config.grid);
  sim.split = build_time_split(sim.rir, config.placement, sim.room.speed_of_sound, config.split);
  return sim;
}

MatrixXc normalized_rtf_at_bin(const ReflectionList& reflections, const ArrayPhysics& sla,
                               const ArrayPhysics& sma, const SimulationGrid& grid, int bin,
                               const Regularization& reg) {
  if (bin < 1 || bin >= grid.num_bins()) throw DomainError("normalized_rtf_at_bin: bin out of range");
  const double k = wavenumber(grid.bin_frequency(bin), sla.speed_of_sound);
  MatrixXc G = MatrixXc::Zero(sla.channels(), sma.channels());
  for (const Reflection& r : reflections) {
    const Complex w = (r.attenuation / r.path_length) * std::exp(Complex(0.0, k * r.path_length));
    G += w * sh_vector(sla.sh_order, r.dor) * sh_vector(sma.sh_order, r.doa).adjoint();
  }
  // b^+ b per order, which is what normalize_rtf leaves on each channel.
  const auto shrink = [&](const ArrayPhysics& phys) {
    const VectorXc b = mode_strengths(k, phys);
    const double eps = reg.epsilon(b.cwiseAbs().maxCoeff());
    VectorXd s(phys.channels());
    for (int n = 0; n <= phys.sh_order; ++n) {
      const double m2 = std::norm(b(n));
      s.segment(n * n, 2 * n + 1).setConstant(m2 / (m2 + eps * eps));
    }
    return s;
  };
  return shrink(sla).asDiagonal() * G * shrink(sma).asDiagonal();
}

Direction direct_dor(const SimulatedCase& sim) {
  if (sim.reflections.empty() || sim.reflections.front().reflection_order != 0)
    throw DomainError("direct_dor: reflection list has no direct path");
  return sim.reflections.front().dor;
}

DesignedCell design_cell(const SimulatedCase& sim, const BeamformerCell& cell) {
  DesignedCell out;
  out.cell = cell;
  switch (cell.kind) {
    case DesignKind::Omni:
      out.beam = omni_sla(cell.order);
      break;
    case DesignKind::MaxFix:
      out.beam = max_directivity_sla(direct_dor(sim), cell.order);
      break;
    case DesignKind::MinFix:
      out.beam = cardioid_sla(direct_dor(sim), cell.order);
      break;
    default: {
      const Metric metric =
          (cell.kind == DesignKind::MaxDrr || cell.kind == DesignKind::MinDrr) ? Metric::DRR : Metric::C50;
      const Sense sense =
          (cell.kind == DesignKind::MaxDrr || cell.kind == DesignKind::MaxC50) ? Sense::Max : Sense::Min;
      const DesignResult r = design(sim.rir, sim.split, metric, sense, cell.order);
      out.beam = r.beam;
      out.degenerate = r.degenerate;
    }
  }
  return out;
}

std::vector<DesignedCell> design_cells(const SimulatedCase& sim, const std::vector<BeamformerCell>& cells) {
  std::vector<DesignedCell> out;
  out.reserve(cells.size());
  for (const auto& c : cells) out.push_back(design_cell(sim, c));
  return out;
}

TableRow evaluate_beamformer(const SimulatedCase& sim, const BeamformerVector& beam) {
  if (beam.domain != BeamDomain::Sla) throw DomainError("evaluate_beamformer: expected SLA weights");
  const ScalarRir h = render_scalar_rir(sim.rir, beam.weights, VectorXc::Ones(1), beam.label);
  TableRow row;
  row.beamformer = beam.label;
  row.order = beam.order;
  row.room = sim.name;
  row.metrics = evaluate(h, sim.split, sim.name, beam.label, beam.order);
  return row;
}

void write_table_csv(const std::vector<TableRow>& rows, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << kTableHeader << '\n';
  out.precision(10);
  const auto num = [&out](bool ok, double v) -> std::ostream& {
    if (ok) out << v;
    else out << "nan";
    return out;
  };
  for (const auto& r : rows) {
    const auto& m = r.metrics;
    out << r.beamformer << ',' << r.order << ',' << r.room << ',';
    num(!m.c50.degenerate(), m.c50.degenerate() ? 0.0 : m.c50.db()) << ',';
    num(m.t20.valid, m.t20.seconds) << ',';
    num(!m.drr.degenerate(), m.drr.degenerate() ? 0.0 : m.drr.db()) << '\n';
  }
}

std::vector<DoaAnnotation> low_order_doas(const ReflectionList& reflections) {
  std::vector<DoaAnnotation> out;
  for (const auto& r : reflections)
    if (r.reflection_order <= 1) out.push_back({r.reflection_order == 0 ? "direct" : "reflection1", r.doa});
  return out;
}

void write_pwd_annotated_csv(const PwdMap& map, const std::vector<DoaAnnotation>& doas,
                             const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << "elevation_deg,azimuth_deg,db,kind\n";
  out.precision(10);
  const double deg = 180.0 / kPi;
  for (Eigen::Index e = 0; e < map.elevations.size(); ++e)
    for (Eigen::Index a = 0; a < map.azimuths.size(); ++a)
      out << map.elevations(e) * deg << ',' << map.azimuths(a) * deg << ',' << map.db(e, a) << ",grid\n";
  const double step = map.elevations.size() > 1 ? map.elevations(1) - map.elevations(0) : kPi;
  for (const auto& d : doas) {
    const auto e = std::min<Eigen::Index>(std::lround(d.doa.elevation / step), map.elevations.size() - 1);
    const auto a = static_cast<Eigen::Index>(std::lround(d.doa.azimuth / step)) % map.azimuths.size();
    out << d.doa.elevation * deg << ',' << d.doa.azimuth * deg << ',' << map.db(e, a) << ',' << d.kind << '\n';
  }
}

}  // namespace slarev
