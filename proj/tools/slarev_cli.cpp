// slarev: simulate, design, evaluate, map and stress-test SLA beamformers.

#include "slarev/experiment.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using namespace slarev;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitDegenerate = 3;

struct Options {
  std::string config;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  std::string profile;
  int jobs = 1;
  bool full_rtf = false;
  bool edc = false;
  std::string beamformer = "maxC50_N4";
  std::optional<double> frequency;
};

std::uint64_t fnv1a(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::uint64_t h = 1469598103934665603ull;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ull;
    }
  }
  return h;
}

void log_artifact(const fs::path& path) {
  std::fprintf(stderr, "wrote %s (%ju bytes, fnv1a %016jx)\n", path.string().c_str(),
               static_cast<std::uintmax_t>(fs::file_size(path)), static_cast<std::uintmax_t>(fnv1a(path)));
}

ExperimentConfig load(const Options& o) {
  ExperimentConfig cfg = load_config(o.config);
  if (!o.profile.empty()) apply_profile(cfg, o.profile);
  if (o.seed) cfg.noise.seed = *o.seed;
  if (o.jobs < 1) throw ConfigError("--jobs must be at least 1");
  return cfg;
}

fs::path case_dir(const Options& o, const ExperimentConfig& cfg, double alpha) {
  return fs::path(o.out) / cfg.case_name(alpha);
}

// Case state from persisted artifacts; the image list is recomputed (it is cheap
// and only used for geometry annotations).
SimulatedCase load_case(const Options& o, const ExperimentConfig& cfg, double alpha) {
  const fs::path dir = case_dir(o, cfg, alpha);
  if (!fs::exists(dir / "rir.bin") || !fs::exists(dir / "rtf.bin"))
    throw std::runtime_error("missing artifacts in " + dir.string() + "; run simulate first");
  SimulatedCase sim;
  sim.name = cfg.case_name(alpha);
  sim.room = cfg.room_with(alpha);
  sim.reflections = image_sources(sim.room, cfg.placement, cfg.image_max_time(alpha));
  sim.rir = read_rir(dir / "rir.bin");
  sim.rtf = read_rtf(dir / "rtf.bin");
  if (sim.rir.sample_rate != cfg.grid.sample_rate || sim.rtf.grid.fft_length != cfg.grid.fft_length)
    throw std::runtime_error("artifacts in " + dir.string() + " were made with a different profile");
  sim.split = build_time_split(sim.rir, cfg.placement, sim.room.speed_of_sound, cfg.split);
  return sim;
}

void store_case(const SimulatedCase& sim, const fs::path& dir) {
  fs::create_directories(dir);
  write_rtf(sim.rtf, dir / "rtf.bin");
  log_artifact(dir / "rtf.bin");
  write_rir(sim.rir, dir / "rir.bin");
  log_artifact(dir / "rir.bin");
  if (sim.rir.aliasing_warning)
    std::fprintf(stderr, "warning: %s: RIR tail energy suggests time aliasing\n", sim.name.c_str());
}

std::vector<BeamformerVector> load_beamformers(const fs::path& dir, const ExperimentConfig& cfg) {
  std::vector<BeamformerVector> out;
  for (const auto& c : cfg.cells) {
    const fs::path p = dir / "beamformers" / (c.stem() + ".json");
    if (!fs::exists(p)) throw std::runtime_error("missing beamformer " + p.string() + "; run design first");
    out.push_back(read_beamformer(p));
  }
  return out;
}

int run_simulate(const Options& o, const ExperimentConfig& cfg) {
  for (double a : cfg.absorptions) {
    const SimulatedCase sim = simulate_case(cfg, a, o.full_rtf ? cfg.sma.sh_order : 0);
    std::fprintf(stderr, "%s: %zu image sources, RIR %d samples, direct delay %d samples\n",
                 sim.name.c_str(), sim.reflections.size(), sim.rir.length(), sim.split.direct_delay);
    store_case(sim, case_dir(o, cfg, a));
  }
  return kExitOk;
}

int design_into(const SimulatedCase& sim, const ExperimentConfig& cfg, const fs::path& dir) {
  fs::create_directories(dir / "beamformers");
  bool degenerate = false;
  for (const auto& c : cfg.cells) {
    try {
      const DesignedCell d = design_cell(sim, c);
      if (d.degenerate) {
        degenerate = true;
        std::fprintf(stderr, "%s: %s: late-energy matrix singular, diagonal loading applied\n",
                     sim.name.c_str(), c.stem().c_str());
      }
      const fs::path p = dir / "beamformers" / (c.stem() + ".json");
      write_beamformer(d.beam, p);
    } catch (const DomainError& e) {
      degenerate = true;
      std::fprintf(stderr, "%s: %s: design failed: %s\n", sim.name.c_str(), c.stem().c_str(), e.what());
    }
  }
  return degenerate ? kExitDegenerate : kExitOk;
}

int run_design(const Options& o, const ExperimentConfig& cfg) {
  int code = kExitOk;
  for (double a : cfg.absorptions) {
    const int c = design_into(load_case(o, cfg, a), cfg, case_dir(o, cfg, a));
    if (c != kExitOk) code = c;
  }
  return code;
}

std::vector<TableRow> evaluate_into(const SimulatedCase& sim, const ExperimentConfig& cfg,
                                    const fs::path& dir) {
  fs::create_directories(dir / "metrics");
  std::vector<TableRow> rows;
  for (const auto& beam : load_beamformers(dir, cfg)) {
    TableRow row = evaluate_beamformer(sim, beam);
    const std::string stem = beam.label == "omni" ? "omni" : beam.label + "_N" + std::to_string(beam.order);
    std::ofstream(dir / "metrics" / (stem + ".json")) << metrics_json(row.metrics) << '\n';
    write_edc_csv(row.metrics.edc, dir / "metrics" / (stem + "_edc.csv"));
    rows.push_back(std::move(row));
  }
  return rows;
}

int run_evaluate(const Options& o, const ExperimentConfig& cfg) {
  std::vector<TableRow> rows;
  for (double a : cfg.absorptions) {
    auto r = evaluate_into(load_case(o, cfg, a), cfg, case_dir(o, cfg, a));
    rows.insert(rows.end(), r.begin(), r.end());
  }
  const fs::path p = fs::path(o.out) / "metrics_table.csv";
  write_table_csv(rows, p);
  log_artifact(p);
  return kExitOk;
}

void pwdmap_into(const SimulatedCase& sim, const ExperimentConfig& cfg, const Options& o,
                 const fs::path& dir) {
  const double f = o.frequency.value_or(cfg.pwd_frequency);
  if (!(f >= cfg.grid.band_low && f <= cfg.grid.band_high))
    throw DomainError("pwdmap: frequency " + std::to_string(f) + " Hz outside the simulation band");
  const fs::path bf = dir / "beamformers" / (o.beamformer + ".json");
  const BeamformerVector beam = fs::exists(bf) ? read_beamformer(bf)
                                : o.beamformer == "omni" ? omni_sla(0)
                                : throw std::runtime_error("missing beamformer " + bf.string());
  PwdMap map;
  if (sim.rtf.sma_order == cfg.sma.sh_order) {
    map = pwd_map(sim.rtf, beam.weights, f, cfg.pwd_resolution_deg, cfg.pwd_floor_db);
  } else {
    const int bin = cfg.grid.nearest_bin(f);
    const MatrixXc Gk =
        normalized_rtf_at_bin(sim.reflections, cfg.sla, cfg.sma, cfg.grid, bin, cfg.regularization);
    map = pwd_map(Gk, cfg.sma.sh_order, beam.weights, cfg.grid.bin_frequency(bin), cfg.pwd_resolution_deg,
                  cfg.pwd_floor_db);
  }
  const fs::path p = dir / ("pwd_" + o.beamformer + ".csv");
  write_pwd_annotated_csv(map, low_order_doas(sim.reflections), p);
  log_artifact(p);
}

int run_pwdmap(const Options& o, const ExperimentConfig& cfg) {
  for (double a : cfg.absorptions) pwdmap_into(load_case(o, cfg, a), cfg, o, case_dir(o, cfg, a));
  return kExitOk;
}

void robustness_into(const SimulatedCase& sim, const ExperimentConfig& cfg, const Options& o,
                     const fs::path& dir) {
  const auto designs = load_beamformers(dir, cfg);
  RobustnessInputs in;
  in.G = &sim.rtf;
  in.split = sim.split;
  in.sla = &cfg.sla;
  in.sma = &cfg.sma;
  in.regularization = cfg.regularization;
  for (double snr : cfg.snr_sweep_db) {
    NoiseSpec spec = cfg.noise;
    spec.snr_db = snr;
    std::fprintf(stderr, "%s: robustness at %g dB SNR, %d realizations, seed %ju\n", sim.name.c_str(), snr,
                 spec.realizations, static_cast<std::uintmax_t>(spec.seed));
    const RobustnessReport rep = robustness_study(in, designs, spec);
    char tag[32];
    std::snprintf(tag, sizeof tag, "robustness_snr%g", snr);
    std::ofstream(dir / (std::string(tag) + ".json")) << robustness_json(rep) << '\n';
    write_robustness_csv(rep, dir / (std::string(tag) + ".csv"));
    log_artifact(dir / (std::string(tag) + ".csv"));
    if (o.edc) {
      const fs::path edc_dir = dir / (std::string(tag) + "_edc");
      fs::create_directories(edc_dir);
      for (const auto& c : rep.cells) {
        char name[96];
        std::snprintf(name, sizeof name, "%g_%s_N%d.csv", c.band_hz, c.beamformer.c_str(), c.order);
        write_edc_csv(c.mean_edc, edc_dir / name);
      }
    }
  }
}

int run_robustness(const Options& o, const ExperimentConfig& cfg) {
  for (double a : cfg.absorptions) robustness_into(load_case(o, cfg, a), cfg, o, case_dir(o, cfg, a));
  return kExitOk;
}

int run_report(const Options& o, const ExperimentConfig& cfg) {
  int code = kExitOk;
  std::vector<TableRow> rows;
  for (double a : cfg.absorptions) {
    const fs::path dir = case_dir(o, cfg, a);
    const SimulatedCase sim = simulate_case(cfg, a, o.full_rtf ? cfg.sma.sh_order : 0);
    store_case(sim, dir);
    if (design_into(sim, cfg, dir) != kExitOk) code = kExitDegenerate;
    auto r = evaluate_into(sim, cfg, dir);
    rows.insert(rows.end(), r.begin(), r.end());
    pwdmap_into(sim, cfg, o, dir);
    robustness_into(sim, cfg, o, dir);
  }
  const fs::path p = fs::path(o.out) / "metrics_table.csv";
  write_table_csv(rows, p);
  log_artifact(p);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spherical loudspeaker array beamformer design for room-acoustic clarity"};
  app.require_subcommand(1);
  Options o;

  const auto common = [&o](CLI::App* sub) {
    sub->add_option("--config", o.config, "Experiment configuration (JSON)")->required();
    sub->add_option("--out", o.out, "Output directory");
    sub->add_option("--seed", o.seed, "Seed for the noise generator (overrides the config)");
    sub->add_option("--profile", o.profile, "Run profile")->check(CLI::IsMember({"paper", "desk"}));
    sub->add_option("--jobs", o.jobs, "Worker cap; stages currently run on one thread");
  };

  auto* simulate = app.add_subcommand("simulate", "Image sources, RTF matrix and RIR per absorption case");
  auto* design = app.add_subcommand("design", "Fixed and eigenvalue-based SLA beamformers");
  auto* evaluate = app.add_subcommand("evaluate", "C50, T20 and DRR for every beamformer");
  auto* pwdmap = app.add_subcommand("pwdmap", "Plane-wave decomposition map around the SMA");
  auto* robustness = app.add_subcommand("robustness", "Monte Carlo study with additive RTF errors");
  auto* report = app.add_subcommand("report", "All stages in sequence");
  for (auto* s : {simulate, design, evaluate, pwdmap, robustness, report}) common(s);
  for (auto* s : {simulate, report})
    s->add_flag("--full-rtf", o.full_rtf, "Persist the RTF for every SMA channel, not only the omni column");
  for (auto* s : {pwdmap, report}) {
    s->add_option("--beamformer", o.beamformer, "Beamformer file stem, e.g. maxC50_N4 or omni");
    s->add_option("--frequency", o.frequency, "Analysis frequency in Hz");
  }
  for (auto* s : {robustness, report}) s->add_flag("--edc", o.edc, "Also write mean EDC curves");

  CLI11_PARSE(app, argc, argv);

  ExperimentConfig cfg;
  try {
    cfg = load(o);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  }

  try {
    fs::create_directories(o.out);
    if (simulate->parsed()) return run_simulate(o, cfg);
    if (design->parsed()) return run_design(o, cfg);
    if (evaluate->parsed()) return run_evaluate(o, cfg);
    if (pwdmap->parsed()) return run_pwdmap(o, cfg);
    if (robustness->parsed()) return run_robustness(o, cfg);
    return run_report(o, cfg);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitFailure;
  }
}
