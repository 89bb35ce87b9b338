#include "slarev/robustness.hpp"

#include <unsupported/Eigen/FFT>

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <random>

namespace slarev {

void NoiseSpec::validate(const SimulationGrid& grid) const {
  if (realizations < 1) throw ConfigError("noise: realizations must be at least 1");
  if (octave_centers.empty()) throw ConfigError("noise: no octave bands");
  if (std::isnan(snr_db)) throw ConfigError("noise: snr_db is NaN");
  for (double c : octave_centers) {
    if (!(c > 0.0)) throw ConfigError("noise: octave centers must be positive");
    if (c < grid.band_low || c > grid.band_high)
      throw ConfigError("noise: octave center " + std::to_string(c) + " Hz outside the simulation band");
    if (OctaveBand{c}.stop_frequency() >= grid.sample_rate / 2.0)
      throw ConfigError("noise: octave band at " + std::to_string(c) + " Hz reaches Nyquist");
  }
}

double OctaveBand::gain(double frequency) const {
  constexpr double w = 1.0 / 6.0;
  const double f = std::abs(frequency);
  if (!(f > 0.0)) return 0.0;
  const double x = std::log2(f / center);
  if (x <= -0.5 - w || x >= 0.5 + w) return 0.0;
  if (x < -0.5 + w) {
    const double s = std::sin(0.5 * kPi * (x + 0.5 + w) / (2.0 * w));
    return s * s;
  }
  if (x > 0.5 - w) {
    const double c = std::cos(0.5 * kPi * (x - 0.5 + w) / (2.0 * w));
    return c * c;
  }
  return 1.0;
}

double OctaveBand::stop_frequency() const { return upper_edge() * std::pow(2.0, 1.0 / 6.0); }

namespace {

// Index of the band whose center is nearest in log frequency.
int nearest_band(const std::vector<double>& centers, double f) {
  int best = 0;
  double dist = std::numeric_limits<double>::infinity();
  for (std::size_t b = 0; b < centers.size(); ++b) {
    const double d = std::abs(std::log2(f / centers[b]));
    if (d < dist) {
      dist = d;
      best = static_cast<int>(b);
    }
  }
  return best;
}

// Noise standard deviation per bin given the reference power spectrum (bins x entries).
VectorXd noise_sigma_per_bin(const MatrixXc& reference, const SimulationGrid& grid,
                             const NoiseSpec& spec) {
  const auto nb = static_cast<int>(spec.octave_centers.size());
  VectorXd power = VectorXd::Zero(nb);
  Eigen::VectorXi count = Eigen::VectorXi::Zero(nb);
  for (int bin = 1; bin < reference.rows(); ++bin) {
    const double f = grid.bin_frequency(bin);
    for (int b = 0; b < nb; ++b) {
      const OctaveBand band{spec.octave_centers[b]};
      if (f >= band.lower_edge() && f < band.upper_edge()) {
        power(b) += reference.row(bin).squaredNorm();
        count(b) += 1;
      }
    }
  }
  for (int b = 0; b < nb; ++b) {
    if (count(b) == 0) throw DomainError("perturb_rtf: octave band contains no bins");
    power(b) /= double(count(b)) * double(reference.cols());
  }
  const double scale = std::pow(10.0, -spec.snr_db / 10.0);
  VectorXd sigma = VectorXd::Zero(reference.rows());
  for (int bin = 1; bin < reference.rows(); ++bin)
    sigma(bin) = std::sqrt(scale * power(nearest_band(spec.octave_centers, grid.bin_frequency(bin))));
  return sigma;
}

// Complex Gaussian noise, E|n|^2 = sigma^2, drawn entry by entry then bin by bin.
MatrixXc draw_noise(const VectorXd& sigma, Eigen::Index entries, const NoiseSpec& spec,
                    int realization) {
  std::seed_seq seq{static_cast<std::uint32_t>(spec.seed & 0xffffffffu),
                    static_cast<std::uint32_t>(spec.seed >> 32),
                    static_cast<std::uint32_t>(realization)};
  std::mt19937_64 gen(seq);
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  MatrixXc n(sigma.size(), entries);
  for (Eigen::Index e = 0; e < entries; ++e)
    for (Eigen::Index bin = 0; bin < sigma.size(); ++bin) {
      const double re = normal(gen);
      const double im = normal(gen);
      n(bin, e) = sigma(bin) * Complex(re, im);
    }
  return n;
}

VectorXc per_channel(const VectorXc& per_order) {
  const auto order = static_cast<int>(per_order.size()) - 1;
  VectorXc d(num_channels(order));
  for (int n = 0; n <= order; ++n) d.segment(n * n, 2 * n + 1).setConstant(per_order(n));
  return d;
}

VectorXc regularized_inverse_diagonal(double k, const ArrayPhysics& phys, const Regularization& reg) {
  const VectorXc b = mode_strengths(k, phys);
  const double eps = reg.epsilon(b.cwiseAbs().maxCoeff());
  VectorXc inv(b.size());
  for (Eigen::Index n = 0; n < b.size(); ++n) inv(n) = std::conj(b(n)) / (std::norm(b(n)) + eps * eps);
  return per_channel(inv);
}

}  // namespace

RtfMatrix perturb_rtf(const RtfMatrix& G, const NoiseSpec& spec, int realization) {
  if (!G.normalized) throw DomainError("perturb_rtf: RTF must be normalized");
  if (!spec.enabled()) return G;
  const VectorXd sigma = noise_sigma_per_bin(G.spectra, G.grid, spec);
  RtfMatrix out = G;
  out.spectra += draw_noise(sigma, G.spectra.cols(), spec, realization);
  return out;
}

RtfMatrix perturb_rtf(const RtfMatrix& G, const NoiseSpec& spec, int realization,
                      const ArrayPhysics& sla, const ArrayPhysics& sma, const Regularization& reg) {
  if (spec.domain == NoiseDomain::Normalized) return perturb_rtf(G, spec, realization);
  if (!G.normalized) throw DomainError("perturb_rtf: RTF must be normalized");
  if (!spec.enabled()) return G;
  const ArrayPhysics l = sla.truncated(G.sla_order);
  const ArrayPhysics m = sma.truncated(G.sma_order);

  // Physical-domain reference H ~ B_L G B_M, and the maps back to G.
  MatrixXc H(G.spectra.rows(), G.spectra.cols());
  MatrixXc back(G.spectra.rows(), G.spectra.cols());
  H.row(0).setZero();
  back.row(0).setZero();
  for (int bin = 1; bin < G.num_bins(); ++bin) {
    const double k = wavenumber(G.grid.bin_frequency(bin), l.speed_of_sound);
    const VectorXc bl = mode_strength_diagonal(k, l);
    const VectorXc bm = mode_strength_diagonal(k, m);
    const VectorXc il = regularized_inverse_diagonal(k, l, reg);
    const VectorXc im = regularized_inverse_diagonal(k, m, reg);
    for (int j = 0; j < G.cols(); ++j)
      for (int i = 0; i < G.rows(); ++i) {
        H(bin, G.entry(i, j)) = bl(i) * G.spectra(bin, G.entry(i, j)) * bm(j);
        back(bin, G.entry(i, j)) = il(i) * im(j);
      }
  }
  const VectorXd sigma = noise_sigma_per_bin(H, G.grid, spec);
  RtfMatrix out = G;
  out.spectra += draw_noise(sigma, G.spectra.cols(), spec, realization).cwiseProduct(back);
  return out;
}

namespace {

VectorXc filter_sequence(const VectorXc& x, double sample_rate, const OctaveBand& band,
                         Eigen::FFT<double>& fft) {
  const auto n = static_cast<int>(x.size());
  std::vector<Complex> in(x.data(), x.data() + n), spec, out;
  fft.fwd(spec, in);
  for (int m = 0; m < n; ++m) {
    const int signed_bin = m <= n / 2 ? m : m - n;
    spec[m] *= band.gain(signed_bin * sample_rate / n);
  }
  fft.inv(out, spec);
  return Eigen::Map<const VectorXc>(out.data(), n);
}

void check_band(double center, double sample_rate) {
  if (!(center > 0.0)) throw DomainError("octave_band_rir: center must be positive");
  if (OctaveBand{center}.stop_frequency() >= sample_rate / 2.0)
    throw DomainError("octave_band_rir: band reaches Nyquist");
}

}  // namespace

ScalarRir octave_band_rir(const ScalarRir& h, double center) {
  check_band(center, h.sample_rate);
  Eigen::FFT<double> fft;
  ScalarRir out = h;
  out.samples = filter_sequence(h.samples, h.sample_rate, OctaveBand{center}, fft);
  return out;
}

RirTensor octave_band_rir(const RirTensor& rir, double center) {
  check_band(center, rir.sample_rate);
  Eigen::FFT<double> fft;
  RirTensor out = rir;
  for (Eigen::Index e = 0; e < rir.samples.cols(); ++e)
    out.samples.col(e) = filter_sequence(rir.samples.col(e), rir.sample_rate, OctaveBand{center}, fft);
  return out;
}

const RobustnessCell& RobustnessReport::find(double band_hz, const std::string& beamformer,
                                             int order) const {
  for (const auto& c : cells)
    if (c.band_hz == band_hz && c.beamformer == beamformer && c.order == order) return c;
  throw DomainError("robustness report has no cell " + beamformer + " N=" + std::to_string(order));
}

RobustnessReport robustness_study(const RobustnessInputs& in,
                                  const std::vector<BeamformerVector>& designs,
                                  const NoiseSpec& spec) {
  if (in.G == nullptr) throw DomainError("robustness_study: no RTF");
  if (spec.domain == NoiseDomain::Physical && (in.sla == nullptr || in.sma == nullptr))
    throw DomainError("robustness_study: physical-domain noise needs the array physics");
  const RtfMatrix G = in.G->truncated(in.G->sla_order, 0);
  const SimulationGrid& grid = G.grid;
  spec.validate(grid);
  for (const auto& d : designs)
    if (d.domain != BeamDomain::Sla || d.order > G.sla_order)
      throw DomainError("robustness_study: design '" + d.label + "' does not fit the RTF");

  const VectorXc omni = VectorXc::Ones(1);
  const auto nbands = spec.octave_centers.size();
  const auto ncells = nbands * designs.size();
  auto cell_index = [&](std::size_t b, std::size_t d) { return b * designs.size() + d; };

  RobustnessReport report;
  report.snr_db = spec.snr_db;
  report.realizations = spec.realizations;
  report.seed = spec.seed;
  report.cells.resize(ncells);

  const auto band_responses = [&](const RirTensor& rir, std::size_t d) {
    const ScalarRir h = render_scalar_rir(rir, designs[d].weights, omni, designs[d].label);
    std::vector<ScalarRir> out;
    for (double c : spec.octave_centers) out.push_back(octave_band_rir(h, c));
    return out;
  };

  const RirTensor clean = rtf_to_rir(G, grid);
  for (std::size_t d = 0; d < designs.size(); ++d) {
    const auto hb = band_responses(clean, d);
    for (std::size_t b = 0; b < nbands; ++b) {
      RobustnessCell& cell = report.cells[cell_index(b, d)];
      cell.band_hz = spec.octave_centers[b];
      cell.beamformer = designs[d].label;
      cell.order = designs[d].order;
      cell.c50_clean = c50(hb[b], in.split).db();
    }
  }

  std::vector<VectorXd> energy(ncells, VectorXd::Zero(clean.length()));
  // Running mean and squared deviation; a constant sequence keeps its mean exactly.
  std::vector<double> mean_db(ncells, 0.0), m2(ncells, 0.0);
  for (int r = 0; r < spec.realizations; ++r) {
    const RtfMatrix noisy = spec.domain == NoiseDomain::Physical
                                ? perturb_rtf(G, spec, r, *in.sla, *in.sma, in.regularization)
                                : perturb_rtf(G, spec, r);
    const RirTensor rir = rtf_to_rir(noisy, grid);
    for (std::size_t d = 0; d < designs.size(); ++d) {
      const auto hb = band_responses(rir, d);
      for (std::size_t b = 0; b < nbands; ++b) {
        const std::size_t i = cell_index(b, d);
        const VectorXd e = hb[b].samples.cwiseAbs2();
        energy[i] += e;
        const double db = split_energy(e, in.split.t_c).db();
        const double dev = db - mean_db[i];
        mean_db[i] += dev / (r + 1);
        m2[i] += dev * (db - mean_db[i]);
      }
    }
  }

  const double n = spec.realizations;
  for (std::size_t i = 0; i < ncells; ++i) {
    RobustnessCell& cell = report.cells[i];
    cell.c50_noisy_mean = mean_db[i];
    cell.c50_noisy_std = n > 1 ? std::sqrt(m2[i] / (n - 1)) : 0.0;
    const VectorXd mean = energy[i] / n;
    cell.c50_mean_edc = split_energy(mean, in.split.t_c).db();
    cell.mean_edc = schroeder_edc(mean, grid.sample_rate);
  }
  return report;
}

std::string robustness_json(const RobustnessReport& report) {
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& c : report.cells)
    cells.push_back({{"band_hz", c.band_hz},
                     {"beamformer", c.beamformer},
                     {"order", c.order},
                     {"c50_clean_db", c.c50_clean},
                     {"c50_error_db", c.c50_noisy_mean},
                     {"c50_error_std_db", c.c50_noisy_std},
                     {"c50_mean_edc_db", c.c50_mean_edc},
                     {"delta_db", c.delta()},
                     {"delta_flag", c.flagged()}});
  nlohmann::json j = {{"snr_db", std::isfinite(report.snr_db) ? nlohmann::json(report.snr_db)
                                                              : nlohmann::json(nullptr)},
                      {"realizations", report.realizations},
                      {"seed", report.seed},
                      {"cells", cells}};
  return j.dump(2);
}

void write_robustness_csv(const RobustnessReport& report, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << "band_hz,beamformer,N_L,C50_clean_db,C50_error_db,C50_error_std_db,delta_db,delta_flag\n";
  out.precision(10);
  for (const auto& c : report.cells)
    out << c.band_hz << ',' << c.beamformer << ',' << c.order << ',' << c.c50_clean << ','
        << c.c50_noisy_mean << ',' << c.c50_noisy_std << ',' << c.delta() << ','
        << (c.flagged() ? 1 : 0) << '\n';
}

}  // namespace slarev
