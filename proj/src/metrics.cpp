#include "slarev/metrics.hpp"

#include "slarev/spherical_harmonics.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>

namespace slarev {

ScalarRir render_scalar_rir(const RirTensor& rir, const VectorXc& gamma, const VectorXc& lambda,
                            std::string label) {
  if (lambda.size() != rir.cols) throw DomainError("render_scalar_rir: lambda length mismatch");
  if (gamma.size() > rir.rows()) throw DomainError("render_scalar_rir: gamma longer than tensor rows");
  const int order = static_cast<int>(std::lround(std::sqrt(double(gamma.size())))) - 1;
  if (num_channels(order) != gamma.size()) throw DomainError("render_scalar_rir: gamma is not a full SH order");

  ScalarRir h;
  h.sample_rate = rir.sample_rate;
  h.label = std::move(label);
  h.samples = VectorXc::Zero(rir.length());
  for (int j = 0; j < rir.cols; ++j) {
    if (lambda(j) == Complex(0.0)) continue;
    const auto block = rir.samples.middleCols(rir.entry(0, j), gamma.size());
    h.samples += lambda(j) * (block * gamma.conjugate());
  }
  return h;
}

EdcCurve schroeder_edc(const VectorXd& energy, double sample_rate) {
  const double total = energy.sum();
  if (!(total > 0.0)) throw DomainError("schroeder_edc: zero-energy response");
  EdcCurve edc;
  edc.sample_rate = sample_rate;
  edc.db.resize(energy.size());
  double acc = 0.0;
  for (Eigen::Index t = energy.size() - 1; t >= 0; --t) {
    acc += energy(t);
    edc.db(t) = acc;
  }
  // Enforce the exact start and monotonicity against summation-order rounding.
  double prev = 0.0;
  for (Eigen::Index t = 0; t < edc.db.size(); ++t) {
    double v = t == 0 ? 0.0 : 10.0 * std::log10(edc.db(t) / total);
    if (!(v >= kEdcFloorDb)) v = kEdcFloorDb;
    v = std::min(v, prev);
    edc.db(t) = v;
    prev = v;
  }
  return edc;
}

EdcCurve schroeder_edc(const ScalarRir& h) {
  return schroeder_edc(VectorXd(h.samples.cwiseAbs2()), h.sample_rate);
}

EnergyRatio split_energy(const VectorXd& energy, int split) {
  if (split < 0 || split >= energy.size()) throw DomainError("split outside response");
  EnergyRatio r;
  r.early = energy.head(split + 1).sum();
  r.late = energy.tail(energy.size() - split - 1).sum();
  return r;
}

EnergyRatio drr(const ScalarRir& h, const TimeSplit& split) {
  return split_energy(h.samples.cwiseAbs2(), split.t_d);
}

EnergyRatio c50(const ScalarRir& h, const TimeSplit& split) {
  return split_energy(h.samples.cwiseAbs2(), split.t_c);
}

T20Result t20(const EdcCurve& edc) {
  T20Result r;
  Eigen::Index start = -1, stop = -1;
  for (Eigen::Index t = 0; t < edc.db.size(); ++t) {
    if (start < 0 && edc.db(t) <= -1.0) start = t;
    if (edc.db(t) < -21.0) {
      stop = t;
      break;
    }
  }
  if (start < 0 || stop < 0 || stop - start < 2) return r;
  // Least-squares line through (t, db) for t in [start, stop)
  const Eigen::Index n = stop - start;
  double st = 0, sy = 0, stt = 0, sty = 0;
  for (Eigen::Index t = start; t < stop; ++t) {
    const double x = t / edc.sample_rate;
    const double y = edc.db(t);
    st += x;
    sy += y;
    stt += x * x;
    sty += x * y;
  }
  const double slope = (n * sty - st * sy) / (n * stt - st * st);
  if (!(slope < 0.0)) return r;
  r.seconds = -60.0 / slope;
  r.valid = std::isfinite(r.seconds);
  return r;
}

PwdMap pwd_map(const MatrixXc& Gk, int sma_order, const VectorXc& gamma, double frequency,
               double resolution_deg, double floor_db) {
  if (gamma.size() > Gk.rows()) throw DomainError("pwd_map: gamma longer than RTF rows");
  if (Gk.cols() != num_channels(sma_order)) throw DomainError("pwd_map: SMA order mismatch");
  if (!(resolution_deg > 0.0)) throw DomainError("pwd_map: resolution must be positive");
  // output(xi) = gamma^H G y(xi) = v^T y(xi)
  const VectorXc v = Gk.topRows(gamma.size()).transpose() * gamma.conjugate();

  PwdMap map;
  map.frequency = frequency;
  map.floor_db = floor_db;
  const double step = resolution_deg * kPi / 180.0;
  const int n_el = static_cast<int>(std::floor(kPi / step + 1e-9)) + 1;
  const int n_az = static_cast<int>(std::lround(2.0 * kPi / step));
  map.elevations = VectorXd::LinSpaced(n_el, 0.0, (n_el - 1) * step);
  map.azimuths.resize(n_az);
  for (int a = 0; a < n_az; ++a) map.azimuths(a) = a * step;

  MatrixXd mag(n_el, n_az);
  for (int e = 0; e < n_el; ++e)
    for (int a = 0; a < n_az; ++a) {
      const Direction d(std::min(map.elevations(e), kPi), map.azimuths(a));
      mag(e, a) = std::abs(v.cwiseProduct(sh_vector(sma_order, d)).sum());
    }
  const double peak = mag.maxCoeff();
  if (!(peak > 0.0)) throw DomainError("pwd_map: zero response");
  map.db = (mag / peak).unaryExpr([floor_db](double x) {
    const double d = 20.0 * std::log10(x);
    return std::isfinite(d) ? std::max(d, -floor_db) : -floor_db;
  });
  return map;
}

PwdMap pwd_map(const RtfMatrix& G, const VectorXc& gamma, double frequency, double resolution_deg,
               double floor_db) {
  if (!G.normalized) throw DomainError("pwd_map: RTF must be normalized");
  if (!(frequency >= G.grid.band_low && frequency <= G.grid.band_high))
    throw DomainError("pwd_map: frequency outside the simulation band");
  const int bin = G.grid.nearest_bin(frequency);
  return pwd_map(G.at(bin), G.sma_order, gamma, G.grid.bin_frequency(bin), resolution_deg, floor_db);
}

MetricsReport evaluate(const ScalarRir& h, const TimeSplit& split, std::string room,
                       std::string beamformer, int order) {
  MetricsReport r;
  r.room = std::move(room);
  r.beamformer = std::move(beamformer);
  r.order = order;
  r.drr = drr(h, split);
  r.c50 = c50(h, split);
  r.edc = schroeder_edc(h);
  r.t20 = t20(r.edc);
  return r;
}

namespace {

nlohmann::json ratio_json(const EnergyRatio& r) {
  nlohmann::json j = {{"early_energy", r.early}, {"late_energy", r.late}, {"degenerate", r.degenerate()}};
  j["db"] = r.degenerate() ? nlohmann::json(nullptr) : nlohmann::json(r.db());
  return j;
}

}  // namespace

std::string metrics_json(const MetricsReport& report) {
  nlohmann::json j = {{"room", report.room},
                      {"beamformer", report.beamformer},
                      {"order", report.order},
                      {"drr", ratio_json(report.drr)},
                      {"c50", ratio_json(report.c50)}};
  j["t20_s"] = report.t20.valid ? nlohmann::json(report.t20.seconds) : nlohmann::json(nullptr);
  j["t20_valid"] = report.t20.valid;
  if (report.pwd) j["pwd_frequency_hz"] = report.pwd->frequency;
  return j.dump(2);
}

void write_edc_csv(const EdcCurve& edc, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << "time_s,db\n";
  out.precision(10);
  for (Eigen::Index t = 0; t < edc.db.size(); ++t) out << t / edc.sample_rate << ',' << edc.db(t) << '\n';
}

void write_pwd_csv(const PwdMap& map, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << "elevation_deg,azimuth_deg,db\n";
  out.precision(10);
  for (Eigen::Index e = 0; e < map.elevations.size(); ++e)
    for (Eigen::Index a = 0; a < map.azimuths.size(); ++a)
      out << map.elevations(e) * 180.0 / kPi << ',' << map.azimuths(a) * 180.0 / kPi << ','
          << map.db(e, a) << '\n';
}

}  // namespace slarev
