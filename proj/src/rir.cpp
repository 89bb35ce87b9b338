#include "slarev/rir.hpp"

#include <unsupported/Eigen/FFT>

#include <json.hpp>

#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>

namespace slarev {

static_assert(std::endian::native == std::endian::little, "binary containers assume little-endian");

double BandPass::gain(double frequency) const {
  const double f = std::abs(frequency);
  const double lo0 = 0.5 * low;
  const double hi1 = high * std::pow(2.0, 0.25);
  if (f >= low && f <= high) return 1.0;
  if (f <= lo0 || f >= hi1) return 0.0;
  if (f < low) {
    const double u = (f - lo0) / (low - lo0);
    return 0.5 - 0.5 * std::cos(kPi * u);
  }
  const double u = (f - high) / (hi1 - high);
  return 0.5 + 0.5 * std::cos(kPi * u);
}

MatrixXc RirTensor::at(int t) const {
  MatrixXc m(rows(), cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows(); ++i) m(i, j) = samples(t, entry(i, j));
  return m;
}

MatrixXc RirTensor::column_block(int j) const {
  return samples.middleCols(Eigen::Index(j) * rows(), rows()).transpose();
}

namespace {

// Sign (-1)^m and partner ACN index (n, -m) for each channel.
struct Conjugation {
  VectorXd sign;
  Eigen::VectorXi partner;
  explicit Conjugation(int order) : sign(num_channels(order)), partner(num_channels(order)) {
    for (int a = 0; a < sign.size(); ++a) {
      const ModeIndex mi = ModeIndex::from_acn(a);
      sign(a) = (mi.m % 2 == 0) ? 1.0 : -1.0;
      partner(a) = ModeIndex(mi.n, -mi.m).acn();
    }
  }
};

VectorXd band_gains(const SimulationGrid& grid) {
  const BandPass bp = BandPass::from_grid(grid);
  VectorXd g(grid.num_bins());
  for (int b = 0; b < grid.num_bins(); ++b) g(b) = bp.gain(grid.bin_frequency(b));
  return g;
}

// x[t] = (1/N) sum_m X(m) e^{-2 pi i m t / N} for spectra given on the
// non-negative bins (pos) and at the mirrored negative bins (neg, index m -> -m).
VectorXc inverse_transform(const VectorXc& pos, const VectorXc& neg, int n,
                           Eigen::FFT<double>& fft) {
  std::vector<Complex> full(static_cast<std::size_t>(n), Complex(0.0, 0.0));
  const int half = n / 2;
  full[0] = pos(0);
  for (int m = 1; m < half; ++m) {
    full[m] = pos(m);
    full[n - m] = neg(m);
  }
  full[half] = 0.5 * (pos(half) + neg(half));
  std::vector<Complex> out;
  fft.fwd(out, full);
  VectorXc x(n);
  for (int t = 0; t < n; ++t) x(t) = out[t] / double(n);
  return x;
}

void flag_aliasing(RirTensor& rir) {
  const int len = rir.length();
  const int tail = std::max(1, len / 10);
  const double peak = rir.samples.cwiseAbs2().maxCoeff();
  const double tail_energy = rir.samples.bottomRows(tail).squaredNorm();
  rir.aliasing_warning = peak > 0.0 && tail_energy > 1e-4 * peak;
}

}  // namespace

RirTensor rtf_to_rir(const RtfMatrix& G, const SimulationGrid& grid) {
  if (G.num_bins() != grid.num_bins()) throw DomainError("rtf_to_rir: incomplete bin set");
  const VectorXd gain = band_gains(grid);
  const Conjugation cl(G.sla_order), cm(G.sma_order);
  RirTensor rir;
  rir.sla_order = G.sla_order;
  rir.cols = G.cols();
  rir.sample_rate = grid.sample_rate;
  rir.samples.resize(grid.fft_length, G.spectra.cols());
  Eigen::FFT<double> fft;
  for (int j = 0; j < G.cols(); ++j) {
    for (int i = 0; i < G.rows(); ++i) {
      const VectorXc pos = G.spectra.col(G.entry(i, j)).cwiseProduct(gain);
      const VectorXc neg =
          (cl.sign(i) * cm.sign(j)) *
          G.spectra.col(G.entry(cl.partner(i), cm.partner(j))).conjugate().cwiseProduct(gain);
      rir.samples.col(rir.entry(i, j)) = inverse_transform(pos, neg, grid.fft_length, fft);
    }
  }
  flag_aliasing(rir);
  return rir;
}

RirTensor rtf_to_rir(const RtfMatrix& G, const SimulationGrid& grid, const VectorXc& lambda) {
  if (G.num_bins() != grid.num_bins()) throw DomainError("rtf_to_rir: incomplete bin set");
  if (lambda.size() != G.cols()) throw DomainError("rtf_to_rir: beamformer length mismatch");
  const VectorXd gain = band_gains(grid);
  const Conjugation cl(G.sla_order), cm(G.sma_order);

  // Negative-frequency branch needs G(k) J_M conj(lambda).
  VectorXc lambda_neg(lambda.size());
  for (Eigen::Index a = 0; a < lambda.size(); ++a)
    lambda_neg(a) = cm.sign(a) * std::conj(lambda(cm.partner(a)));

  const int bins = G.num_bins();
  MatrixXc pos = MatrixXc::Zero(bins, G.rows());
  MatrixXc neg = MatrixXc::Zero(bins, G.rows());
  for (int j = 0; j < G.cols(); ++j) {
    for (int i = 0; i < G.rows(); ++i) {
      if (lambda(j) != Complex(0.0)) pos.col(i) += lambda(j) * G.spectra.col(G.entry(i, j));
      if (lambda_neg(j) != Complex(0.0)) neg.col(i) += lambda_neg(j) * G.spectra.col(G.entry(i, j));
    }
  }

  RirTensor rir;
  rir.sla_order = G.sla_order;
  rir.cols = 1;
  rir.sample_rate = grid.sample_rate;
  rir.samples.resize(grid.fft_length, G.rows());
  Eigen::FFT<double> fft;
  for (int i = 0; i < G.rows(); ++i) {
    const VectorXc p = pos.col(i).cwiseProduct(gain);
    const VectorXc q = (cl.sign(i) * neg.col(cl.partner(i)).conjugate()).cwiseProduct(gain);
    rir.samples.col(i) = inverse_transform(p, q, grid.fft_length, fft);
  }
  flag_aliasing(rir);
  return rir;
}

double band_limited_energy(const RtfMatrix& G, const SimulationGrid& grid) {
  const VectorXd gain2 = band_gains(grid).cwiseAbs2();
  const int n = grid.fft_length;
  const int half = n / 2;
  double total = 0.0;
  const Conjugation cl(G.sla_order), cm(G.sma_order);
  for (int j = 0; j < G.cols(); ++j) {
    for (int i = 0; i < G.rows(); ++i) {
      const auto pos = G.spectra.col(G.entry(i, j));
      const auto neg = G.spectra.col(G.entry(cl.partner(i), cm.partner(j)));
      double e = gain2(0) * std::norm(pos(0));
      for (int m = 1; m < half; ++m) e += gain2(m) * (std::norm(pos(m)) + std::norm(neg(m)));
      e += gain2(half) * std::norm(0.5 * (pos(half) + cl.sign(i) * cm.sign(j) * std::conj(neg(half))));
      total += e / n;
    }
  }
  return total;
}

// ---------------------------------------------------------------------------
// Binary containers

namespace {

void write_container(const std::filesystem::path& path, const nlohmann::json& header,
                     const MatrixXc& data_time_major_rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  const std::string h = header.dump();
  const std::uint64_t hlen = h.size();
  out.write(reinterpret_cast<const char*>(&hlen), sizeof hlen);
  out.write(h.data(), static_cast<std::streamsize>(h.size()));
  // Row-major over (time, entry)
  std::vector<double> row(static_cast<std::size_t>(2 * data_time_major_rows.cols()));
  for (Eigen::Index t = 0; t < data_time_major_rows.rows(); ++t) {
    for (Eigen::Index e = 0; e < data_time_major_rows.cols(); ++e) {
      row[2 * e] = data_time_major_rows(t, e).real();
      row[2 * e + 1] = data_time_major_rows(t, e).imag();
    }
    out.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(row.size() * sizeof(double)));
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

nlohmann::json read_container(const std::filesystem::path& path, MatrixXc& data) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path.string());
  std::uint64_t hlen = 0;
  in.read(reinterpret_cast<char*>(&hlen), sizeof hlen);
  if (!in || hlen > (1u << 24)) throw std::runtime_error("corrupt container header: " + path.string());
  std::string h(hlen, '\0');
  in.read(h.data(), static_cast<std::streamsize>(hlen));
  auto header = nlohmann::json::parse(h);
  const Eigen::Index len = header.at("length").get<Eigen::Index>();
  const Eigen::Index entries = header.at("entries").get<Eigen::Index>();
  data.resize(len, entries);
  std::vector<double> row(static_cast<std::size_t>(2 * entries));
  for (Eigen::Index t = 0; t < len; ++t) {
    in.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(row.size() * sizeof(double)));
    if (!in) throw std::runtime_error("truncated container: " + path.string());
    for (Eigen::Index e = 0; e < entries; ++e) data(t, e) = {row[2 * e], row[2 * e + 1]};
  }
  return header;
}

}  // namespace

void write_rir(const RirTensor& rir, const std::filesystem::path& path) {
  nlohmann::json h = {{"format", "slarev-rir"},
                      {"version", 1},
                      {"sla_order", rir.sla_order},
                      {"rows", rir.rows()},
                      {"cols", rir.cols},
                      {"entries", rir.samples.cols()},
                      {"length", rir.length()},
                      {"sample_rate", rir.sample_rate},
                      {"ordering", "ACN x ACN, entry = row + col * rows, time-major"},
                      {"dtype", "complex128 little-endian (re, im)"},
                      {"aliasing_warning", rir.aliasing_warning}};
  write_container(path, h, rir.samples);
}

RirTensor read_rir(const std::filesystem::path& path) {
  RirTensor rir;
  const auto h = read_container(path, rir.samples);
  if (h.value("format", "") != "slarev-rir") throw std::runtime_error("not a RIR container: " + path.string());
  rir.sla_order = h.at("sla_order").get<int>();
  rir.cols = h.at("cols").get<int>();
  rir.sample_rate = h.at("sample_rate").get<double>();
  rir.aliasing_warning = h.value("aliasing_warning", false);
  if (rir.samples.cols() != Eigen::Index(rir.rows()) * rir.cols)
    throw std::runtime_error("RIR container entry count mismatch");
  return rir;
}

void write_rir_channel_csv(const RirTensor& rir, int i, int j, const std::filesystem::path& path) {
  if (i < 0 || i >= rir.rows() || j < 0 || j >= rir.cols) throw DomainError("channel out of range");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << "time_s,re,im\n";
  out.precision(17);
  const auto col = rir.samples.col(rir.entry(i, j));
  for (int t = 0; t < rir.length(); ++t)
    out << t / rir.sample_rate << ',' << col(t).real() << ',' << col(t).imag() << '\n';
}

void write_rtf(const RtfMatrix& rtf, const std::filesystem::path& path) {
  nlohmann::json h = {{"format", "slarev-rtf"},
                      {"version", 1},
                      {"sla_order", rtf.sla_order},
                      {"sma_order", rtf.sma_order},
                      {"entries", rtf.spectra.cols()},
                      {"length", rtf.num_bins()},
                      {"normalized", rtf.normalized},
                      {"sample_rate", rtf.grid.sample_rate},
                      {"fft_length", rtf.grid.fft_length},
                      {"band_low", rtf.grid.band_low},
                      {"band_high", rtf.grid.band_high},
                      {"ordering", "ACN x ACN, entry = row + col * rows, bin-major"},
                      {"dtype", "complex128 little-endian (re, im)"}};
  write_container(path, h, rtf.spectra);
}

RtfMatrix read_rtf(const std::filesystem::path& path) {
  RtfMatrix rtf;
  const auto h = read_container(path, rtf.spectra);
  if (h.value("format", "") != "slarev-rtf") throw std::runtime_error("not an RTF container: " + path.string());
  rtf.sla_order = h.at("sla_order").get<int>();
  rtf.sma_order = h.at("sma_order").get<int>();
  rtf.normalized = h.at("normalized").get<bool>();
  rtf.grid.sample_rate = h.at("sample_rate").get<double>();
  rtf.grid.fft_length = h.at("fft_length").get<int>();
  rtf.grid.band_low = h.at("band_low").get<double>();
  rtf.grid.band_high = h.at("band_high").get<double>();
  if (rtf.spectra.cols() != Eigen::Index(rtf.rows()) * rtf.cols() ||
      rtf.num_bins() != rtf.grid.num_bins())
    throw std::runtime_error("RTF container shape mismatch");
  return rtf;
}

}  // namespace slarev
