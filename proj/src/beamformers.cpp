#include "slarev/beamformers.hpp"

#include "slarev/spherical_harmonics.hpp"

#include <Eigen/Eigenvalues>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace slarev {

namespace {

void require_order(int order) {
  if (order < 0) throw DomainError("beamformer order must be non-negative");
}

// Largest-magnitude component real and positive; keeps outputs reproducible.
VectorXc fix_phase(VectorXc v) {
  Eigen::Index k = 0;
  v.cwiseAbs().maxCoeff(&k);
  if (std::abs(v(k)) > 0.0) v *= std::conj(v(k)) / std::abs(v(k));
  return v;
}

// Gauss-Legendre nodes and weights on [-1, 1] (Golub-Welsch).
void gauss_legendre(int points, VectorXd& nodes, VectorXd& weights) {
  MatrixXd J = MatrixXd::Zero(points, points);
  for (int i = 1; i < points; ++i) {
    const double b = i / std::sqrt(4.0 * i * i - 1.0);
    J(i, i - 1) = b;
    J(i - 1, i) = b;
  }
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(J);
  nodes = es.eigenvalues();
  weights = 2.0 * es.eigenvectors().row(0).transpose().cwiseAbs2();
}

}  // namespace

Complex beam_pattern(const BeamformerVector& beam, const Direction& dir) {
  const VectorXc y = sh_vector(beam.order, dir);
  if (beam.domain == BeamDomain::Sla) return beam.weights.dot(y);  // gamma^H y
  return y.dot(beam.weights);                                       // y^H lambda
}

BeamformerVector omni_sla(int order) {
  require_order(order);
  BeamformerVector b{"omni", order, BeamDomain::Sla, VectorXc::Zero(num_channels(order))};
  b.weights(0) = 1.0;
  return b;
}

BeamformerVector omni_sma(int order) {
  require_order(order);
  BeamformerVector b{"omni-sma", order, BeamDomain::Sma, VectorXc::Zero(num_channels(order))};
  b.weights(0) = 1.0;
  return b;
}

BeamformerVector pwd_sma(const Direction& dir, int order) {
  require_order(order);
  return {"pwd", order, BeamDomain::Sma, sh_vector(order, dir)};
}

BeamformerVector max_directivity_sla(const Direction& look, int order) {
  require_order(order);
  return {"maxFIX", order, BeamDomain::Sla, fix_phase(sh_vector(order, look).normalized())};
}

VectorXd cardioid_legendre_coefficients(int order) {
  require_order(order);
  VectorXd x, w;
  gauss_legendre(order + 2, x, w);
  VectorXd c = VectorXd::Zero(order + 1);
  for (Eigen::Index q = 0; q < x.size(); ++q) {
    const double f = std::pow(0.5 * (1.0 + x(q)), order);
    for (int n = 0; n <= order; ++n) c(n) += w(q) * f * assoc_legendre(n, 0, x(q));
  }
  for (int n = 0; n <= order; ++n) c(n) *= 0.5 * (2 * n + 1);
  return c;
}

BeamformerVector cardioid_sla(const Direction& null_toward, int order) {
  const VectorXd c = cardioid_legendre_coefficients(order);
  const Direction look = null_toward.antipode();
  VectorXc w = sh_vector(order, look);
  for (int n = 0; n <= order; ++n) w.segment(n * n, 2 * n + 1) *= 4.0 * kPi * c(n) / (2 * n + 1);
  return {"minFIX", order, BeamDomain::Sla, fix_phase(w.normalized())};
}

TimeSplit time_split_from_delay(int direct_delay, double sample_rate, const TimeSplitOptions& opts) {
  TimeSplit s;
  s.direct_delay = direct_delay;
  s.t_d = direct_delay + static_cast<int>(std::lround(opts.direct_window_s * sample_rate));
  s.t_c = direct_delay + static_cast<int>(std::lround(opts.clarity_window_s * sample_rate));
  return s;
}

TimeSplit build_time_split(const RirTensor& rir, const Placement& placement,
                           double speed_of_sound, const TimeSplitOptions& opts) {
  const int delay =
      static_cast<int>(std::lround(placement.direct_distance() / speed_of_sound * rir.sample_rate));
  const TimeSplit s = time_split_from_delay(delay, rir.sample_rate, opts);
  if (s.t_c >= rir.length()) throw DomainError("build_time_split: RIR shorter than the early window");
  // Coincident early reflections can outweigh the direct pulse, so take the
  // first local maximum once the envelope reaches a quarter of the global peak.
  const VectorXd env = rir.samples.col(0).cwiseAbs();
  const double threshold = 0.25 * env.maxCoeff();
  Eigen::Index peak = 0;
  while (peak < env.size() && env(peak) < threshold) ++peak;
  while (peak + 1 < env.size() && env(peak + 1) > env(peak)) ++peak;
  if (std::abs(static_cast<int>(peak) - delay) > opts.peak_tolerance)
    throw DomainError("build_time_split: direct peak at sample " + std::to_string(peak) +
                      ", geometric delay " + std::to_string(delay));
  return s;
}

GevdProblem build_AB(const RirTensor& rir, const VectorXc& lambda, int split_at, int order) {
  if (lambda.size() != rir.cols) throw DomainError("build_AB: beamformer length mismatch");
  if (order < 0 || order > rir.sla_order) throw DomainError("build_AB: order out of range");
  if (split_at < 0 || split_at >= rir.length() - 1) throw DomainError("build_AB: split outside RIR");
  const int dim = num_channels(order);

  // g[t] as columns of a dim x length matrix
  MatrixXc g = MatrixXc::Zero(dim, rir.length());
  for (int j = 0; j < rir.cols; ++j) {
    if (lambda(j) == Complex(0.0)) continue;
    g += lambda(j) * rir.column_block(j).topRows(dim);
  }

  const int early = split_at + 1;
  GevdProblem p;
  MatrixXc A = MatrixXc::Zero(dim, dim);
  MatrixXc B = MatrixXc::Zero(dim, dim);
  A.selfadjointView<Eigen::Lower>().rankUpdate(g.leftCols(early));
  B.selfadjointView<Eigen::Lower>().rankUpdate(g.rightCols(rir.length() - early));
  p.A = A.selfadjointView<Eigen::Lower>();
  p.B = B.selfadjointView<Eigen::Lower>();

  Eigen::SelfAdjointEigenSolver<MatrixXc> es(p.B, Eigen::EigenvaluesOnly);
  const double top = es.eigenvalues().maxCoeff();
  p.b_singular = !(top > 0.0) || es.eigenvalues().minCoeff() <= 1e-10 * top;
  return p;
}

double rayleigh_quotient(const MatrixXc& A, const MatrixXc& B, const VectorXc& gamma) {
  return gamma.dot(A * gamma).real() / gamma.dot(B * gamma).real();
}

GevdExtremes solve_gevd_extremes(const GevdProblem& p) {
  const auto hermitian = [](const MatrixXc& m) {
    return (m - m.adjoint()).norm() <= 1e-12 * std::max(1.0, m.norm());
  };
  if (p.A.rows() != p.A.cols() || p.B.rows() != p.B.cols() || p.A.rows() != p.B.rows())
    throw DomainError("solve_gevd_extremes: shape mismatch");
  if (!hermitian(p.A) || !hermitian(p.B)) throw DomainError("solve_gevd_extremes: non-Hermitian input");

  const MatrixXc b = p.loaded_b();
  Eigen::LLT<MatrixXc> llt(b);
  if (llt.info() != Eigen::Success) throw DomainError("solve_gevd_extremes: B + loading I not positive definite");
  Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXc> es(p.A, b, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
  if (es.info() != Eigen::Success) throw DomainError("solve_gevd_extremes: eigensolver failed");

  const Eigen::Index last = p.dim() - 1;
  GevdExtremes r;
  r.upsilon_min = es.eigenvalues()(0);
  r.upsilon_max = es.eigenvalues()(last);
  r.gamma_min = fix_phase(es.eigenvectors().col(0).normalized());
  r.gamma_max = fix_phase(es.eigenvectors().col(last).normalized());
  return r;
}

std::string design_label(Metric metric, Sense sense) {
  return std::string(sense == Sense::Max ? "max" : "min") + (metric == Metric::DRR ? "DRR" : "C50");
}

DesignResult design(const RirTensor& rir, const TimeSplit& split, Metric metric, Sense sense,
                    int order) {
  VectorXc lambda = VectorXc::Zero(rir.cols);
  lambda(0) = 1.0;
  GevdProblem p = build_AB(rir, lambda, metric == Metric::DRR ? split.t_d : split.t_c, order);
  DesignResult out;
  if (p.b_singular) {
    p.loading = p.default_loading();
    if (!(p.loading > 0.0)) p.loading = 1e-12 * std::max(1.0, p.A.trace().real() / p.dim());
    out.degenerate = true;
  }
  const GevdExtremes ext = solve_gevd_extremes(p);
  out.beam = {design_label(metric, sense), order, BeamDomain::Sla,
              sense == Sense::Max ? ext.gamma_max : ext.gamma_min};
  out.upsilon = sense == Sense::Max ? ext.upsilon_max : ext.upsilon_min;
  return out;
}

// ---------------------------------------------------------------------------

std::string beamformer_json(const BeamformerVector& beam) {
  nlohmann::json w = nlohmann::json::array();
  for (Eigen::Index i = 0; i < beam.weights.size(); ++i)
    w.push_back({beam.weights(i).real(), beam.weights(i).imag()});
  nlohmann::json j = {{"label", beam.label},
                      {"order", beam.order},
                      {"domain", beam.domain == BeamDomain::Sla ? "normalized-sla" : "normalized-sma"},
                      {"weights", w}};
  return j.dump(2);
}

BeamformerVector beamformer_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  BeamformerVector b;
  b.label = j.at("label").get<std::string>();
  b.order = j.at("order").get<int>();
  const std::string dom = j.at("domain").get<std::string>();
  if (dom == "normalized-sla") b.domain = BeamDomain::Sla;
  else if (dom == "normalized-sma") b.domain = BeamDomain::Sma;
  else throw ConfigError("beamformer: unknown domain '" + dom + "'");
  const auto& w = j.at("weights");
  if (static_cast<int>(w.size()) != num_channels(b.order))
    throw ConfigError("beamformer: weight count does not match order");
  b.weights.resize(static_cast<Eigen::Index>(w.size()));
  for (std::size_t i = 0; i < w.size(); ++i)
    b.weights(static_cast<Eigen::Index>(i)) = {w[i].at(0).get<double>(), w[i].at(1).get<double>()};
  return b;
}

void write_beamformer(const BeamformerVector& beam, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << beamformer_json(beam) << '\n';
}

BeamformerVector read_beamformer(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return beamformer_from_json(ss.str());
}

}  // namespace slarev
