#include "dsc/init.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>

namespace dsc {

namespace {

// log(n) guarded for n < 2 so threshold formulas stay finite.
double safe_log(Index n) { return std::log(static_cast<double>(std::max<Index>(n, 2))); }

// Indices of the q largest |values|; ties resolve to the lower index.
IndexSet top_abs_indices(const Vector& values, Index q) {
  std::vector<Index> order(static_cast<std::size_t>(values.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(), [&](Index a, Index b) {
    const double aa = std::abs(values[a]), ab = std::abs(values[b]);
    return aa != ab ? aa > ab : a < b;
  });
  IndexSet out(order.begin(), order.begin() + q);
  std::sort(out.begin(), out.end());
  return out;
}

enum class SupportVerdict { Accept, FloorFail, RatioFail };

SupportVerdict support_verdict(const Vector& scores, Index r, double floor, double ratio_cap) {
  const Index n = scores.size();
  Vector sorted_abs = scores.cwiseAbs();
  std::sort(sorted_abs.data(), sorted_abs.data() + n, std::greater<double>());
  bool floor_seen = false;
  for (Index rp = 1; rp <= std::min(r, n); ++rp) {
    const double top = sorted_abs[rp - 1];
    if (top < floor || top <= 0.0) continue;
    floor_seen = true;
    const double next = rp < n ? sorted_abs[rp] : 0.0;
    if (next / top < ratio_cap) return SupportVerdict::Accept;
  }
  return floor_seen ? SupportVerdict::RatioFail : SupportVerdict::FloorFail;
}

}  // namespace

void InitConfig::validate() const {
  if (p1 < 2) throw ConfigError("init: p1 must be >= 2");
  if (p2 < 1) throw ConfigError("init: p2 must be >= 1");
  if (!(score_floor_c > 0.0)) throw ConfigError("init: score_floor_c must be > 0");
  if (!(ratio_c > 0.0)) throw ConfigError("init: ratio_c must be > 0");
  if (!(ratio_log_exponent > 0.0)) throw ConfigError("init: ratio_log_exponent must be > 0");
  if (!(sv1_floor_c > 0.0)) throw ConfigError("init: sv1_floor_c must be > 0");
  if (!(sv2_cap_c > 0.0)) throw ConfigError("init: sv2_cap_c must be > 0");
  if (dedup_dist != 0.0 && (dedup_dist <= 0.0 || dedup_dist >= std::sqrt(2.0)))
    throw ConfigError("init: dedup_dist must lie in (0, sqrt(2))");
  if (max_trials < 0) throw ConfigError("init: max_trials must be >= 0");
  if (clip_target_norm < 0.0) throw ConfigError("init: clip_target_norm must be >= 0");
}

double InitConfig::resolved_dedup_dist(Index n) const {
  if (dedup_dist > 0.0) return dedup_dist;
  return std::min(2.0 / safe_log(n), std::sqrt(2.0) * 0.75);
}

Index InitConfig::resolved_max_trials(Index m, Index k) const {
  if (max_trials > 0) return max_trials;
  const double pairs = static_cast<double>(m) / static_cast<double>(k);
  const double factor = std::ceil(pairs * pairs / static_cast<double>(m));
  const auto bound = static_cast<Index>(64.0 * static_cast<double>(m) * factor);
  return std::max<Index>(bound, 50 * m);
}

std::string InitStats::to_kv() const {
  std::ostringstream oss;
  oss << "trials=" << trials << '\n'
      << "accepted=" << accepted << '\n'
      << "reject_score_floor=" << reject_score_floor << '\n'
      << "reject_score_ratio=" << reject_score_ratio << '\n'
      << "reject_sigma1=" << reject_sigma1 << '\n'
      << "reject_sigma2=" << reject_sigma2 << '\n'
      << "reject_dedup=" << reject_dedup << '\n'
      << "reject_no_convergence=" << reject_no_convergence << '\n'
      << "wall_seconds=" << wall_seconds << '\n';
  return oss.str();
}

Vector compute_scores(const Eigen::Ref<const Matrix>& samples, const Eigen::Ref<const Vector>& u,
                      const Eigen::Ref<const Vector>& v) {
  if (u.size() != samples.rows() || v.size() != samples.rows())
    throw DimensionError("compute_scores: u/v length must equal the sample dimension");
  if (samples.cols() < 1) throw DimensionError("compute_scores: empty sample set");
  const Vector weights =
      (samples.transpose() * u).cwiseProduct(samples.transpose() * v);
  return samples.cwiseProduct(samples) * weights / static_cast<double>(samples.cols());
}

std::optional<IndexSet> support_test(const Vector& scores, Index r, const InitConfig& cfg,
                                     const GenerativeConfig& model) {
  if (!scores.allFinite()) throw ConfigError("support_test: scores must be finite");
  const double floor = cfg.score_floor_c * static_cast<double>(model.k) /
                       (static_cast<double>(model.m) * static_cast<double>(r));
  const double cap = cfg.ratio_c * static_cast<double>(r) /
                     std::pow(safe_log(model.n), cfg.ratio_log_exponent);
  if (support_verdict(scores, r, floor, cap) != SupportVerdict::Accept) return std::nullopt;
  return top_abs_indices(scores, std::min(r, scores.size()));
}

Matrix reduced_covariance(const Eigen::Ref<const Matrix>& samples,
                          const Eigen::Ref<const Vector>& u, const Eigen::Ref<const Vector>& v,
                          const IndexSet& restrict_to) {
  if (restrict_to.empty()) throw DimensionError("reduced_covariance: empty restriction");
  if (u.size() != samples.rows() || v.size() != samples.rows())
    throw DimensionError("reduced_covariance: u/v length must equal the sample dimension");
  for (Index i : restrict_to)
    if (i < 0 || i >= samples.rows())
      throw DimensionError("reduced_covariance: restriction index out of range");
  const Vector weights =
      (samples.transpose() * u).cwiseProduct(samples.transpose() * v);
  const auto q = static_cast<Index>(restrict_to.size());
  Matrix rows(q, samples.cols());
  for (Index a = 0; a < q; ++a) rows.row(a) = samples.row(restrict_to[static_cast<std::size_t>(a)]);
  Matrix cov = rows * weights.asDiagonal() * rows.transpose() / static_cast<double>(samples.cols());
  return ((cov + cov.transpose()) / 2.0).eval();
}

Matrix full_covariance(const Eigen::Ref<const Matrix>& samples,
                       const Eigen::Ref<const Vector>& u, const Eigen::Ref<const Vector>& v) {
  if (u.size() != samples.rows() || v.size() != samples.rows())
    throw DimensionError("full_covariance: u/v length must equal the sample dimension");
  const Vector weights =
      (samples.transpose() * u).cwiseProduct(samples.transpose() * v);
  Matrix cov =
      samples * weights.asDiagonal() * samples.transpose() / static_cast<double>(samples.cols());
  return ((cov + cov.transpose()) / 2.0).eval();
}

std::optional<SpectralPair> spectral_certificate(const Eigen::Ref<const Matrix>& m,
                                                 const InitConfig& cfg,
                                                 const GenerativeConfig& model) {
  const double km = static_cast<double>(model.k) / static_cast<double>(model.m);
  const double sv1_floor = cfg.sv1_floor_c * km;
  const double sv2_cap = cfg.sv2_cap_c * km / safe_log(model.n);
  SpectralPair pair = top2<double>(m);
  if (pair.sigma1 >= sv1_floor && pair.sigma2 < sv2_cap) return pair;
  return std::nullopt;
}

bool dedup_accept(const Eigen::Ref<const Vector>& z, const std::vector<CandidateAtom>& list,
                  double dedup_dist) {
  for (const CandidateAtom& atom : list) {
    const double d_plus = (z - atom.vector).norm();
    const double d_minus = (z + atom.vector).norm();
    if (std::min(d_plus, d_minus) <= dedup_dist) return false;
  }
  return true;
}

InitResult initialize(const SampleSet& samples, const GenerativeConfig& model,
                      const InitConfig& cfg, RngStream& rng) {
  model.validate();
  cfg.validate();
  const Index n = model.n;
  const Index m = model.m;
  if (samples.dim() != n) throw DimensionError("initialize: sample dimension != model n");
  if (samples.count() < cfg.p1 + cfg.p2)
    throw ConfigError("initialize: need at least p1 + p2 samples");

  const auto t_start = std::chrono::steady_clock::now();

  // Disjoint pair pool P1 and averaging pool P2, drawn by random split.
  const std::vector<Index> perm = rng.permutation(samples.count());
  Matrix pool1(n, cfg.p1);
  Matrix pool2(n, cfg.p2);
  for (Index j = 0; j < cfg.p1; ++j)
    pool1.col(j) = samples.observations.col(perm[static_cast<std::size_t>(j)]);
  for (Index j = 0; j < cfg.p2; ++j)
    pool2.col(j) = samples.observations.col(perm[static_cast<std::size_t>(cfg.p1 + j)]);

  const Matrix pool2_sq = pool2.cwiseProduct(pool2);
  // Inner products <y, u> for every (y in P2, u in P1); one GEMM instead of
  // two GEMVs per trial.
  const Matrix cross = pool2.transpose() * pool1;

  const double score_floor = cfg.score_floor_c * static_cast<double>(model.k) /
                             (static_cast<double>(m) * static_cast<double>(model.r));
  const double ratio_cap = cfg.ratio_c * static_cast<double>(model.r) /
                           std::pow(safe_log(n), cfg.ratio_log_exponent);
  const double km = static_cast<double>(model.k) / static_cast<double>(m);
  const double sv1_floor = cfg.sv1_floor_c * km;
  const double sv2_cap = cfg.sv2_cap_c * km / safe_log(n);
  const double dedup_dist = cfg.resolved_dedup_dist(n);
  const Index max_trials = cfg.resolved_max_trials(m, model.k);
  const double p2_count = static_cast<double>(cfg.p2);

  InitResult result;
  result.atoms.reserve(static_cast<std::size_t>(m));
  InitStats& stats = result.stats;

  Vector weights(cfg.p2);
  Vector scores(n);

  while (static_cast<Index>(result.atoms.size()) < m && stats.trials < max_trials) {
    ++stats.trials;
    const auto iu = static_cast<Index>(rng.below(static_cast<std::uint64_t>(cfg.p1)));
    auto iv = static_cast<Index>(rng.below(static_cast<std::uint64_t>(cfg.p1 - 1)));
    if (iv >= iu) ++iv;
    weights = cross.col(iu).cwiseProduct(cross.col(iv));

    IndexSet support;
    Matrix cov;
    if (cfg.mode == InitMode::Truncated) {
      scores.noalias() = pool2_sq * weights;
      scores /= p2_count;
      const SupportVerdict verdict = support_verdict(scores, model.r, score_floor, ratio_cap);
      if (verdict != SupportVerdict::Accept) {
        (verdict == SupportVerdict::FloorFail ? stats.reject_score_floor
                                              : stats.reject_score_ratio)++;
        continue;
      }
      support = top_abs_indices(scores, std::min(model.r, n));
      const auto q = static_cast<Index>(support.size());
      Matrix rows(q, cfg.p2);
      for (Index a = 0; a < q; ++a) rows.row(a) = pool2.row(support[static_cast<std::size_t>(a)]);
      cov = rows * weights.asDiagonal() * rows.transpose() / p2_count;
    } else {
      cov = pool2 * weights.asDiagonal() * pool2.transpose() / p2_count;
    }
    cov = ((cov + cov.transpose()) / 2.0).eval();

    SpectralPair pair;
    try {
      pair = top2<double>(cov);
    } catch (const NoConvergence&) {
      // A covariance whose spectrum cannot be resolved cannot be certified;
      // treat it like any other rejected trial.
      ++stats.reject_no_convergence;
      continue;
    }
    if (pair.sigma1 < sv1_floor) {
      ++stats.reject_sigma1;
      continue;
    }
    if (pair.sigma2 >= sv2_cap) {
      ++stats.reject_sigma2;
      continue;
    }

    Vector z;
    IndexSet z_support;
    if (cfg.mode == InitMode::Truncated) {
      z = Vector::Zero(n);
      for (Index a = 0; a < static_cast<Index>(support.size()); ++a)
        z[support[static_cast<std::size_t>(a)]] = pair.v1[a];
      z_support = support;
    } else if (cfg.mode == InitMode::FullWithHT) {
      z_support = top_abs_indices(pair.v1, std::min(model.r, n));
      z = Vector::Zero(n);
      for (Index i : z_support) z[i] = pair.v1[i];
      z /= z.norm();
    } else {
      z = pair.v1;
      for (Index i = 0; i < n; ++i)
        if (z[i] != 0.0) z_support.push_back(i);
    }

    if (!dedup_accept(z, result.atoms, dedup_dist)) {
      ++stats.reject_dedup;
      continue;
    }
    ++stats.accepted;
    result.atoms.push_back(
        CandidateAtom{std::move(z), std::move(z_support), pair.sigma1, pair.sigma2, stats.trials});
  }

  stats.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  if (static_cast<Index>(result.atoms.size()) < m)
    throw IncompleteInit(static_cast<Index>(result.atoms.size()), m);

  result.a0.entries.resize(n, m);
  result.a0.supports.resize(static_cast<std::size_t>(m));
  for (Index j = 0; j < m; ++j) {
    result.a0.entries.col(j) = result.atoms[static_cast<std::size_t>(j)].vector;
    result.a0.supports[static_cast<std::size_t>(j)] =
        result.atoms[static_cast<std::size_t>(j)].support;
  }
  if (cfg.clip_target_norm > 0.0) {
    const double norm = spectral_norm<double>(result.a0.entries);
    if (norm > 2.0 * cfg.clip_target_norm)
      result.a0.entries *= 2.0 * cfg.clip_target_norm / norm;
  }
  return result;
}

}  // namespace dsc
