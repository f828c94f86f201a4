#pragma once

#include "dsc/rng.hpp"
#include "dsc/spectral.hpp"
#include "dsc/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace dsc {

enum class InitMode { Truncated, PlainFull, FullWithHT };

/// Stage-1 configuration. Threshold coefficients multiply the model-driven
/// scales: the score floor is score_floor_c * k/(m r), the score decay cap is
/// ratio_c * r / log(n)^ratio_log_exponent, the top singular value floor is
/// sv1_floor_c * k/m and the second singular value cap is
/// sv2_cap_c * k/(m log n). Zero-valued dedup_dist / max_trials resolve to
/// model-dependent defaults at run time.
struct InitConfig {
  Index p1 = 0;                      ///< pair-pool sample count; 0 = resolve from the budget
  Index p2 = 0;                      ///< averaging sample count; 0 = resolve from the budget
  double score_floor_c = 0.5;
  double ratio_c = 1.0;
  double ratio_log_exponent = 1.0;
  double sv1_floor_c = 0.6;
  double sv2_cap_c = 1.0;
  double dedup_dist = 0.0;           ///< 0 resolves to 2/log(n)
  Index max_trials = 0;              ///< 0 resolves to the coupon-collector bound
  InitMode mode = InitMode::Truncated;
  double clip_target_norm = 0.0;     ///< >0: rescale A0 by min(1, 2*target/||A0||)

  void validate() const;
  double resolved_dedup_dist(Index n) const;
  Index resolved_max_trials(Index m, Index k) const;
};

struct CandidateAtom {
  Vector vector;        ///< unit norm, length n
  IndexSet support;     ///< nonzero coordinates (size r in Truncated mode)
  double sigma1 = 0.0;
  double sigma2 = 0.0;
  Index trial_index = 0;
};

struct InitStats {
  Index trials = 0;
  Index accepted = 0;
  Index reject_score_floor = 0;
  Index reject_score_ratio = 0;
  Index reject_sigma1 = 0;
  Index reject_sigma2 = 0;
  Index reject_dedup = 0;
  Index reject_no_convergence = 0;
  double wall_seconds = 0.0;

  std::string to_kv() const;  ///< key=value lines
};

struct InitResult {
  Dictionary a0;
  std::vector<CandidateAtom> atoms;
  InitStats stats;
};

/// Per-coordinate reweighted scores
///   e_l = (1/p2) sum_i <y_i, u> <y_i, v> (y_i)_l^2.
/// Symmetric in (u, v).
Vector compute_scores(const Eigen::Ref<const Matrix>& samples, const Eigen::Ref<const Vector>& u,
                      const Eigen::Ref<const Vector>& v);

/// Decides whether the score profile is consistent with a single shared atom:
/// some r' <= r must clear the floor while the next score falls off steeply.
/// On accept returns the coordinates of the r largest |scores|.
std::optional<IndexSet> support_test(const Vector& scores, Index r, const InitConfig& cfg,
                                     const GenerativeConfig& model);

/// Reweighted covariance restricted to rows/columns R:
///   M = (1/p2) sum_i <y_i, u> <y_i, v> (y_i)_R (y_i)_R^T.
/// Its diagonal equals compute_scores restricted to R.
Matrix reduced_covariance(const Eigen::Ref<const Matrix>& samples,
                          const Eigen::Ref<const Vector>& u, const Eigen::Ref<const Vector>& v,
                          const IndexSet& restrict_to);

/// Full n x n reweighted covariance (the untruncated variant).
Matrix full_covariance(const Eigen::Ref<const Matrix>& samples,
                       const Eigen::Ref<const Vector>& u, const Eigen::Ref<const Vector>& v);

/// Accepts the covariance when the top singular value clears its floor and
/// the second stays under its cap, i.e. when the pair plausibly shares
/// exactly one atom.
std::optional<SpectralPair> spectral_certificate(const Eigen::Ref<const Matrix>& m,
                                                 const InitConfig& cfg,
                                                 const GenerativeConfig& model);

/// True when z is farther than dedup_dist from every list entry under the
/// sign-folded distance min(||z - l||, ||z + l||).
bool dedup_accept(const Eigen::Ref<const Vector>& z, const std::vector<CandidateAtom>& list,
                  double dedup_dist);

/// Runs the full stage-1 loop: split samples into a pair pool and an
/// averaging pool, then draw pairs and harvest certified atoms until m
/// candidates pass dedup. Throws IncompleteInit when max_trials runs out.
InitResult initialize(const SampleSet& samples, const GenerativeConfig& model,
                      const InitConfig& cfg, RngStream& rng);

}  // namespace dsc
