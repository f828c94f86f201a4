#pragma once

#include "dsc/types.hpp"

#include <string>
#include <vector>

namespace dsc {

/// Column correspondence between a reference dictionary and an estimate:
/// perm[i] is the estimate column matched to reference column i, signs[i] the
/// sign flip that aligns them, total_weight the matching objective
/// sum_i |<truth_i, est_perm[i]>|.
struct MatchResult {
  std::vector<Index> perm;
  Vector signs;
  double total_weight = 0.0;
};

/// Maximum-weight perfect matching on G = |truth^T est| via the Hungarian
/// method, with signs read off the matched inner products (sign(0) = +1).
MatchResult match(const Dictionary& truth, const Dictionary& est);
MatchResult match_entries(const Eigen::Ref<const Matrix>& truth,
                          const Eigen::Ref<const Matrix>& est);

/// Exact O(m^3) solver for the assignment problem: returns perm maximizing
/// sum_i weights(i, perm[i]).
std::vector<Index> max_weight_assignment(const Eigen::Ref<const Matrix>& weights);

struct EvalReport {
  double fro_error = 0.0;
  double max_col_error = 0.0;      ///< worst aligned column deviation
  double spectral_ratio = 0.0;     ///< ||aligned - truth|| / ||truth||
  double support_exact_frac = 0.0;
  bool recovered = false;
  double threshold_used = 0.0;

  std::string csv_header() const;
  std::string csv_row() const;
};

/// Aligns est to truth by permutation and sign, then reports global and
/// per-column errors plus the support agreement fraction. `recovered` is
/// fro_error < threshold.
EvalReport report(const Dictionary& truth, const Dictionary& est, double threshold);

/// Aligned estimate entries: column i holds signs[i] * est.col(perm[i]).
Matrix aligned_entries(const Eigen::Ref<const Matrix>& est, const MatchResult& result);

/// Convenience: match + worst aligned column error, used for truth tracking.
double aligned_max_column_error(const Eigen::Ref<const Matrix>& truth,
                                const Eigen::Ref<const Matrix>& est);

}  // namespace dsc
