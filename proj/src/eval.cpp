#include "dsc/eval.hpp"

#include "dsc/spectral.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

namespace dsc {

std::vector<Index> max_weight_assignment(const Eigen::Ref<const Matrix>& weights) {
  if (weights.rows() != weights.cols())
    throw DimensionError("max_weight_assignment: weight matrix must be square");
  const Index n = weights.rows();
  if (n == 0) return {};

  // Hungarian method with potentials on the negated weights (minimization),
  // shortest augmenting paths, 1-based scratch arrays.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> potential_row(n + 1, 0.0), potential_col(n + 1, 0.0);
  std::vector<Index> matched_row(n + 1, 0);  // matched_row[j] = row assigned to column j
  std::vector<Index> path(n + 1, 0);

  for (Index i = 1; i <= n; ++i) {
    matched_row[0] = i;
    Index j0 = 0;
    std::vector<double> min_reduced(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const Index i0 = matched_row[j0];
      double delta = inf;
      Index j1 = 0;
      for (Index j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur =
            -weights(i0 - 1, j - 1) - potential_row[i0] - potential_col[j];
        if (cur < min_reduced[j]) {
          min_reduced[j] = cur;
          path[j] = j0;
        }
        if (min_reduced[j] < delta) {
          delta = min_reduced[j];
          j1 = j;
        }
      }
      for (Index j = 0; j <= n; ++j) {
        if (used[j]) {
          potential_row[matched_row[j]] += delta;
          potential_col[j] -= delta;
        } else {
          min_reduced[j] -= delta;
        }
      }
      j0 = j1;
    } while (matched_row[j0] != 0);
    do {
      const Index j1 = path[j0];
      matched_row[j0] = matched_row[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<Index> perm(static_cast<std::size_t>(n));
  for (Index j = 1; j <= n; ++j) perm[static_cast<std::size_t>(matched_row[j] - 1)] = j - 1;
  return perm;
}

MatchResult match_entries(const Eigen::Ref<const Matrix>& truth,
                          const Eigen::Ref<const Matrix>& est) {
  if (truth.rows() != est.rows() || truth.cols() != est.cols())
    throw DimensionError("match: dictionaries must share dimensions");
  const Index m = truth.cols();
  const Matrix inner = truth.transpose() * est;
  const Matrix weights = inner.cwiseAbs();
  MatchResult result;
  result.perm = max_weight_assignment(weights);
  result.signs.resize(m);
  result.total_weight = 0.0;
  for (Index i = 0; i < m; ++i) {
    const Index j = result.perm[static_cast<std::size_t>(i)];
    result.total_weight += weights(i, j);
    result.signs[i] = inner(i, j) < 0.0 ? -1.0 : 1.0;
  }
  return result;
}

MatchResult match(const Dictionary& truth, const Dictionary& est) {
  return match_entries(truth.entries, est.entries);
}

Matrix aligned_entries(const Eigen::Ref<const Matrix>& est, const MatchResult& result) {
  Matrix aligned(est.rows(), est.cols());
  for (Index i = 0; i < est.cols(); ++i)
    aligned.col(i) = result.signs[i] * est.col(result.perm[static_cast<std::size_t>(i)]);
  return aligned;
}

double aligned_max_column_error(const Eigen::Ref<const Matrix>& truth,
                                const Eigen::Ref<const Matrix>& est) {
  const MatchResult result = match_entries(truth, est);
  const Matrix aligned = aligned_entries(est, result);
  return (aligned - truth).colwise().norm().maxCoeff();
}

std::string EvalReport::csv_header() const {
  return "fro_error,max_col_error,spectral_ratio,support_frac,recovered";
}

std::string EvalReport::csv_row() const {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%d", fro_error, max_col_error,
                spectral_ratio, support_exact_frac, recovered ? 1 : 0);
  return buf;
}

EvalReport report(const Dictionary& truth, const Dictionary& est, double threshold) {
  if (truth.rows() != est.rows() || truth.cols() != est.cols())
    throw DimensionError("report: dictionaries must share dimensions");
  const Index m = truth.cols();
  const MatchResult correspondence = match(truth, est);
  const Matrix aligned = aligned_entries(est.entries, correspondence);
  const Matrix diff = aligned - truth.entries;

  EvalReport rep;
  rep.threshold_used = threshold;
  rep.fro_error = diff.norm();
  rep.max_col_error = m > 0 ? diff.colwise().norm().maxCoeff() : 0.0;
  const double truth_norm = spectral_norm<double>(truth.entries);
  rep.spectral_ratio = truth_norm > 0.0 ? spectral_norm<double>(diff) / truth_norm : 0.0;
  Index exact = 0;
  for (Index i = 0; i < m; ++i) {
    const Index j = correspondence.perm[static_cast<std::size_t>(i)];
    if (truth.supports[static_cast<std::size_t>(i)] == est.supports[static_cast<std::size_t>(j)])
      ++exact;
  }
  rep.support_exact_frac = m > 0 ? static_cast<double>(exact) / static_cast<double>(m) : 1.0;
  rep.recovered = rep.fro_error < threshold;
  return rep;
}

}  // namespace dsc
