#pragma once

#include "dsc/types.hpp"

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace dsc {

/// Stage-2 configuration. The step size is eta_c * m / k; code_threshold = 0
/// resolves to coeff_min / 2.
struct DescentConfig {
  Index steps = 25;
  double eta_c = 0.5;
  double code_threshold = 0.0;
  bool projected = true;
  bool fresh_samples = false;
  Index batch = 0;  ///< per-step batch size when fresh_samples is on; 0 = source default

  void validate() const;
  double resolved_threshold(double coeff_min) const;
};

/// Binary support pattern applied to the gradient, one column per atom.
struct SupportMask {
  Matrix mask;  ///< n x m, entries in {0, 1}
};

SupportMask mask_from_dictionary(const Dictionary& dict);
SupportMask full_mask(Index n, Index m);

struct DescentStep {
  Index step = 0;
  double max_col_error = 0.0;  ///< NaN when no reference dictionary is supplied
  double grad_fro = 0.0;       ///< Frobenius norm of the applied update direction
  double wall_ms = 0.0;
};

struct DescentTrace {
  std::vector<DescentStep> steps;

  void write_csv(std::ostream& out) const;
  void write_csv(const std::string& path) const;
};

struct DescentResult {
  Dictionary dictionary;
  DescentTrace trace;
};

/// Supplies the batch for step s. A fixed-batch source ignores s.
using BatchSource = std::function<Matrix(Index step)>;

BatchSource fixed_batch(Matrix samples);

/// Thresholded encoding x = threshold(A^T y): entries with magnitude below
/// the threshold are zeroed, the rest survive unchanged.
SparseCode encode(const Dictionary& dict, const Eigen::Ref<const Vector>& y, double threshold);

/// Empirical approximate gradient (1/p) sum_i (A x_i - y_i) sgn(x_i)^T with
/// x_i from the thresholded encoding; sgn(0) = 0.
Matrix approx_gradient(const Eigen::Ref<const Matrix>& dict_entries,
                       const Eigen::Ref<const Matrix>& batch, double threshold);
Matrix approx_gradient(const Dictionary& dict, const Eigen::Ref<const Matrix>& batch,
                       double threshold);

/// Entrywise mask application (idempotent).
Matrix project_mask(const Eigen::Ref<const Matrix>& grad, const SupportMask& mask);

/// Projected approximate gradient descent from a0. With cfg.projected the
/// update is A <- A - eta * (H o g); otherwise the mask is ignored. Columns
/// are never renormalized between steps. Throws NonFinite if the iterate
/// leaves the representable range (step size too large).
DescentResult descend(const Dictionary& a0, const SupportMask& mask, const BatchSource& source,
                      const GenerativeConfig& model, const DescentConfig& cfg,
                      const Dictionary* truth = nullptr);

}  // namespace dsc
