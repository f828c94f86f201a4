#include "dsc/descent.hpp"

#include "dsc/eval.hpp"
#include "dsc/matrix_io.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace dsc {

void DescentConfig::validate() const {
  if (steps < 1) throw ConfigError("descent: steps must be >= 1");
  if (!(eta_c > 0.0)) throw ConfigError("descent: eta_c must be > 0");
  if (code_threshold < 0.0) throw ConfigError("descent: code_threshold must be >= 0");
  if (batch < 0) throw ConfigError("descent: batch must be >= 0");
}

double DescentConfig::resolved_threshold(double coeff_min) const {
  return code_threshold > 0.0 ? code_threshold : coeff_min / 2.0;
}

SupportMask mask_from_dictionary(const Dictionary& dict) {
  SupportMask mask;
  mask.mask = Matrix::Zero(dict.rows(), dict.cols());
  for (Index j = 0; j < dict.cols(); ++j)
    for (Index i : dict.supports[static_cast<std::size_t>(j)]) mask.mask(i, j) = 1.0;
  return mask;
}

SupportMask full_mask(Index n, Index m) { return SupportMask{Matrix::Ones(n, m)}; }

void DescentTrace::write_csv(std::ostream& out) const {
  out << "step,max_col_err,grad_fro,wall_ms\n";
  char buf[160];
  for (const DescentStep& s : steps) {
    std::snprintf(buf, sizeof(buf), "%lld,%.17g,%.17g,%.3f\n", static_cast<long long>(s.step),
                  s.max_col_error, s.grad_fro, s.wall_ms);
    out << buf;
  }
}

void DescentTrace::write_csv(const std::string& path) const {
  std::ostringstream oss;
  write_csv(oss);
  write_file_atomic(path, oss.str());
}

BatchSource fixed_batch(Matrix samples) {
  return [batch = std::move(samples)](Index) { return batch; };
}

SparseCode encode(const Dictionary& dict, const Eigen::Ref<const Vector>& y, double threshold) {
  if (y.size() != dict.rows()) throw DimensionError("encode: sample dimension mismatch");
  SparseCode code;
  code.values = dict.entries.transpose() * y;
  for (Index i = 0; i < code.values.size(); ++i) {
    if (std::abs(code.values[i]) < threshold)
      code.values[i] = 0.0;
    else
      code.support.push_back(i);
  }
  return code;
}

Matrix approx_gradient(const Eigen::Ref<const Matrix>& dict_entries,
                       const Eigen::Ref<const Matrix>& batch, double threshold) {
  if (batch.rows() != dict_entries.rows())
    throw DimensionError("approx_gradient: batch dimension mismatch");
  if (batch.cols() < 1) throw DimensionError("approx_gradient: empty batch");
  Matrix codes = dict_entries.transpose() * batch;  // m x p
  Matrix signs(codes.rows(), codes.cols());
  for (Index j = 0; j < codes.cols(); ++j)
    for (Index i = 0; i < codes.rows(); ++i) {
      double& c = codes(i, j);
      if (std::abs(c) < threshold) {
        c = 0.0;
        signs(i, j) = 0.0;
      } else {
        signs(i, j) = c > 0.0 ? 1.0 : -1.0;
      }
    }
  return (dict_entries * codes - batch) * signs.transpose() / static_cast<double>(batch.cols());
}

Matrix approx_gradient(const Dictionary& dict, const Eigen::Ref<const Matrix>& batch,
                       double threshold) {
  return approx_gradient(dict.entries, batch, threshold);
}

DescentResult descend(const Dictionary& a0, const SupportMask& mask, const BatchSource& source,
                      const GenerativeConfig& model, const DescentConfig& cfg,
                      const Dictionary* truth) {
  cfg.validate();
  if (cfg.projected && (mask.mask.rows() != a0.rows() || mask.mask.cols() != a0.cols()))
    throw DimensionError("descend: mask dimensions must match the dictionary");
  if (truth != nullptr && (truth->rows() != a0.rows() || truth->cols() != a0.cols()))
    throw DimensionError("descend: truth dimensions must match the dictionary");

  const double eta =
      cfg.eta_c * static_cast<double>(model.m) / static_cast<double>(model.k);
  const double threshold = cfg.resolved_threshold(model.coeff_min);

  Matrix current = a0.entries;
  Matrix fixed;
  if (!cfg.fresh_samples) fixed = source(0);

  DescentResult result;
  result.trace.steps.reserve(static_cast<std::size_t>(cfg.steps));
  for (Index s = 0; s < cfg.steps; ++s) {
    const auto t0 = std::chrono::steady_clock::now();
    if (cfg.fresh_samples) fixed = source(s);
    const Matrix& batch = fixed;
    if (batch.rows() != current.rows())
      throw DimensionError("descend: batch dimension mismatch at step " + std::to_string(s));
    Matrix grad = approx_gradient(current, batch, threshold);
    if (cfg.projected) grad = project_mask(grad, mask);
    current.noalias() -= eta * grad;
    if (!current.allFinite())
      throw NonFinite("descend: iterate became non-finite at step " + std::to_string(s) +
                      " (step size too large)");
    DescentStep step;
    step.step = s;
    step.grad_fro = grad.norm();
    step.max_col_error = truth != nullptr
                             ? aligned_max_column_error(truth->entries, current)
                             : std::numeric_limits<double>::quiet_NaN();
    step.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    result.trace.steps.push_back(step);
  }

  result.dictionary = dictionary_from_entries(std::move(current));
  return result;
}

Matrix project_mask(const Eigen::Ref<const Matrix>& grad, const SupportMask& mask) {
  if (grad.rows() != mask.mask.rows() || grad.cols() != mask.mask.cols())
    throw DimensionError("project_mask: dimension mismatch");
  return grad.cwiseProduct(mask.mask);
}

}  // namespace dsc
