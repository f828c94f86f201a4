#pragma once

#include "dsc/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>

namespace dsc {

/// Top-two singular values of a symmetric matrix plus the dominant singular
/// direction. For symmetric M the singular values are the absolute
/// eigenvalues; v1 spans the eigenvector of the largest-magnitude eigenvalue,
/// sign-fixed so its largest-magnitude entry is positive.
template <typename Scalar>
struct SpectralPairT {
  Scalar sigma1 = 0;
  Scalar sigma2 = 0;
  Eigen::Vector<Scalar, Eigen::Dynamic> v1;
};

using SpectralPair = SpectralPairT<double>;

namespace spectral_detail {

/// Matrices up to this dimension take the exact Jacobi path; larger ones use
/// two-column simultaneous iteration.
inline constexpr Index kJacobiMaxDim = 32;

template <typename Scalar>
void check_symmetric(const Eigen::Ref<const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>>& m) {
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = i + 1; j < m.cols(); ++j) {
      const Scalar diff = std::abs(m(i, j) - m(j, i));
      if (diff > Scalar(1e-12) * std::max(Scalar(1), std::abs(m(i, j))))
        throw ConfigError("top2: matrix is not symmetric");
    }
}

template <typename Scalar>
void canonicalize_sign(Eigen::Vector<Scalar, Eigen::Dynamic>& v) {
  Index arg = 0;
  v.cwiseAbs().maxCoeff(&arg);
  if (v[arg] < Scalar(0)) v = -v;
}

/// Cyclic Jacobi eigenvalue sweep. Returns eigenvalues in `evals` and
/// eigenvectors as columns of `evecs`. `max_rotations` bounds total work.
template <typename Scalar>
void jacobi_eigen(Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> a,
                  Eigen::Vector<Scalar, Eigen::Dynamic>& evals,
                  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& evecs, Scalar tol,
                  long max_rotations) {
  const Index n = a.rows();
  evecs.setIdentity(n, n);
  const Scalar scale = a.norm();  // Frobenius
  if (scale == Scalar(0)) {
    evals = Eigen::Vector<Scalar, Eigen::Dynamic>::Zero(n);
    return;
  }
  long rotations = 0;
  for (;;) {
    Scalar off2 = 0;
    for (Index p = 0; p < n; ++p)
      for (Index q = p + 1; q < n; ++q) off2 += a(p, q) * a(p, q);
    if (std::sqrt(Scalar(2) * off2) <= tol * scale) break;
    for (Index p = 0; p < n; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        if (a(p, q) == Scalar(0)) continue;
        if (++rotations > max_rotations)
          throw NoConvergence("jacobi_eigen: rotation budget exhausted");
        const Scalar theta = (a(q, q) - a(p, p)) / (Scalar(2) * a(p, q));
        const Scalar t = (theta >= Scalar(0) ? Scalar(1) : Scalar(-1)) /
                         (std::abs(theta) + std::sqrt(Scalar(1) + theta * theta));
        const Scalar c = Scalar(1) / std::sqrt(Scalar(1) + t * t);
        const Scalar s = t * c;
        // Plane rotation on rows/columns p and q.
        for (Index i = 0; i < n; ++i) {
          const Scalar aip = a(i, p), aiq = a(i, q);
          a(i, p) = c * aip - s * aiq;
          a(i, q) = s * aip + c * aiq;
        }
        for (Index i = 0; i < n; ++i) {
          const Scalar api = a(p, i), aqi = a(q, i);
          a(p, i) = c * api - s * aqi;
          a(q, i) = s * api + c * aqi;
        }
        for (Index i = 0; i < n; ++i) {
          const Scalar vip = evecs(i, p), viq = evecs(i, q);
          evecs(i, p) = c * vip - s * viq;
          evecs(i, q) = s * vip + c * viq;
        }
      }
    }
  }
  evals = a.diagonal();
}

/// Deterministic start block for the iterative path: unit-ish pseudo-random
/// columns from a fixed hash so results are reproducible without an RNG
/// argument.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> start_block(Index n, Index cols) {
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> q(n, cols);
  std::uint64_t state = 0x8f1bbcdc2215d4ffull ^ static_cast<std::uint64_t>(n);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < n; ++i) {
      state += 0x9E3779B97F4A7C15ull;
      std::uint64_t z = state;
      z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
      z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
      z ^= z >> 31;
      q(i, j) = Scalar(static_cast<double>(z >> 11) * 0x1.0p-53 - 0.5);
    }
  return q;
}

/// Gram-Schmidt on two columns; degenerate directions are replaced by
/// deterministic fallbacks so the iteration never stalls on rank-1 input.
template <typename Scalar>
void orthonormalize_two(Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& q) {
  const Index n = q.rows();
  const Scalar tiny = std::numeric_limits<Scalar>::min() * Scalar(1e4);
  Scalar n0 = q.col(0).norm();
  if (n0 <= tiny) {
    q.col(0) = start_block<Scalar>(n, 1);
    n0 = q.col(0).norm();
  }
  q.col(0) /= n0;
  const Scalar before = q.col(1).norm();
  q.col(1) -= q.col(0).dot(q.col(1)) * q.col(0);
  Scalar n1 = q.col(1).norm();
  if (n1 <= std::max(tiny, Scalar(1e-12) * before)) {
    q.col(1) = start_block<Scalar>(n + 1, 1).topRows(n);
    q.col(1) -= q.col(0).dot(q.col(1)) * q.col(0);
    n1 = q.col(1).norm();
  }
  q.col(1) /= n1;
}

/// Two-column simultaneous iteration with Rayleigh-Ritz extraction. Captures
/// the two largest-|eigenvalue| directions of a symmetric matrix, including
/// sign-split pairs, which plain power iteration cannot resolve.
template <typename Scalar>
SpectralPairT<Scalar> block_power_top2(
    const Eigen::Ref<const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>>& m, Scalar tol,
    long max_iter) {
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vec = Eigen::Vector<Scalar, Eigen::Dynamic>;
  const Index n = m.rows();
  Mat q = start_block<Scalar>(n, 2);
  orthonormalize_two(q);
  for (long iter = 0; iter <= max_iter; ++iter) {
    const Mat z = m * q;                   // n x 2
    Eigen::Matrix<Scalar, 2, 2> b = q.transpose() * z;
    b = ((b + b.transpose()) / Scalar(2)).eval();
    // Closed-form 2x2 symmetric eigendecomposition.
    const Scalar tr = b(0, 0) + b(1, 1);
    const Scalar gap = std::sqrt(std::max(Scalar(0), (b(0, 0) - b(1, 1)) * (b(0, 0) - b(1, 1)) +
                                                         Scalar(4) * b(0, 1) * b(0, 1)));
    const Scalar lam_hi = (tr + gap) / Scalar(2);
    const Scalar lam_lo = (tr - gap) / Scalar(2);
    Eigen::Matrix<Scalar, 2, 2> y;
    if (std::abs(b(0, 1)) > std::numeric_limits<Scalar>::min() * Scalar(1e4)) {
      y.col(0) << b(0, 1), lam_hi - b(0, 0);
      y.col(1) << b(0, 1), lam_lo - b(0, 0);
      y.col(0).normalize();
      y.col(1).normalize();
    } else {
      y.setIdentity();
      if (b(1, 1) > b(0, 0)) {
        y.col(0) << Scalar(0), Scalar(1);
        y.col(1) << Scalar(1), Scalar(0);
      }
    }
    Scalar theta[2] = {lam_hi, lam_lo};
    if (std::abs(theta[1]) > std::abs(theta[0])) {
      std::swap(theta[0], theta[1]);
      y.col(0).swap(y.col(1));
    }
    const Vec ritz0 = q * y.col(0);
    const Vec ritz1 = q * y.col(1);
    const Scalar scale = std::max(std::abs(theta[0]), std::numeric_limits<Scalar>::min());
    const Scalar res0 = (z * y.col(0) - theta[0] * ritz0).norm();
    const Scalar res1 = (z * y.col(1) - theta[1] * ritz1).norm();
    if (res0 <= tol * scale && res1 <= tol * scale) {
      SpectralPairT<Scalar> out;
      out.sigma1 = std::abs(theta[0]);
      out.sigma2 = std::abs(theta[1]);
      out.v1 = ritz0.normalized();
      canonicalize_sign(out.v1);
      return out;
    }
    q = z;
    orthonormalize_two(q);
  }
  throw NoConvergence("block_power_top2: no convergence within max_iter");
}

}  // namespace spectral_detail

/// Top-two singular values and the dominant singular direction of a symmetric
/// matrix. Exact Jacobi sweep for dim <= 32, simultaneous iteration above.
/// Throws NoConvergence when the iteration budget runs out.
template <typename Scalar>
SpectralPairT<Scalar> top2(
    const Eigen::Ref<const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>>& m,
    Scalar tol = Scalar(1e-10), long max_iter = 10000) {
  using Vec = Eigen::Vector<Scalar, Eigen::Dynamic>;
  if (m.rows() != m.cols() || m.rows() < 1)
    throw DimensionError("top2: matrix must be square and nonempty");
  spectral_detail::check_symmetric<Scalar>(m);
  const Index n = m.rows();

  if (n == 1) {
    SpectralPairT<Scalar> out;
    out.sigma1 = std::abs(m(0, 0));
    out.sigma2 = Scalar(0);
    out.v1 = Vec::Ones(1);
    return out;
  }
  if (n > spectral_detail::kJacobiMaxDim)
    return spectral_detail::block_power_top2<Scalar>(m, tol, max_iter);

  Vec evals;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> evecs;
  spectral_detail::jacobi_eigen<Scalar>(m, evals, evecs, tol, max_iter);
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(), [&](Index a, Index b) {
    const Scalar aa = std::abs(evals[a]), ab = std::abs(evals[b]);
    return aa != ab ? aa > ab : a < b;
  });
  SpectralPairT<Scalar> out;
  out.sigma1 = std::abs(evals[order[0]]);
  out.sigma2 = std::abs(evals[order[1]]);
  out.v1 = evecs.col(order[0]);
  spectral_detail::canonicalize_sign(out.v1);
  return out;
}

/// Largest singular value of an arbitrary dense matrix, computed from the
/// Gram matrix of the smaller side.
template <typename Scalar>
Scalar spectral_norm(
    const Eigen::Ref<const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>>& m,
    Scalar tol = Scalar(1e-10), long max_iter = 10000) {
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (m.rows() == 0 || m.cols() == 0) return Scalar(0);
  if (m.rows() == 1 && m.cols() == 1) return std::abs(m(0, 0));
  if (m.rows() == 1 || m.cols() == 1) return m.norm();
  Mat gram;
  if (m.rows() <= m.cols())
    gram = m * m.transpose();
  else
    gram = m.transpose() * m;
  gram = ((gram + gram.transpose()) / Scalar(2)).eval();
  const auto pair = top2<Scalar>(gram, tol, max_iter);
  return std::sqrt(std::max(Scalar(0), pair.sigma1));
}

}  // namespace dsc
