#include "dsc/model.hpp"
#include "dsc/rng.hpp"
#include "dsc/spectral.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace dsc;

namespace {

Matrix random_symmetric(Index n, std::uint64_t seed) {
  RngStream rng(seed, 0);
  Matrix m(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = i; j < n; ++j) m(i, j) = m(j, i) = 2.0 * rng.uniform() - 1.0;
  return m;
}

/// Symmetric matrix with a prescribed spectrum, built from a random
/// orthonormal basis.
Matrix with_spectrum(const Vector& evals, std::uint64_t seed) {
  const Index n = evals.size();
  RngStream rng(seed, 1);
  Matrix g(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) g(i, j) = rng.normal();
  const Matrix q = Eigen::HouseholderQR<Matrix>(g).householderQ();
  Matrix m = q * evals.asDiagonal() * q.transpose();
  return ((m + m.transpose()) / 2.0).eval();
}

}  // namespace

TEST_SUITE("spectral") {

TEST_CASE("identity and fixed 2x2") {
  const Matrix eye = Matrix::Identity(2, 2);
  const SpectralPair p = top2<double>(eye);
  CHECK(p.sigma1 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(p.sigma2 == doctest::Approx(1.0).epsilon(1e-12));

  Matrix m(2, 2);
  m << 2, 1, 1, 2;
  const SpectralPair q = top2<double>(m);
  CHECK(q.sigma1 == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(q.sigma2 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(q.v1[0] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(q.v1[1] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("dim-1 and zero matrices") {
  Matrix neg(1, 1);
  neg << -3.0;
  const SpectralPair p = top2<double>(neg);
  CHECK(p.sigma1 == 3.0);
  CHECK(p.sigma2 == 0.0);
  CHECK(p.v1[0] == 1.0);

  for (Index n : {4, 40}) {
    const SpectralPair z = top2<double>(Matrix::Zero(n, n));
    CHECK(z.sigma1 == 0.0);
    CHECK(z.sigma2 == 0.0);
    CHECK(z.v1.norm() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("matches classical Jacobi oracle on random 5x5") {
  const Matrix m = random_symmetric(5, 13);
  Vector evals;
  Matrix evecs;
  oracles::jacobi_classical(m, evals, evecs);
  const SpectralPair p = top2<double>(m);
  CHECK(p.sigma1 == doctest::Approx(std::abs(evals[0])).epsilon(1e-8));
  CHECK(p.sigma2 == doctest::Approx(std::abs(evals[1])).epsilon(1e-8));
  CHECK(std::abs(p.v1.dot(evecs.col(0))) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("oracle agreement across small dims") {
  for (Index n = 2; n <= 8; ++n) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const Matrix m = random_symmetric(n, 100 * static_cast<std::uint64_t>(n) + seed);
      Vector evals;
      Matrix evecs;
      oracles::jacobi_classical(m, evals, evecs);
      const SpectralPair p = top2<double>(m);
      CHECK(p.sigma1 == doctest::Approx(std::abs(evals[0])).epsilon(1e-8));
      CHECK(p.sigma2 == doctest::Approx(std::abs(evals[1])).epsilon(1e-8));
    }
  }
}

TEST_CASE("iterative path matches a planted spectrum") {
  Vector evals(40);
  RngStream rng(5150, 0);
  for (Index i = 0; i < 40; ++i) evals[i] = 4.0 * rng.uniform() - 2.0;
  // Ensure a usable gap between |lambda|_2 and |lambda|_3.
  evals[0] = 3.0;
  evals[1] = -2.5;
  const Matrix m = with_spectrum(evals, 99);
  const SpectralPair p = top2<double>(m);
  CHECK(p.sigma1 == doctest::Approx(3.0).epsilon(1e-8));
  CHECK(p.sigma2 == doctest::Approx(2.5).epsilon(1e-8));
  CHECK((m * p.v1).norm() == doctest::Approx(p.sigma1).epsilon(1e-8));
}

TEST_CASE("iterative path handles a sign-split dominant pair") {
  // |lambda1| == |lambda2| with opposite signs defeats plain power iteration.
  Vector evals = Vector::Zero(40);
  evals[0] = 2.0;
  evals[1] = -2.0;
  evals[2] = 0.5;
  const Matrix m = with_spectrum(evals, 7);
  const SpectralPair p = top2<double>(m, 1e-9, 20000);
  CHECK(p.sigma1 == doctest::Approx(2.0).epsilon(1e-7));
  CHECK(p.sigma2 == doctest::Approx(2.0).epsilon(1e-7));
  CHECK((m * p.v1).norm() == doctest::Approx(p.sigma1).epsilon(1e-7));
}

TEST_CASE("sigma1 dominates random probes") {
  for (Index n : {6, 40}) {
    const Matrix m = random_symmetric(n, 17 + static_cast<std::uint64_t>(n));
    const SpectralPair p = top2<double>(m);
    RngStream rng(3, 2);
    for (int t = 0; t < 200; ++t) {
      Vector u(n);
      for (Index i = 0; i < n; ++i) u[i] = rng.normal();
      u.normalize();
      CHECK(p.sigma1 + 1e-9 >= (m * u).norm());
    }
  }
}

TEST_CASE("deflation consistency") {
  for (Index n = 2; n <= 8; ++n) {
    const Matrix m = random_symmetric(n, 900 + static_cast<std::uint64_t>(n));
    const SpectralPair p = top2<double>(m);
    const double signed_lambda = p.v1.dot(m * p.v1);
    const Matrix deflated = m - signed_lambda * p.v1 * p.v1.transpose();
    const SpectralPair q = top2<double>(((deflated + deflated.transpose()) / 2.0).eval());
    CHECK(q.sigma1 == doctest::Approx(p.sigma2).epsilon(1e-8).scale(1.0));
  }
}

TEST_CASE("invariant under simultaneous permutation") {
  const Matrix m = random_symmetric(6, 321);
  RngStream rng(8, 0);
  const std::vector<Index> perm = rng.permutation(6);
  Matrix pm(6, 6);
  for (Index i = 0; i < 6; ++i)
    for (Index j = 0; j < 6; ++j)
      pm(i, j) = m(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
  const SpectralPair a = top2<double>(m);
  const SpectralPair b = top2<double>(pm);
  CHECK(a.sigma1 == doctest::Approx(b.sigma1).epsilon(1e-10));
  CHECK(a.sigma2 == doctest::Approx(b.sigma2).epsilon(1e-10));
  Vector permuted_v1(6);
  for (Index i = 0; i < 6; ++i) permuted_v1[i] = a.v1[perm[static_cast<std::size_t>(i)]];
  CHECK(std::abs(permuted_v1.dot(b.v1)) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("positive scaling homogeneity") {
  for (Index n : {5, 40}) {
    const Matrix m = random_symmetric(n, 44 + static_cast<std::uint64_t>(n));
    const SpectralPair a = top2<double>(m);
    const SpectralPair b = top2<double>((2.5 * m).eval());
    CHECK(b.sigma1 == doctest::Approx(2.5 * a.sigma1).epsilon(1e-9));
    CHECK(b.sigma2 == doctest::Approx(2.5 * a.sigma2).epsilon(1e-9));
    CHECK(std::abs(a.v1.dot(b.v1)) == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("errors") {
  Matrix asym(2, 2);
  asym << 1, 2, 3, 4;
  CHECK_THROWS_AS(top2<double>(asym), ConfigError);
  Matrix rect(2, 3);
  rect.setZero();
  CHECK_THROWS_AS(top2<double>(rect), DimensionError);
  Matrix needs_work(2, 2);
  needs_work << 2, 1, 1, 2;
  CHECK_THROWS_AS(top2<double>(needs_work, 1e-10, 0), NoConvergence);
}

TEST_CASE("spectral_norm") {
  CHECK(spectral_norm<double>(Matrix::Zero(3, 5)) == 0.0);

  GenerativeConfig cfg;
  cfg.n = cfg.m = 64;
  cfg.k = 6;
  cfg.r = 2;
  cfg.structure = Structure::BlockDiagonal;
  const Dictionary dict = generate_dictionary(cfg);
  CHECK(spectral_norm<double>(dict.entries) == doctest::Approx(1.0).epsilon(1e-8));

  RngStream rng(64, 0);
  Matrix rect(6, 4);
  for (Index i = 0; i < 6; ++i)
    for (Index j = 0; j < 4; ++j) rect(i, j) = rng.normal();
  const double expected = oracles::spectral_norm_power(rect, 1000000);
  CHECK(spectral_norm<double>(rect) == doctest::Approx(expected).epsilon(1e-8));

  Matrix single(1, 1);
  single << -2.0;
  CHECK(spectral_norm<double>(single) == 2.0);
  Matrix vec(3, 1);
  vec << 3, 0, 4;
  CHECK(spectral_norm<double>(vec) == doctest::Approx(5.0).epsilon(1e-12));
}

}  // TEST_SUITE spectral
