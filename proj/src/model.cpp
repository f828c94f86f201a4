#include "dsc/model.hpp"

#include <cmath>

namespace dsc {

double GenerativeConfig::tau() const { return tau_floor / std::sqrt(static_cast<double>(r)); }

void GenerativeConfig::validate() const {
  if (n < 1) throw ConfigError("model: n must be >= 1");
  if (m < 1) throw ConfigError("model: m must be >= 1");
  if (k < 1 || k > m) throw ConfigError("model: need 1 <= k <= m");
  if (r < 1 || r > n) throw ConfigError("model: need 1 <= r <= n");
  if (!(coeff_min > 0.0) || coeff_min > 1.0) throw ConfigError("model: need 0 < coeff_min <= 1");
  if (sigma_eps < 0.0) throw ConfigError("model: sigma_eps must be >= 0");
  if (!(tau_floor > 0.0)) throw ConfigError("model: tau_floor must be > 0");
  if (tau() > 1.0) throw ConfigError("model: tau_floor/sqrt(r) exceeds 1, no valid magnitudes");
  if (structure == Structure::BlockDiagonal) {
    if (n != m) throw ConfigError("model: BlockDiagonal requires n == m");
    if (n % 2 != 0) throw ConfigError("model: BlockDiagonal requires even n");
    if (r != 2) throw ConfigError("model: BlockDiagonal requires r == 2");
  }
  if (structure == Structure::Identity) {
    if (n != m) throw ConfigError("model: Identity requires n == m");
    if (r != 1) throw ConfigError("model: Identity requires r == 1");
  }
}

Dictionary dictionary_from_entries(Matrix entries, double zero_tol) {
  Dictionary dict;
  dict.supports.resize(static_cast<std::size_t>(entries.cols()));
  for (Index j = 0; j < entries.cols(); ++j) {
    IndexSet& supp = dict.supports[static_cast<std::size_t>(j)];
    for (Index i = 0; i < entries.rows(); ++i)
      if (std::abs(entries(i, j)) > zero_tol) supp.push_back(i);
  }
  dict.entries = std::move(entries);
  return dict;
}

void check_dictionary_invariants(const Dictionary& dict, double tau) {
  if (dict.supports.size() != static_cast<std::size_t>(dict.cols()))
    throw GenerationFailure("dictionary: supports/columns mismatch");
  for (Index j = 0; j < dict.cols(); ++j) {
    const IndexSet& supp = dict.supports[static_cast<std::size_t>(j)];
    Index nonzeros = 0;
    for (Index i = 0; i < dict.rows(); ++i)
      if (dict.entries(i, j) != 0.0) ++nonzeros;
    if (nonzeros != static_cast<Index>(supp.size()))
      throw GenerationFailure("dictionary: support size disagrees with nonzero count");
    for (Index i : supp) {
      if (dict.entries(i, j) == 0.0)
        throw GenerationFailure("dictionary: zero entry listed in support");
      if (std::abs(dict.entries(i, j)) < tau)
        throw GenerationFailure("dictionary: entry below magnitude floor");
    }
    const double norm = dict.entries.col(j).norm();
    if (std::abs(norm - 1.0) > 1e-9)
      throw GenerationFailure("dictionary: column norm outside [1-1e-9, 1+1e-9]");
  }
}

namespace {

Dictionary make_block_diagonal(const GenerativeConfig& cfg) {
  const double h = 1.0 / std::sqrt(2.0);
  Dictionary dict;
  dict.entries = Matrix::Zero(cfg.n, cfg.m);
  dict.supports.resize(static_cast<std::size_t>(cfg.m));
  for (Index b = 0; b < cfg.n / 2; ++b) {
    const Index c = 2 * b;
    dict.entries(c, c) = h;
    dict.entries(c + 1, c) = h;
    dict.entries(c, c + 1) = h;
    dict.entries(c + 1, c + 1) = -h;
    dict.supports[static_cast<std::size_t>(c)] = {c, c + 1};
    dict.supports[static_cast<std::size_t>(c + 1)] = {c, c + 1};
  }
  return dict;
}

Dictionary make_identity(const GenerativeConfig& cfg) {
  Dictionary dict;
  dict.entries = Matrix::Identity(cfg.n, cfg.m);
  dict.supports.resize(static_cast<std::size_t>(cfg.m));
  for (Index j = 0; j < cfg.m; ++j) dict.supports[static_cast<std::size_t>(j)] = {j};
  return dict;
}

Dictionary make_random_sparse(const GenerativeConfig& cfg) {
  constexpr int kMaxAttemptsPerColumn = 100;
  const double tau = cfg.tau();
  RngStream rng = RngStream(cfg.seed).derive(0x640c7);
  Dictionary dict;
  dict.entries = Matrix::Zero(cfg.n, cfg.m);
  dict.supports.resize(static_cast<std::size_t>(cfg.m));
  Vector column(cfg.n);
  for (Index j = 0; j < cfg.m; ++j) {
    bool placed = false;
    for (int attempt = 0; attempt < kMaxAttemptsPerColumn && !placed; ++attempt) {
      column.setZero();
      const IndexSet supp = rng.sample_indices(cfg.r, cfg.n);
      for (Index i : supp) {
        const double magnitude = tau + (1.0 - tau) * rng.uniform();
        const double sign = rng.below(2) == 0 ? 1.0 : -1.0;
        column[i] = sign * magnitude;
      }
      column /= column.norm();
      // Normalization can push small entries under the floor; retry if so.
      bool ok = true;
      for (Index i : supp)
        if (std::abs(column[i]) < tau) {
          ok = false;
          break;
        }
      if (!ok) continue;
      dict.entries.col(j) = column;
      dict.supports[static_cast<std::size_t>(j)] = supp;
      placed = true;
    }
    if (!placed)
      throw GenerationFailure("generate_dictionary: column " + std::to_string(j) +
                              " failed the magnitude floor after " +
                              std::to_string(kMaxAttemptsPerColumn) + " resamples");
  }
  return dict;
}

}  // namespace

Dictionary generate_dictionary(const GenerativeConfig& cfg) {
  cfg.validate();
  Dictionary dict;
  switch (cfg.structure) {
    case Structure::BlockDiagonal:
      dict = make_block_diagonal(cfg);
      break;
    case Structure::Identity:
      dict = make_identity(cfg);
      break;
    case Structure::RandomSparse:
      dict = make_random_sparse(cfg);
      break;
  }
  check_dictionary_invariants(dict, cfg.tau());
  return dict;
}

double mutual_coherence(const Dictionary& dict) {
  if (dict.cols() < 2) throw ConfigError("mutual_coherence: need at least two columns");
  const Matrix gram = dict.entries.transpose() * dict.entries;
  double best = 0.0;
  for (Index i = 0; i < gram.rows(); ++i)
    for (Index j = 0; j < gram.cols(); ++j)
      if (i != j) best = std::max(best, std::abs(gram(i, j)));
  return best;
}

SparseCode draw_code(const GenerativeConfig& cfg, RngStream& rng) {
  SparseCode code;
  code.support = rng.sample_indices(cfg.k, cfg.m);
  code.values = Vector::Zero(cfg.m);
  for (Index i : code.support) {
    const double sign = rng.below(2) == 0 ? 1.0 : -1.0;
    double magnitude = 1.0;
    if (cfg.coeff_law == CoeffLaw::UniformSigned)
      magnitude = cfg.coeff_min + (1.0 - cfg.coeff_min) * rng.uniform();
    code.values[i] = sign * magnitude;
  }
  return code;
}

SampleSet draw_samples(const Dictionary& dict, const GenerativeConfig& cfg, Index p,
                       RngStream& rng) {
  if (dict.rows() != cfg.n || dict.cols() != cfg.m)
    throw DimensionError("draw_samples: dictionary does not match model dimensions");
  if (p < 1) throw ConfigError("draw_samples: need p >= 1");
  SampleSet set;
  set.observations.resize(cfg.n, p);
  set.noise_sigma = cfg.sigma_eps;
  std::vector<SparseCode> codes;
  codes.reserve(static_cast<std::size_t>(p));
  for (Index t = 0; t < p; ++t) {
    SparseCode code = draw_code(cfg, rng);
    auto col = set.observations.col(t);
    col.setZero();
    for (Index j : code.support) col += code.values[j] * dict.entries.col(j);
    if (cfg.sigma_eps > 0.0)
      for (Index i = 0; i < cfg.n; ++i) col[i] += cfg.sigma_eps * rng.normal();
    codes.push_back(std::move(code));
  }
  set.truth_codes = std::move(codes);
  return set;
}

}  // namespace dsc
