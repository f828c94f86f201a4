#pragma once

// Shared fixtures for planted-truth Monte Carlo tests: the block-diagonal
// synthetic setup (n = m = 64, k = 6, r = 2, Rademacher codes) plus helpers
// that craft sample pairs with a prescribed support overlap.

#include "dsc/model.hpp"
#include "dsc/rng.hpp"

#include <set>

namespace planted {

using namespace dsc;

inline GenerativeConfig block_model(double sigma = 0.0) {
  GenerativeConfig cfg;
  cfg.n = cfg.m = 64;
  cfg.k = 6;
  cfg.r = 2;
  cfg.sigma_eps = sigma;
  cfg.structure = Structure::BlockDiagonal;
  cfg.coeff_law = CoeffLaw::Rademacher;
  return cfg;
}

/// Sample with a forced support: y = sum_{j in supp} (+-1) A_j + noise.
inline Vector forced_sample(const Dictionary& dict, const IndexSet& support, double sigma,
                            RngStream& rng) {
  Vector y = Vector::Zero(dict.rows());
  for (Index j : support) {
    const double sign = rng.below(2) == 0 ? 1.0 : -1.0;
    y += sign * dict.entries.col(j);
  }
  if (sigma > 0.0)
    for (Index i = 0; i < y.size(); ++i) y[i] += sigma * rng.normal();
  return y;
}

/// Support pair (U, V) with U ∩ V equal to exactly the given shared atoms.
inline std::pair<IndexSet, IndexSet> overlap_supports(const IndexSet& shared, Index k, Index m,
                                                      RngStream& rng) {
  std::set<Index> used(shared.begin(), shared.end());
  auto fill = [&](IndexSet base) {
    while (static_cast<Index>(base.size()) < k) {
      const auto cand = static_cast<Index>(rng.below(static_cast<std::uint64_t>(m)));
      if (used.insert(cand).second) base.push_back(cand);
    }
    std::sort(base.begin(), base.end());
    return base;
  };
  const IndexSet u = fill(shared);
  const IndexSet v = fill(shared);
  return {u, v};
}

}  // namespace planted
