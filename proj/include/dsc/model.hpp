#pragma once

#include "dsc/rng.hpp"
#include "dsc/types.hpp"

namespace dsc {

/// Builds a ground-truth dictionary for the configured structure. Columns are
/// unit norm with exactly r nonzeros, each of magnitude >= tau_floor/sqrt(r).
/// RandomSparse columns are rejection-sampled; more than 100 failed attempts
/// for one column raise GenerationFailure.
Dictionary generate_dictionary(const GenerativeConfig& cfg);

/// max_{i != j} |<column i, column j>|; requires at least two columns.
double mutual_coherence(const Dictionary& dict);

/// Draws a k-sparse code: uniform support, coefficients per cfg.coeff_law.
SparseCode draw_code(const GenerativeConfig& cfg, RngStream& rng);

/// Draws p observations y = D x + eps with per-entry Gaussian noise of
/// standard deviation cfg.sigma_eps; keeps the true codes for diagnostics.
SampleSet draw_samples(const Dictionary& dict, const GenerativeConfig& cfg, Index p,
                       RngStream& rng);

}  // namespace dsc
