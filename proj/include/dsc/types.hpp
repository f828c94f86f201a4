#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dsc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Sorted ascending, no duplicates.
using IndexSet = std::vector<Index>;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class ConfigError : public std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

class DimensionError : public std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

class GenerationFailure : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class NoConvergence : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class NonFinite : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Initialization ran out of trials before collecting all atoms.
class IncompleteInit : public std::runtime_error {
 public:
  IncompleteInit(Index found, Index wanted)
      : std::runtime_error("initialization incomplete: found " + std::to_string(found) +
                           " of " + std::to_string(wanted) + " atoms"),
        found_count(found),
        wanted_count(wanted) {}

  Index found_count;
  Index wanted_count;
};

// ---------------------------------------------------------------------------
// Generative model configuration
// ---------------------------------------------------------------------------

enum class Structure { BlockDiagonal, RandomSparse, Identity };
enum class CoeffLaw { Rademacher, UniformSigned };

struct GenerativeConfig {
  Index n = 0;               ///< signal dimension
  Index m = 0;               ///< atom count
  Index k = 0;               ///< code sparsity
  Index r = 1;               ///< column sparsity of the synthesis matrix
  double sigma_eps = 0.0;    ///< per-entry noise standard deviation
  double coeff_min = 1.0;    ///< minimum nonzero code magnitude C, in (0, 1]
  Structure structure = Structure::RandomSparse;
  CoeffLaw coeff_law = CoeffLaw::Rademacher;
  std::uint64_t seed = 0;
  double tau_floor = 0.5;    ///< dictionary magnitude floor is tau_floor / sqrt(r)

  /// Minimum nonzero magnitude of a dictionary entry.
  double tau() const;

  /// Throws ConfigError on any invariant violation.
  void validate() const;
};

// ---------------------------------------------------------------------------
// Core value types
// ---------------------------------------------------------------------------

/// Dense dictionary with per-column supports. Columns of a freshly generated
/// dictionary are unit norm with exactly r nonzeros each; estimates produced
/// by initialization/descent reuse the type without the magnitude floor.
struct Dictionary {
  Matrix entries;                      ///< n x m
  std::vector<IndexSet> supports;      ///< one sorted index set per column

  Index rows() const { return entries.rows(); }
  Index cols() const { return entries.cols(); }
};

/// Builds a Dictionary from raw entries, deriving supports from the nonzero
/// pattern (|entry| > zero_tol).
Dictionary dictionary_from_entries(Matrix entries, double zero_tol = 1e-12);

/// Checks generated-dictionary invariants: support consistency, unit column
/// norms, magnitude floor. Throws GenerationFailure on violation.
void check_dictionary_invariants(const Dictionary& dict, double tau);

struct SparseCode {
  IndexSet support;   ///< sorted, |support| <= k
  Vector values;      ///< length m, zero off support
};

struct SampleSet {
  Matrix observations;                                ///< n x p
  std::optional<std::vector<SparseCode>> truth_codes; ///< diagnostics only
  double noise_sigma = 0.0;

  Index dim() const { return observations.rows(); }
  Index count() const { return observations.cols(); }
};

}  // namespace dsc
