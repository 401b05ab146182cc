#pragma once

// Ground truth for small networks: posterior enumeration, brute-force
// conditional bounds, one-sweep transition matrices of the original and
// summary chains, and their spectra.
//
// State indexing. Original space: one binary digit per unknown node in sweep
// order, first unknown most significant. Summary space: one ternary digit per
// unknown in the same order, with 0, 1 and '?' as digits 0, 1 and 2.

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "pgibbs/model.hpp"
#include "pgibbs/summary.hpp"

namespace pgibbs {

enum class StateSpace { Original, Summary };

std::string to_string(StateSpace space);
StateSpace parse_state_space(std::string_view text);

/// Codec between state indices and (partial) assignments of the unknowns.
class StateCodec {
 public:
  StateCodec(const Network& net, StateSpace space);

  StateSpace space() const { return space_; }
  std::size_t dim() const { return dim_; }
  std::span<const NodeIndex> unknowns() const { return unknowns_; }

  /// Label over the unknowns only, e.g. "0?1".
  std::string label(std::size_t index) const;
  std::size_t index_of(const Configuration& x) const;
  std::size_t index_of(const SummaryState& s) const;
  Configuration configuration(std::size_t index) const;
  SummaryState summary(std::size_t index) const;

 private:
  StateSpace space_;
  std::vector<NodeIndex> unknowns_;
  std::size_t dim_ = 1;
  Configuration base_;
};

inline constexpr std::size_t kPosteriorUnknownCap = 20;
inline constexpr std::size_t kMatrixDimCap = 4096;

struct Distribution {
  StateSpace space = StateSpace::Original;
  std::vector<NodeIndex> unknowns;
  std::vector<double> masses;

  std::size_t size() const { return masses.size(); }
};

struct TransitionMatrix {
  StateSpace space = StateSpace::Original;
  std::vector<NodeIndex> unknowns;
  std::size_t dim = 0;
  /// Row-major; row i is the distribution after one sweep from state i.
  std::vector<double> entries;

  double at(std::size_t i, std::size_t j) const { return entries[i * dim + j]; }
};

struct Spectrum {
  /// Sorted by descending magnitude.
  std::vector<std::complex<double>> eigenvalues;
  /// Left eigenvector for eigenvalue 1, summing to 1.
  std::vector<double> stationary;

  /// Largest magnitude left after removing one eigenvalue closest to 1.
  double second_largest_magnitude() const;
  /// Eigenvalues with magnitude above `tol`, in the same order.
  std::vector<std::complex<double>> nonzero(double tol = 1e-9) const;
};

Distribution exact_posterior(const Network& net, std::size_t cap = kPosteriorUnknownCap);

/// Min and max of the Gibbs conditional of node k over every member of beta(s).
ProbabilityBounds brute_force_bounds(const Network& net, const SummaryState& s, NodeIndex k,
                                     std::size_t cap = kDefaultBetaCap);

TransitionMatrix transition_matrix(const Network& net, StateSpace space, std::size_t dim_cap = kMatrixDimCap);

Spectrum eigen_spectrum(const TransitionMatrix& m);

/// p0 advanced by t applications of m.
Distribution distribution_at_time(const Distribution& p0, const TransitionMatrix& m, std::size_t t);

/// Half the L1 distance.
double total_variation(const Distribution& p, const Distribution& q);

/// Lifts an original-space distribution into the summary space ('?'-free
/// states carry the mass).
Distribution embed_in_summary(const Distribution& p);

struct ChiSquareResult {
  double statistic = 0.0;
  std::size_t dof = 0;
  double p_value = 1.0;
};

/// Pearson goodness of fit. Outcomes with zero expected mass and zero count
/// are dropped; a positive count on such an outcome raises
/// ImpossibleOutcomeError.
ChiSquareResult chi_square_gof(std::span<const std::uint64_t> counts, std::span<const double> expected);

/// Upper tail of the chi-square distribution.
double chi_square_upper_tail(double statistic, std::size_t dof);

/// Digits of state `index` over `digits` unknowns, e.g. "0?1".
std::string state_label(StateSpace space, std::size_t digits, std::size_t index);

std::string distribution_json(const Distribution& p, const Network& net);
std::string spectrum_json(const Spectrum& s, const TransitionMatrix& m, const Network& net);
/// Dense CSV; a leading comment names the codec and the header row names
/// the state of each column.
std::string matrix_csv(const TransitionMatrix& m, const Network& net);

}  // namespace pgibbs
