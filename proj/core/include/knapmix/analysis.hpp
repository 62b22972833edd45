#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <vector>

#include "knapmix/instance.hpp"

namespace knapmix {

inline constexpr std::size_t kDefaultMatrixCap = 4096;
inline constexpr double kEigenTolerance = 1e-10;
inline constexpr double kPowerIterationTolerance = 1e-8;
inline constexpr std::uint64_t kNotMixed = std::numeric_limits<std::uint64_t>::max();

// Dense transition matrix with exact rational entries numerator(i, j) /
// denominator(). For the lazy chain every entry is a multiple of 1/(2n), so
// the representation is exact at every size. Rows and columns follow the
// canonical order of states().
class TransitionMatrix {
 public:
  // Arbitrary matrix given row-major numerators over a common denominator.
  // Only shapes are checked; the property predicates below report the rest.
  TransitionMatrix(std::int64_t denominator, std::size_t order,
                   std::vector<std::int64_t> numerators, SolutionSet states = {});

  std::size_t order() const noexcept { return order_; }
  std::int64_t denominator() const noexcept { return denominator_; }
  std::int64_t numerator(std::size_t i, std::size_t j) const { return numerators_.at(i * order_ + j); }
  double operator()(std::size_t i, std::size_t j) const {
    return static_cast<double>(numerator(i, j)) / static_cast<double>(denominator_);
  }
  const SolutionSet& states() const noexcept { return states_; }
  // Canonical index of a state; throws InputError if it is not a state.
  std::size_t index_of(const Solution& x) const;

  bool is_symmetric() const;
  bool has_nonnegative_entries() const;
  bool has_unit_rows() const;
  bool has_lazy_diagonal() const;  // P(x, x) >= 1/2
  // u P = u for the uniform row vector u, checked exactly via column sums.
  bool uniform_is_stationary() const;
  bool is_valid_lazy_chain() const {
    return is_symmetric() && has_nonnegative_entries() && has_unit_rows();
  }

  // out = p P for a row vector p.
  void apply(std::span<const double> p, std::span<double> out) const;

  std::vector<double> dense() const;

 private:
  struct Entry {
    std::uint32_t column;
    double value;
  };

  std::int64_t denominator_ = 1;
  std::size_t order_ = 0;
  std::vector<std::int64_t> numerators_;
  SolutionSet states_;
  std::vector<std::size_t> row_begin_;  // CSR view of the non-zeros
  std::vector<Entry> entries_;
};

// P(x, y) = 1/(2n) for feasible single-flip pairs, P(x, x) = 1 - deg(x)/(2n).
// Throws CapacityError when n exceeds the enumeration cap or N the matrix cap.
TransitionMatrix transition_matrix(const KnapsackInstance& instance,
                                   std::size_t matrix_cap = kDefaultMatrixCap,
                                   std::size_t enumeration_cap = kDefaultEnumerationCap);

struct Spectrum {
  std::vector<double> eigenvalues;  // descending
  double gap = 1.0;                 // 1 - lambda_2; 1 for a single state
  double power_lambda1 = 1.0;       // power-iteration estimates
  double power_lambda2 = 0.0;
  std::uint64_t power_iterations = 0;
};

// Full symmetric eigen-solve, cross-checked against power iteration on P and
// on P deflated by the uniform vector. Throws InvariantError if P is not a
// symmetric stochastic matrix, if an eigenvalue is below -1e-10, or if the
// two routes disagree on lambda_1 or lambda_2 by more than 1e-8.
Spectrum spectrum(const TransitionMatrix& P);

double spectral_gap(const TransitionMatrix& P);

// Power iteration on P with the uniform direction projected out, i.e. the
// largest eigenvalue of P - (1/N) 1 1^T. Stops when the Rayleigh quotient
// has stalled for 64 iterations or after max_iterations.
double second_eigenvalue_by_power_iteration(const TransitionMatrix& P,
                                            std::uint64_t max_iterations = 2'000'000,
                                            std::uint64_t* iterations = nullptr);

// Total variation distance between delta_start P^t and the uniform
// distribution, by t sparse matrix-vector products.
double tv_distance_at(const TransitionMatrix& P, std::size_t start, std::uint64_t t);
double tv_distance_at(const TransitionMatrix& P, const Solution& start, std::uint64_t t);

// TV distance for t = 0..max_t.
std::vector<double> tv_curve(const TransitionMatrix& P, std::size_t start, std::uint64_t max_t);

// Smallest t with TV(t) <= epsilon, by doubling then binary search over the
// non-increasing TV curve. Returns kNotMixed if not reached by max_steps.
std::uint64_t empirical_mixing_time(const TransitionMatrix& P, std::size_t start, double epsilon,
                                    std::uint64_t max_steps = std::uint64_t{1} << 32);
std::uint64_t empirical_mixing_time(const TransitionMatrix& P, const Solution& start,
                                    double epsilon);

// Mixing times from every start at once: result[e][s] is the mixing time for
// epsilons[e] from state s (kNotMixed past max_steps). Evolves all point
// masses together, one step at a time.
std::vector<std::vector<std::uint64_t>> mixing_times_all_starts(const TransitionMatrix& P,
                                                                std::span<const double> epsilons,
                                                                std::uint64_t max_steps);

// ceil(n^3 ln(16 / epsilon)). Throws InputError unless n >= 1 and 0 < epsilon < 1.
std::uint64_t theorem_bound(std::size_t n, double epsilon);

// Flow-based bound  rho * |p| * (ln N + ln(1/epsilon))  for uniform pi.
double flow_mixing_bound(double flow_cost, std::size_t longest_path, std::uint64_t solution_count,
                         double epsilon);

struct MixingProfile {
  Solution start;
  std::vector<double> tv_curve;           // index t
  std::map<double, std::uint64_t> tau;    // epsilon -> mixing time
  std::map<double, std::uint64_t> theorem_bound;
  double spectral_gap = 1.0;
};

MixingProfile mixing_profile(const TransitionMatrix& P, const Solution& start,
                             std::span<const double> epsilons, std::uint64_t curve_steps);

}  // namespace knapmix
