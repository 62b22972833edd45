#include "knapmix/analysis.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "knapmix/error.hpp"
#include "knapmix/rng.hpp"

namespace knapmix {

TransitionMatrix::TransitionMatrix(std::int64_t denominator, std::size_t order,
                                   std::vector<std::int64_t> numerators, SolutionSet states)
    : denominator_(denominator), order_(order), numerators_(std::move(numerators)),
      states_(std::move(states)) {
  if (denominator_ <= 0) throw InputError("transition matrix denominator must be positive");
  if (order_ == 0) throw InputError("transition matrix must have at least one state");
  if (numerators_.size() != order_ * order_) throw InputError("transition matrix is not square");
  if (states_.count() != 0 && states_.count() != order_) {
    throw InputError("state list does not match the matrix order");
  }
  row_begin_.reserve(order_ + 1);
  row_begin_.push_back(0);
  const double scale = 1.0 / static_cast<double>(denominator_);
  for (std::size_t i = 0; i < order_; ++i) {
    for (std::size_t j = 0; j < order_; ++j) {
      if (const auto v = numerators_[i * order_ + j]; v != 0) {
        entries_.push_back({static_cast<std::uint32_t>(j), static_cast<double>(v) * scale});
      }
    }
    row_begin_.push_back(entries_.size());
  }
}

std::size_t TransitionMatrix::index_of(const Solution& x) const {
  if (states_.count() == 0) throw InputError("matrix carries no state labels");
  if (x.size() != states_.dimension()) throw InputError("state has the wrong dimension");
  const std::size_t idx = states_.index_of(x);
  if (idx == states_.count()) throw InputError("state " + x.to_string() + " is not feasible");
  return idx;
}

bool TransitionMatrix::is_symmetric() const {
  for (std::size_t i = 0; i < order_; ++i) {
    for (std::size_t j = i + 1; j < order_; ++j) {
      if (numerators_[i * order_ + j] != numerators_[j * order_ + i]) return false;
    }
  }
  return true;
}

bool TransitionMatrix::has_nonnegative_entries() const {
  return std::all_of(numerators_.begin(), numerators_.end(), [](auto v) { return v >= 0; });
}

bool TransitionMatrix::has_unit_rows() const {
  for (std::size_t i = 0; i < order_; ++i) {
    const auto row = std::span(numerators_).subspan(i * order_, order_);
    if (std::accumulate(row.begin(), row.end(), std::int64_t{0}) != denominator_) return false;
  }
  return true;
}

bool TransitionMatrix::has_lazy_diagonal() const {
  for (std::size_t i = 0; i < order_; ++i) {
    if (2 * numerators_[i * order_ + i] < denominator_) return false;
  }
  return true;
}

bool TransitionMatrix::uniform_is_stationary() const {
  // (u P)_j = (1/N) sum_i P(i, j), so u P = u iff every column sums to 1.
  for (std::size_t j = 0; j < order_; ++j) {
    std::int64_t column = 0;
    for (std::size_t i = 0; i < order_; ++i) column += numerators_[i * order_ + j];
    if (column != denominator_) return false;
  }
  return true;
}

void TransitionMatrix::apply(std::span<const double> p, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t i = 0; i < order_; ++i) {
    const double mass = p[i];
    if (mass == 0.0) continue;
    for (std::size_t e = row_begin_[i]; e < row_begin_[i + 1]; ++e) {
      out[entries_[e].column] += mass * entries_[e].value;
    }
  }
}

std::vector<double> TransitionMatrix::dense() const {
  std::vector<double> out(numerators_.size());
  const double scale = 1.0 / static_cast<double>(denominator_);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = static_cast<double>(numerators_[k]) * scale;
  return out;
}

TransitionMatrix transition_matrix(const KnapsackInstance& instance, std::size_t matrix_cap,
                                   std::size_t enumeration_cap) {
  SolutionSet set = enumerate(instance, enumeration_cap);
  const std::size_t count = set.count();
  if (count > matrix_cap) {
    throw CapacityError("instance has N = " + std::to_string(count) +
                        " states, above the matrix cap of " + std::to_string(matrix_cap));
  }
  const std::size_t n = instance.size();
  const auto denominator = static_cast<std::int64_t>(2 * n);
  std::vector<std::int64_t> numerators(count * count, 0);
  const auto keys = set.keys();
  for (std::size_t i = 0; i < count; ++i) {
    std::int64_t moves = 0;
    for (std::size_t bit = 0; bit < n; ++bit) {
      const std::size_t j = set.index_of(keys[i] ^ (std::uint64_t{1} << bit));
      if (j == count) continue;
      numerators[i * count + j] = 1;
      ++moves;
    }
    numerators[i * count + i] = denominator - moves;
  }
  return TransitionMatrix(denominator, count, std::move(numerators), std::move(set));
}

namespace {

void require_chain(const TransitionMatrix& P) {
  if (!P.is_symmetric()) throw InvariantError("transition matrix is not symmetric");
  if (!P.has_nonnegative_entries() || !P.has_unit_rows()) {
    throw InvariantError("transition matrix is not stochastic");
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

void normalize(std::vector<double>& x) {
  const double norm = std::sqrt(dot(x, x));
  for (auto& v : x) v /= norm;
}

void remove_mean(std::vector<double>& x) {
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  for (auto& v : x) v -= mean;
}

// Power iteration; `deflate` projects out the uniform (top) eigenvector.
double power_iteration(const TransitionMatrix& P, bool deflate, std::uint64_t max_iterations,
                       std::uint64_t* iterations) {
  const std::size_t count = P.order();
  Stream stream(0x5eed);
  std::vector<double> x(count), next(count);
  for (auto& v : x) v = 0.5 + static_cast<double>(stream.next() >> 11) * 0x1.0p-53;
  if (deflate) remove_mean(x);
  normalize(x);

  constexpr std::uint64_t kStallWindow = 64;
  double rayleigh = 0.0;
  std::uint64_t stalled = 0;
  std::uint64_t it = 0;
  for (; it < max_iterations && stalled < kStallWindow; ++it) {
    P.apply(x, next);  // P symmetric: x P = P x
    if (deflate) remove_mean(next);
    const double updated = dot(x, next);
    stalled = std::abs(updated - rayleigh) <= 1e-15 ? stalled + 1 : 0;
    rayleigh = updated;
    x.swap(next);
    normalize(x);
  }
  if (iterations != nullptr) *iterations = it;
  return rayleigh;
}

double total_variation_to_uniform(std::span<const double> p) {
  const double u = 1.0 / static_cast<double>(p.size());
  double sum = 0.0;
  for (double v : p) sum += std::abs(v - u);
  return 0.5 * sum;
}

}  // namespace

double second_eigenvalue_by_power_iteration(const TransitionMatrix& P,
                                            std::uint64_t max_iterations,
                                            std::uint64_t* iterations) {
  require_chain(P);
  if (P.order() == 1) return 0.0;
  return power_iteration(P, true, max_iterations, iterations);
}

Spectrum spectrum(const TransitionMatrix& P) {
  require_chain(P);
  Spectrum out;
  const std::size_t count = P.order();
  if (count == 1) {
    out.eigenvalues = {1.0};
    return out;
  }
  const auto values = P.dense();
  const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
      matrix(values.data(), static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(count));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(matrix, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw InvariantError("symmetric eigen-solve failed");
  const Eigen::VectorXd& ascending = solver.eigenvalues();
  out.eigenvalues.assign(ascending.data(), ascending.data() + ascending.size());
  std::reverse(out.eigenvalues.begin(), out.eigenvalues.end());

  if (out.eigenvalues.back() < -kEigenTolerance) {
    throw InvariantError("lazy chain has a negative eigenvalue " +
                         std::to_string(out.eigenvalues.back()));
  }
  const double lambda2 = out.eigenvalues[1];
  out.gap = 1.0 - lambda2;

  std::uint64_t it1 = 0, it2 = 0;
  out.power_lambda1 = power_iteration(P, false, 100'000, &it1);
  out.power_lambda2 = power_iteration(P, true, 2'000'000, &it2);
  out.power_iterations = it1 + it2;
  if (std::abs(out.power_lambda1 - out.eigenvalues[0]) > kPowerIterationTolerance ||
      std::abs(out.power_lambda2 - lambda2) > kPowerIterationTolerance) {
    throw InvariantError("eigen-solve and power iteration disagree: lambda1 " +
                         std::to_string(out.eigenvalues[0]) + " vs " +
                         std::to_string(out.power_lambda1) + ", lambda2 " +
                         std::to_string(lambda2) + " vs " + std::to_string(out.power_lambda2));
  }
  return out;
}

double spectral_gap(const TransitionMatrix& P) { return spectrum(P).gap; }

double tv_distance_at(const TransitionMatrix& P, std::size_t start, std::uint64_t t) {
  if (start >= P.order()) throw InputError("start index out of range");
  std::vector<double> p(P.order(), 0.0), next(P.order());
  p[start] = 1.0;
  for (std::uint64_t s = 0; s < t; ++s) {
    P.apply(p, next);
    p.swap(next);
  }
  return total_variation_to_uniform(p);
}

double tv_distance_at(const TransitionMatrix& P, const Solution& start, std::uint64_t t) {
  return tv_distance_at(P, P.index_of(start), t);
}

std::vector<double> tv_curve(const TransitionMatrix& P, std::size_t start, std::uint64_t max_t) {
  if (start >= P.order()) throw InputError("start index out of range");
  std::vector<double> curve;
  curve.reserve(static_cast<std::size_t>(max_t) + 1);
  std::vector<double> p(P.order(), 0.0), next(P.order());
  p[start] = 1.0;
  curve.push_back(total_variation_to_uniform(p));
  for (std::uint64_t t = 0; t < max_t; ++t) {
    P.apply(p, next);
    p.swap(next);
    curve.push_back(total_variation_to_uniform(p));
  }
  return curve;
}

std::uint64_t empirical_mixing_time(const TransitionMatrix& P, std::size_t start, double epsilon,
                                    std::uint64_t max_steps) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw InputError("epsilon must lie in (0, 1)");
  if (start >= P.order()) throw InputError("start index out of range");
  if (P.order() == 1) return 0;

  std::vector<double> scratch(P.order());
  auto advance = [&](std::vector<double>& p, std::uint64_t steps) {
    for (std::uint64_t s = 0; s < steps; ++s) {
      P.apply(p, scratch);
      p.swap(scratch);
    }
  };

  // Invariant: TV(lo) > epsilon (lo_dist is the distribution at lo), TV(hi) <= epsilon.
  std::vector<double> lo_dist(P.order(), 0.0);
  lo_dist[start] = 1.0;
  if (total_variation_to_uniform(lo_dist) <= epsilon) return 0;
  std::uint64_t lo = 0;
  std::uint64_t hi = 1;
  std::vector<double> probe = lo_dist;
  while (true) {
    advance(probe, hi - lo);
    if (total_variation_to_uniform(probe) <= epsilon) break;
    lo = hi;
    lo_dist = probe;
    if (hi > max_steps / 2) return kNotMixed;
    hi *= 2;
  }
  while (hi - lo > 1) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    probe = lo_dist;
    advance(probe, mid - lo);
    if (total_variation_to_uniform(probe) <= epsilon) {
      hi = mid;
    } else {
      lo = mid;
      lo_dist.swap(probe);
    }
  }
  return hi > max_steps ? kNotMixed : hi;
}

std::uint64_t empirical_mixing_time(const TransitionMatrix& P, const Solution& start,
                                    double epsilon) {
  return empirical_mixing_time(P, P.index_of(start), epsilon);
}

std::vector<std::vector<std::uint64_t>> mixing_times_all_starts(const TransitionMatrix& P,
                                                                std::span<const double> epsilons,
                                                                std::uint64_t max_steps) {
  for (double e : epsilons) {
    if (!(e > 0.0 && e < 1.0)) throw InputError("epsilon must lie in (0, 1)");
  }
  const std::size_t count = P.order();
  std::vector<std::vector<std::uint64_t>> result(epsilons.size(),
                                                 std::vector<std::uint64_t>(count, kNotMixed));
  if (count == 1) {
    for (auto& row : result) row[0] = 0;
    return result;
  }
  std::vector<double> dist(count * count, 0.0), next(count * count);
  for (std::size_t s = 0; s < count; ++s) dist[s * count + s] = 1.0;
  std::size_t pending = epsilons.size() * count;
  for (std::uint64_t t = 0;; ++t) {
    for (std::size_t s = 0; s < count; ++s) {
      const double tv = total_variation_to_uniform(std::span(dist).subspan(s * count, count));
      for (std::size_t e = 0; e < epsilons.size(); ++e) {
        if (result[e][s] == kNotMixed && tv <= epsilons[e]) {
          result[e][s] = t;
          --pending;
        }
      }
    }
    if (pending == 0 || t == max_steps) break;
    for (std::size_t s = 0; s < count; ++s) {
      P.apply(std::span(dist).subspan(s * count, count), std::span(next).subspan(s * count, count));
    }
    dist.swap(next);
  }
  return result;
}

std::uint64_t theorem_bound(std::size_t n, double epsilon) {
  if (n == 0) throw InputError("theorem bound needs n >= 1");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw InputError("epsilon must lie in (0, 1)");
  const double cube = std::pow(static_cast<double>(n), 3);
  return static_cast<std::uint64_t>(std::ceil(cube * std::log(16.0 / epsilon)));
}

double flow_mixing_bound(double flow_cost, std::size_t longest_path, std::uint64_t solution_count,
                         double epsilon) {
  return flow_cost * static_cast<double>(longest_path) *
         (std::log(static_cast<double>(solution_count)) + std::log(1.0 / epsilon));
}

MixingProfile mixing_profile(const TransitionMatrix& P, const Solution& start,
                             std::span<const double> epsilons, std::uint64_t curve_steps) {
  MixingProfile profile;
  profile.start = start;
  const std::size_t s = P.index_of(start);
  profile.tv_curve = tv_curve(P, s, curve_steps);
  const std::size_t n = start.size();
  for (double e : epsilons) {
    profile.tau[e] = empirical_mixing_time(P, s, e);
    profile.theorem_bound[e] = theorem_bound(n, e);
  }
  profile.spectral_gap = spectral_gap(P);
  return profile;
}

}  // namespace knapmix
