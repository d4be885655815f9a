#pragma once

#include <cstddef>
#include <vector>

#include "coarsekit/error.hpp"
#include "coarsekit/random.hpp"

namespace coarsekit {

inline constexpr double kStochasticTol = 1e-12;

/// P(child | parent): n_out x n_in, column-stochastic, stored row-major.
/// Multi-parent tables flatten parents (a, x) to a * n_x + x.
class CondTable {
 public:
  CondTable(std::size_t n_out, std::size_t n_in, std::vector<double> p);

  static CondTable identity(std::size_t n);
  static CondTable uniform(std::size_t n_out, std::size_t n_in);

  std::size_t n_out() const noexcept { return n_out_; }
  std::size_t n_in() const noexcept { return n_in_; }
  double operator()(std::size_t out, std::size_t in) const { return p_[out * n_in_ + in]; }
  const std::vector<double>& data() const noexcept { return p_; }

  std::vector<double> column(std::size_t in) const;

 private:
  std::size_t n_out_;
  std::size_t n_in_;
  std::vector<double> p_;
};

/// Throws InvalidArgument unless p is a probability vector within kStochasticTol.
void validate_distribution(const std::vector<double>& p, const char* what);

/// A -> B -> Y with A -> X.
struct ChainModel {
  std::vector<double> pA;
  CondTable pB_given_A;
  CondTable pX_given_A;
  CondTable pY_given_B;

  ChainModel(std::vector<double> pA, CondTable pB_given_A, CondTable pX_given_A, CondTable pY_given_B);
};

/// A -> X, (A, X) -> B -> Y. B's parents are flattened as a * n_x + x.
struct DoModel {
  std::vector<double> pA;
  CondTable pX_given_A;
  CondTable pB_given_AX;
  CondTable pY_given_B;

  DoModel(std::vector<double> pA, CondTable pX_given_A, CondTable pB_given_AX, CondTable pY_given_B);

  std::size_t nA() const noexcept { return pA.size(); }
  std::size_t nX() const noexcept { return pX_given_A.n_out(); }
};

std::vector<double> x_marginal(const ChainModel& m);
/// P(Y) by summing the full joint over (a, b, x).
std::vector<double> y_marginal(const ChainModel& m);

/// P~(y|x) = sum_{a,b} P(y|b) P(b|a) P(a|x) with P(a|x) by Bayes.
/// Throws ZeroMarginal if some P(X = x) = 0.
CondTable emergent_channel(const ChainModel& m);

/// max_y |P(y) - sum_x P~(y|x) P(x)|.
double verify_total_probability(const ChainModel& m);

/// P(y | do(x)) = sum_a P(a) sum_b P(b|a,x) P(y|b). Throws IndexOutOfRange.
std::vector<double> do_intervention(const DoModel& m, std::size_t x);

struct ObsVsDo {
  std::vector<double> obs;  // P(y | X = x)
  std::vector<double> intervened;  // P(y | do(X = x))

  double l1_gap() const;
};

ObsVsDo observational_vs_do(const DoModel& m, std::size_t x);

/// Columns drawn uniformly from the simplex.
CondTable random_cond_table(std::size_t n_out, std::size_t n_in, Rng& rng);
std::vector<double> random_distribution(std::size_t n, Rng& rng);
ChainModel random_chain_model(std::size_t nA, std::size_t nB, std::size_t nX, std::size_t nY, Rng& rng);
DoModel random_do_model(std::size_t nA, std::size_t nX, std::size_t nB, std::size_t nY, Rng& rng);

}  // namespace coarsekit
