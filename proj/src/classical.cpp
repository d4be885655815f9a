#include "coarsekit/classical.hpp"

#include <cmath>
#include <numeric>
#include <random>
#include <string>

namespace coarsekit {

CondTable::CondTable(std::size_t n_out, std::size_t n_in, std::vector<double> p)
    : n_out_(n_out), n_in_(n_in), p_(std::move(p)) {
  if (n_out_ == 0 || n_in_ == 0) throw Error(ErrorKind::InvalidArgument, "conditional table has an empty alphabet");
  if (p_.size() != n_out_ * n_in_)
    throw Error(ErrorKind::DimensionMismatch, "conditional table needs " + std::to_string(n_out_ * n_in_) +
                                                  " entries, got " + std::to_string(p_.size()));
  for (double v : p_)
    if (!(v >= 0.0 && v <= 1.0)) throw Error(ErrorKind::InvalidArgument, "probability outside [0, 1]");
  for (std::size_t j = 0; j < n_in_; ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n_out_; ++i) sum += p_[i * n_in_ + j];
    if (std::abs(sum - 1.0) > kStochasticTol)
      throw Error(ErrorKind::InvalidArgument, "column " + std::to_string(j) + " sums to " + std::to_string(sum));
  }
}

CondTable CondTable::identity(std::size_t n) {
  std::vector<double> p(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) p[i * n + i] = 1.0;
  return CondTable(n, n, std::move(p));
}

CondTable CondTable::uniform(std::size_t n_out, std::size_t n_in) {
  return CondTable(n_out, n_in, std::vector<double>(n_out * n_in, 1.0 / static_cast<double>(n_out)));
}

std::vector<double> CondTable::column(std::size_t in) const {
  if (in >= n_in_) throw Error(ErrorKind::IndexOutOfRange, "column " + std::to_string(in));
  std::vector<double> c(n_out_);
  for (std::size_t i = 0; i < n_out_; ++i) c[i] = (*this)(i, in);
  return c;
}

void validate_distribution(const std::vector<double>& p, const char* what) {
  if (p.empty()) throw Error(ErrorKind::InvalidArgument, std::string(what) + " is empty");
  for (double v : p)
    if (!(v >= 0.0 && v <= 1.0)) throw Error(ErrorKind::InvalidArgument, std::string(what) + " has entry outside [0, 1]");
  const double sum = std::accumulate(p.begin(), p.end(), 0.0);
  if (std::abs(sum - 1.0) > kStochasticTol)
    throw Error(ErrorKind::InvalidArgument, std::string(what) + " sums to " + std::to_string(sum));
}

namespace {

void require_parent(const CondTable& t, std::size_t n, const char* what) {
  if (t.n_in() != n)
    throw Error(ErrorKind::DimensionMismatch, std::string(what) + " has " + std::to_string(t.n_in()) +
                                                  " parent values, expected " + std::to_string(n));
}

}  // namespace

ChainModel::ChainModel(std::vector<double> a, CondTable b, CondTable x, CondTable y)
    : pA(std::move(a)), pB_given_A(std::move(b)), pX_given_A(std::move(x)), pY_given_B(std::move(y)) {
  validate_distribution(pA, "pA");
  require_parent(pB_given_A, pA.size(), "pB_given_A");
  require_parent(pX_given_A, pA.size(), "pX_given_A");
  require_parent(pY_given_B, pB_given_A.n_out(), "pY_given_B");
}

DoModel::DoModel(std::vector<double> a, CondTable x, CondTable b, CondTable y)
    : pA(std::move(a)), pX_given_A(std::move(x)), pB_given_AX(std::move(b)), pY_given_B(std::move(y)) {
  validate_distribution(pA, "pA");
  require_parent(pX_given_A, pA.size(), "pX_given_A");
  require_parent(pB_given_AX, pA.size() * pX_given_A.n_out(), "pB_given_AX");
  require_parent(pY_given_B, pB_given_AX.n_out(), "pY_given_B");
}

std::vector<double> x_marginal(const ChainModel& m) {
  std::vector<double> px(m.pX_given_A.n_out(), 0.0);
  for (std::size_t a = 0; a < m.pA.size(); ++a)
    for (std::size_t x = 0; x < px.size(); ++x) px[x] += m.pX_given_A(x, a) * m.pA[a];
  return px;
}

std::vector<double> y_marginal(const ChainModel& m) {
  const std::size_t nB = m.pB_given_A.n_out(), nX = m.pX_given_A.n_out(), nY = m.pY_given_B.n_out();
  std::vector<double> py(nY, 0.0);
  for (std::size_t a = 0; a < m.pA.size(); ++a)
    for (std::size_t b = 0; b < nB; ++b)
      for (std::size_t x = 0; x < nX; ++x)
        for (std::size_t y = 0; y < nY; ++y)
          py[y] += m.pY_given_B(y, b) * m.pB_given_A(b, a) * m.pX_given_A(x, a) * m.pA[a];
  return py;
}

CondTable emergent_channel(const ChainModel& m) {
  const std::size_t nA = m.pA.size(), nB = m.pB_given_A.n_out(), nX = m.pX_given_A.n_out(),
                    nY = m.pY_given_B.n_out();
  const std::vector<double> px = x_marginal(m);
  std::vector<double> p(nY * nX, 0.0);
  for (std::size_t x = 0; x < nX; ++x) {
    if (px[x] <= 0.0) throw Error(ErrorKind::ZeroMarginal, "P(X=" + std::to_string(x) + ") = 0");
    for (std::size_t a = 0; a < nA; ++a) {
      const double a_given_x = m.pX_given_A(x, a) * m.pA[a] / px[x];
      for (std::size_t b = 0; b < nB; ++b) {
        const double w = m.pB_given_A(b, a) * a_given_x;
        for (std::size_t y = 0; y < nY; ++y) p[y * nX + x] += m.pY_given_B(y, b) * w;
      }
    }
  }
  // Renormalize away rounding so the table passes its own validation.
  for (std::size_t x = 0; x < nX; ++x) {
    double sum = 0.0;
    for (std::size_t y = 0; y < nY; ++y) sum += p[y * nX + x];
    for (std::size_t y = 0; y < nY; ++y) p[y * nX + x] = std::min(1.0, p[y * nX + x] / sum);
  }
  return CondTable(nY, nX, std::move(p));
}

double verify_total_probability(const ChainModel& m) {
  const CondTable emergent = emergent_channel(m);
  const std::vector<double> px = x_marginal(m);
  const std::vector<double> py = y_marginal(m);
  double worst = 0.0;
  for (std::size_t y = 0; y < py.size(); ++y) {
    double acc = 0.0;
    for (std::size_t x = 0; x < px.size(); ++x) acc += emergent(y, x) * px[x];
    worst = std::max(worst, std::abs(py[y] - acc));
  }
  return worst;
}

std::vector<double> do_intervention(const DoModel& m, std::size_t x) {
  if (x >= m.nX()) throw Error(ErrorKind::IndexOutOfRange, "X outcome " + std::to_string(x) + " out of range");
  const std::size_t nB = m.pB_given_AX.n_out(), nY = m.pY_given_B.n_out();
  std::vector<double> out(nY, 0.0);
  for (std::size_t a = 0; a < m.nA(); ++a)
    for (std::size_t b = 0; b < nB; ++b) {
      const double w = m.pA[a] * m.pB_given_AX(b, a * m.nX() + x);
      for (std::size_t y = 0; y < nY; ++y) out[y] += w * m.pY_given_B(y, b);
    }
  return out;
}

double ObsVsDo::l1_gap() const {
  double acc = 0.0;
  for (std::size_t y = 0; y < obs.size(); ++y) acc += std::abs(obs[y] - intervened[y]);
  return acc;
}

ObsVsDo observational_vs_do(const DoModel& m, std::size_t x) {
  if (x >= m.nX()) throw Error(ErrorKind::IndexOutOfRange, "X outcome " + std::to_string(x) + " out of range");
  const std::size_t nB = m.pB_given_AX.n_out(), nY = m.pY_given_B.n_out();
  std::vector<double> joint(nY, 0.0);  // P(y, X = x)
  double px = 0.0;
  for (std::size_t a = 0; a < m.nA(); ++a) {
    const double ax = m.pA[a] * m.pX_given_A(x, a);
    px += ax;
    for (std::size_t b = 0; b < nB; ++b) {
      const double w = ax * m.pB_given_AX(b, a * m.nX() + x);
      for (std::size_t y = 0; y < nY; ++y) joint[y] += w * m.pY_given_B(y, b);
    }
  }
  if (px <= 0.0) throw Error(ErrorKind::ZeroMarginal, "P(X=" + std::to_string(x) + ") = 0");
  for (double& v : joint) v /= px;
  return ObsVsDo{std::move(joint), do_intervention(m, x)};
}

std::vector<double> random_distribution(std::size_t n, Rng& rng) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> p(n);
  for (double& v : p) v = e(rng);
  const double sum = std::accumulate(p.begin(), p.end(), 0.0);
  for (double& v : p) v /= sum;
  return p;
}

CondTable random_cond_table(std::size_t n_out, std::size_t n_in, Rng& rng) {
  std::vector<double> p(n_out * n_in);
  for (std::size_t j = 0; j < n_in; ++j) {
    const std::vector<double> c = random_distribution(n_out, rng);
    for (std::size_t i = 0; i < n_out; ++i) p[i * n_in + j] = c[i];
  }
  return CondTable(n_out, n_in, std::move(p));
}

ChainModel random_chain_model(std::size_t nA, std::size_t nB, std::size_t nX, std::size_t nY, Rng& rng) {
  std::vector<double> pA = random_distribution(nA, rng);
  CondTable b = random_cond_table(nB, nA, rng);
  CondTable x = random_cond_table(nX, nA, rng);
  CondTable y = random_cond_table(nY, nB, rng);
  return ChainModel(std::move(pA), std::move(b), std::move(x), std::move(y));
}

DoModel random_do_model(std::size_t nA, std::size_t nX, std::size_t nB, std::size_t nY, Rng& rng) {
  std::vector<double> pA = random_distribution(nA, rng);
  CondTable x = random_cond_table(nX, nA, rng);
  CondTable b = random_cond_table(nB, nA * nX, rng);
  CondTable y = random_cond_table(nY, nB, rng);
  return DoModel(std::move(pA), std::move(x), std::move(b), std::move(y));
}

}  // namespace coarsekit
