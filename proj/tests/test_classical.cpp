#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numeric>

#include "coarsekit/classical.hpp"

using namespace coarsekit;

namespace {

// Rows are child outcomes, columns parent values.
CondTable table(std::vector<std::vector<double>> rows) {
  std::vector<double> flat;
  for (const auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
  return CondTable(rows.size(), rows.front().size(), std::move(flat));
}

ChainModel binary_model() {
  return ChainModel({0.5, 0.5}, table({{0.9, 0.2}, {0.1, 0.8}}), table({{0.8, 0.3}, {0.2, 0.7}}),
                    CondTable::identity(2));
}

// P(y|x) from the full joint P(a) P(b|a) P(x|a) P(y|b), no Bayes step.
std::vector<std::vector<double>> enumerate_y_given_x(const ChainModel& m) {
  const std::size_t nA = m.pA.size(), nB = m.pB_given_A.n_out(), nX = m.pX_given_A.n_out(),
                    nY = m.pY_given_B.n_out();
  std::vector<std::vector<double>> joint(nY, std::vector<double>(nX, 0.0));
  std::vector<double> px(nX, 0.0);
  for (std::size_t a = 0; a < nA; ++a)
    for (std::size_t b = 0; b < nB; ++b)
      for (std::size_t x = 0; x < nX; ++x)
        for (std::size_t y = 0; y < nY; ++y) {
          const double p = m.pA[a] * m.pB_given_A(b, a) * m.pX_given_A(x, a) * m.pY_given_B(y, b);
          joint[y][x] += p;
          px[x] += p;
        }
  for (auto& row : joint)
    for (std::size_t x = 0; x < nX; ++x) row[x] /= px[x];
  return joint;
}

// B copies A, X is a noisy copy of A, B ignores X: a planted confounder.
DoModel confounded_model() {
  std::vector<double> b(2 * 4);
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t x = 0; x < 2; ++x) {
      b[0 * 4 + a * 2 + x] = a == 0 ? 0.9 : 0.1;
      b[1 * 4 + a * 2 + x] = a == 0 ? 0.1 : 0.9;
    }
  return DoModel({0.5, 0.5}, table({{0.95, 0.05}, {0.05, 0.95}}), CondTable(2, 4, b), CondTable::identity(2));
}

}  // namespace

TEST_CASE("CondTable validation") {
  CHECK_NOTHROW(table({{0.25, 1.0}, {0.75, 0.0}}));
  CHECK_THROWS_AS(table({{0.5, 1.0}, {0.6, 0.0}}), Error);
  CHECK_THROWS_AS(table({{1.5, 1.0}, {-0.5, 0.0}}), Error);
  CHECK_THROWS_AS(CondTable(2, 2, {1.0, 0.0, 0.0}), Error);
  const CondTable u = CondTable::uniform(3, 2);
  CHECK(u(2, 1) == doctest::Approx(1.0 / 3.0));
  CHECK(u.column(0).size() == 3);
  CHECK_THROWS_AS(u.column(2), Error);

  CHECK_THROWS_AS(ChainModel({0.5, 0.6}, CondTable::identity(2), CondTable::identity(2), CondTable::identity(2)),
                  Error);
  CHECK_THROWS_AS(ChainModel({0.5, 0.5}, CondTable::identity(3), CondTable::identity(2), CondTable::identity(2)),
                  Error);
  CHECK_THROWS_AS(DoModel({0.5, 0.5}, CondTable::identity(2), CondTable::identity(2), CondTable::identity(2)), Error);
}

TEST_CASE("emergent_channel: trivial models") {
  const ChainModel id({0.3, 0.7}, CondTable::identity(2), CondTable::identity(2), CondTable::identity(2));
  const CondTable e = emergent_channel(id);
  for (std::size_t y = 0; y < 2; ++y)
    for (std::size_t x = 0; x < 2; ++x) CHECK(e(y, x) == doctest::Approx(y == x ? 1.0 : 0.0).epsilon(1e-15));
  CHECK(verify_total_probability(id) <= 1e-15);

  Rng rng(3);
  const ChainModel absorbing({0.2, 0.5, 0.3}, random_cond_table(3, 3, rng), random_cond_table(2, 3, rng),
                             CondTable::uniform(4, 3));
  const CondTable u = emergent_channel(absorbing);
  for (std::size_t y = 0; y < 4; ++y)
    for (std::size_t x = 0; x < 2; ++x) CHECK(std::abs(u(y, x) - 0.25) <= 1e-15);
}

TEST_CASE("emergent_channel: binary model against hand values and enumeration") {
  const ChainModel m = binary_model();
  const CondTable e = emergent_channel(m);
  // P(x=0) = 0.55, P(y=0, x=0) = 0.5 (0.8 * 0.9 + 0.3 * 0.2) = 0.39.
  CHECK(std::abs(e(0, 0) - 0.39 / 0.55) <= 1e-12);
  CHECK(std::abs(e(0, 1) - 0.16 / 0.45) <= 1e-12);
  const auto oracle = enumerate_y_given_x(m);
  for (std::size_t y = 0; y < 2; ++y)
    for (std::size_t x = 0; x < 2; ++x) CHECK(std::abs(e(y, x) - oracle[y][x]) <= 1e-12);
  CHECK(verify_total_probability(m) <= 1e-12);
}

TEST_CASE("emergent_channel: zero marginal is an error") {
  const ChainModel m({1.0, 0.0}, CondTable::identity(2), CondTable::identity(2), CondTable::identity(2));
  try {
    emergent_channel(m);
    FAIL("expected ZeroMarginal");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ZeroMarginal);
  }
  CHECK_THROWS_AS(verify_total_probability(m), Error);
}

TEST_CASE("property: total probability and stochastic output on random chains") {
  Rng rng(7);
  for (int t = 0; t < 100; ++t) {
    const ChainModel m = random_chain_model(3, 3, 3, 3, rng);
    CHECK(verify_total_probability(m) <= 1e-12);
    const CondTable e = emergent_channel(m);
    const auto oracle = enumerate_y_given_x(m);
    for (std::size_t x = 0; x < e.n_in(); ++x) {
      double sum = 0.0;
      for (std::size_t y = 0; y < e.n_out(); ++y) {
        sum += e(y, x);
        CHECK(std::abs(e(y, x) - oracle[y][x]) <= 1e-12);
      }
      CHECK(std::abs(sum - 1.0) <= 1e-12);
    }
  }
  for (int t = 0; t < 50; ++t) {
    const ChainModel m = random_chain_model(1 + t % 4, 1 + (t / 4) % 4, 1 + t % 3, 2 + t % 3, rng);
    CHECK(verify_total_probability(m) <= 1e-12);
  }
}

TEST_CASE("do_intervention: closed forms") {
  Rng rng(11);
  SUBCASE("B ignores X: every intervention gives the observational P(Y)") {
    const CondTable pb = random_cond_table(3, 2, rng);
    std::vector<double> flat(3 * 4);
    for (std::size_t b = 0; b < 3; ++b)
      for (std::size_t a = 0; a < 2; ++a)
        for (std::size_t x = 0; x < 2; ++x) flat[b * 4 + a * 2 + x] = pb(b, a);
    const CondTable py = random_cond_table(2, 3, rng);
    const DoModel m({0.4, 0.6}, random_cond_table(2, 2, rng), CondTable(3, 4, flat), py);
    const ChainModel chain({0.4, 0.6}, pb, m.pX_given_A, py);
    const std::vector<double> observed = y_marginal(chain);
    for (std::size_t x = 0; x < 2; ++x) {
      const auto d = do_intervention(m, x);
      for (std::size_t y = 0; y < 2; ++y) CHECK(std::abs(d[y] - observed[y]) <= 1e-12);
    }
  }
  SUBCASE("deterministic XOR chain") {
    std::vector<double> flat(2 * 4, 0.0);
    for (std::size_t a = 0; a < 2; ++a)
      for (std::size_t x = 0; x < 2; ++x) flat[(a ^ x) * 4 + a * 2 + x] = 1.0;
    const DoModel m({1.0, 0.0}, CondTable::uniform(2, 2), CondTable(2, 4, flat), CondTable::identity(2));
    for (std::size_t x = 0; x < 2; ++x) {
      const auto d = do_intervention(m, x);
      const ObsVsDo both = observational_vs_do(m, x);
      for (std::size_t y = 0; y < 2; ++y) {
        CHECK(d[y] == (y == x ? 1.0 : 0.0));
        CHECK(both.obs[y] == doctest::Approx(y == x ? 1.0 : 0.0));
      }
    }
  }
  SUBCASE("B copies X: do(x) is the P(Y|B=x) column") {
    std::vector<double> flat(2 * 4, 0.0);
    for (std::size_t a = 0; a < 2; ++a)
      for (std::size_t x = 0; x < 2; ++x) flat[x * 4 + a * 2 + x] = 1.0;
    const CondTable py = random_cond_table(3, 2, rng);
    const DoModel m({0.5, 0.5}, random_cond_table(2, 2, rng), CondTable(2, 4, flat), py);
    for (std::size_t x = 0; x < 2; ++x) {
      const auto d = do_intervention(m, x);
      for (std::size_t y = 0; y < 3; ++y) CHECK(std::abs(d[y] - py(y, x)) <= 1e-15);
    }
  }
  const DoModel m = confounded_model();
  try {
    do_intervention(m, 2);
    FAIL("expected IndexOutOfRange");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::IndexOutOfRange);
  }
}

TEST_CASE("observational_vs_do: confounding") {
  const DoModel m = confounded_model();
  const ObsVsDo r = observational_vs_do(m, 0);
  // P(a|x=0) = (0.95, 0.05): obs P(y=0) = 0.95 * 0.9 + 0.05 * 0.1; do ignores X's cause.
  CHECK(std::abs(r.obs[0] - 0.86) <= 1e-12);
  CHECK(std::abs(r.intervened[0] - 0.5) <= 1e-12);
  CHECK(r.l1_gap() > 0.1);

  Rng rng(13);
  const CondTable pb = random_cond_table(2, 4, rng);
  const CondTable py = random_cond_table(3, 2, rng);
  // X independent of A: the backdoor is empty.
  const DoModel free({0.3, 0.7}, table({{0.4, 0.4}, {0.6, 0.6}}), pb, py);
  for (std::size_t x = 0; x < 2; ++x) CHECK(observational_vs_do(free, x).l1_gap() <= 1e-12);

  const DoModel zero({0.5, 0.5}, table({{1.0, 1.0}, {0.0, 0.0}}), pb, py);
  try {
    observational_vs_do(zero, 1);
    FAIL("expected ZeroMarginal");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ZeroMarginal);
  }
}

TEST_CASE("property: do(x) does not depend on P(X|A)") {
  Rng rng(17);
  for (int t = 0; t < 100; ++t) {
    const std::size_t nA = 1 + t % 4, nX = 1 + (t / 4) % 4;
    const DoModel m = random_do_model(nA, nX, 2 + t % 3, 2 + (t / 3) % 3, rng);
    const DoModel other(m.pA, random_cond_table(nX, nA, rng), m.pB_given_AX, m.pY_given_B);
    for (std::size_t x = 0; x < nX; ++x) {
      const auto a = do_intervention(m, x);
      const auto b = do_intervention(other, x);
      double sum = 0.0;
      for (std::size_t y = 0; y < a.size(); ++y) {
        CHECK(std::abs(a[y] - b[y]) <= 1e-12);
        CHECK(a[y] >= 0.0);
        sum += a[y];
      }
      CHECK(std::abs(sum - 1.0) <= 1e-12);
      const ObsVsDo both = observational_vs_do(m, x);
      CHECK(std::abs(std::accumulate(both.obs.begin(), both.obs.end(), 0.0) - 1.0) <= 1e-12);
    }
  }
}
