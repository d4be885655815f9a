#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "coarsekit/channel.hpp"
#include "test_util.hpp"

using namespace coarsekit;
using coarsekit::testing::kPauliX;

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

// Qutrit -> qubit pair K0 = |0><0| + |1><+|, K1 = |1><-| with |+-> on span{|1>,|2>}.
KrausChannel example1_cg() {
  const double r = kInvSqrt2;
  CMatrix k0{{1, 0, 0}, {0, r, r}};
  CMatrix k1{{0, 0, 0}, {0, r, -r}};
  return KrausChannel(3, 2, {k0, k1});
}

// 4 -> 2, K0 = |0><+|_01 + |1><+|_23, K1 = |0><-|_01 + |1><-|_23.
KrausChannel example2_cg() {
  const double r = kInvSqrt2;
  CMatrix k0{{r, r, 0, 0}, {0, 0, r, r}};
  CMatrix k1{{r, -r, 0, 0}, {0, 0, r, -r}};
  return KrausChannel(4, 2, {k0, k1});
}

std::vector<CMatrix> remix(const std::vector<CMatrix>& kraus, const CMatrix& w) {
  std::vector<CMatrix> out;
  for (std::size_t i = 0; i < w.rows(); ++i) {
    CMatrix acc(kraus.front().rows(), kraus.front().cols());
    for (std::size_t j = 0; j < w.cols(); ++j) acc += w(i, j) * kraus[j];
    out.push_back(acc);
  }
  return out;
}

}  // namespace

TEST_CASE("apply: identity channel and the qutrit coarse-graining") {
  Rng rng(1);
  const DensityMatrix rho(random_mixed_state(3, 3, rng));
  CHECK(frobenius_distance(apply(identity_channel(3), rho).mat(), rho.mat()) <= 1e-15);

  const KrausChannel cg = example1_cg();
  const DensityMatrix zero(outer(ket(3, 0), ket(3, 0)));
  CHECK(frobenius_distance(apply(cg, zero).mat(), outer(ket(2, 0), ket(2, 0))) <= 1e-15);
  const DensityMatrix two(outer(ket(3, 2), ket(3, 2)));
  CHECK(frobenius_distance(apply(cg, two).mat(), outer(ket(2, 1), ket(2, 1))) <= 1e-15);

  CHECK_THROWS_AS(apply(cg, DensityMatrix(CMatrix::identity(2) * 0.5)), Error);
}

TEST_CASE("DensityMatrix validation") {
  CHECK_THROWS_AS(DensityMatrix(CMatrix::identity(2)), Error);
  CHECK_THROWS_AS(DensityMatrix(CMatrix{{1.5, 0}, {0, -0.5}}), Error);
  CHECK_THROWS_AS(DensityMatrix(CMatrix{{0.5, 0.5}, {0, 0.5}}), Error);
}

TEST_CASE("unitary_channel") {
  const KrausChannel id = unitary_channel(CMatrix::identity(2));
  CHECK(channels_equal(id, identity_channel(2)));

  const KrausChannel x = unitary_channel(kPauliX);
  CHECK(frobenius_distance(x(outer(ket(2, 0), ket(2, 0))), outer(ket(2, 1), ket(2, 1))) <= 1e-15);

  // exp(-i pi/2 Jz) for spin 1, Jz = diag(1, 0, -1)
  const std::vector<double> jz{1, 0, -1};
  const CMatrix u = hermitian_function(CMatrix::diagonal(std::span<const double>(jz)), [](double l) {
    return std::exp(cplx(0, -std::numbers::pi / 2 * l));
  });
  const CMatrix expect{{cplx(0, -1), 0, 0}, {0, 1, 0}, {0, 0, cplx(0, 1)}};
  CHECK(frobenius_distance(u, expect) <= 1e-14);
  CHECK_NOTHROW(unitary_channel(u));

  try {
    unitary_channel(CMatrix{{1, 1}, {0, 1}});
    FAIL("expected NotUnitary");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotUnitary);
  }
}

TEST_CASE("kraus_to_choi examples") {
  const ChoiMatrix id = kraus_to_choi(identity_channel(2));
  CMatrix expect(4, 4);
  for (std::size_t i : {0u, 3u})
    for (std::size_t j : {0u, 3u}) expect(i, j) = 1.0;
  CHECK(id.mat == expect);

  std::vector<CMatrix> depol;
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) depol.push_back(kInvSqrt2 * outer(ket(2, i), ket(2, j)));
  const KrausChannel dep(2, 2, depol);
  CHECK(frobenius_distance(kraus_to_choi(dep).mat, 0.5 * CMatrix::identity(4)) <= 1e-15);

  const ChoiMatrix c1 = kraus_to_choi(example1_cg());
  CHECK(c1.mat.rows() == 6);
  CHECK(std::abs(c1.mat.trace() - 3.0) <= 1e-14);
  CHECK(numerical_rank(svd(c1.mat).s) == 2);
  CHECK_NOTHROW(c1.validate());
}

TEST_CASE("choi_to_kraus examples") {
  const KrausChannel id = choi_to_kraus(kraus_to_choi(identity_channel(3)));
  REQUIRE(id.kraus().size() == 1);
  CHECK(frobenius_distance(id.kraus()[0], CMatrix::identity(3)) <= 1e-12);

  const KrausChannel dep = choi_to_kraus(ChoiMatrix{2, 2, 0.5 * CMatrix::identity(4)});
  CHECK(dep.kraus().size() == 4);
  std::vector<CMatrix> expect;
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) expect.push_back(kInvSqrt2 * outer(ket(2, i), ket(2, j)));
  CHECK(channels_equal(dep, KrausChannel(2, 2, expect), 1e-12));

  CMatrix bad = 0.5 * CMatrix::identity(4);
  bad(0, 0) = -0.1;
  try {
    choi_to_kraus(ChoiMatrix{2, 2, bad});
    FAIL("expected NotCP");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotCP);
  }
}

TEST_CASE("choi_to_kraus fixes the global phase of each operator") {
  Rng rng(3);
  const KrausChannel ch = random_channel(2, 3, 3, rng);
  const KrausChannel back = choi_to_kraus(kraus_to_choi(ch));
  for (const CMatrix& k : back.kraus()) {
    double best = 0.0;
    cplx at = 0.0;
    for (const cplx& z : k.data())
      if (std::abs(z) > best) best = std::abs(z), at = z;
    CHECK(std::abs(at.imag()) <= 1e-14);
    CHECK(at.real() > 0.0);
  }
}

TEST_CASE("round trips Kraus -> Choi -> Kraus -> Choi") {
  Rng rng(5);
  for (std::size_t din : {2u, 3u, 4u})
    for (std::size_t dout : {2u, 3u, 4u})
      for (int trial = 0; trial < 3; ++trial) {
        const KrausChannel ch = random_channel(din, dout, 1 + trial * 2, rng);
        const ChoiMatrix c = kraus_to_choi(ch);
        CHECK_NOTHROW(c.validate());
        const KrausChannel back = choi_to_kraus(c);
        CHECK(frobenius_distance(kraus_to_choi(back).mat, c.mat) <= 1e-8);
        CHECK(frobenius_distance(transfer_to_choi(choi_to_transfer(c)).mat, c.mat) == 0.0);
        CHECK(frobenius_distance(choi_to_transfer(c).mat, transfer(ch).mat) <= 1e-12);
      }
}

TEST_CASE("transfer examples") {
  CHECK(frobenius_distance(transfer(identity_channel(2)).mat, CMatrix::identity(4)) == 0.0);
  Rng rng(7);
  const CMatrix u = haar_unitary(3, rng);
  CHECK(frobenius_distance(transfer(unitary_channel(u)).mat, kron(u.conj(), u)) <= 1e-15);

  const KrausChannel cg = example2_cg();
  const TransferMatrix t = transfer(cg);
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const CMatrix rho = random_mixed_state(4, 4, rng);
    worst = std::max(worst, frobenius_distance(t(rho), cg(rho)));
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("apply, transfer and Choi contraction agree") {
  Rng rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const KrausChannel ch = random_channel(3, 2, 2, rng);
    const CMatrix x = gaussian_matrix(3, 3, rng);
    const CMatrix direct = ch(x);
    CHECK(frobenius_distance(transfer(ch)(x), direct) <= 1e-9);
    CHECK(frobenius_distance(apply_choi(kraus_to_choi(ch), x), direct) <= 1e-9);
  }
}

TEST_CASE("compose") {
  const KrausChannel cg = example1_cg();
  CHECK(choi_distance(compose(identity_channel(2), cg), cg) < 1e-12);

  Rng rng(11);
  const CMatrix u = haar_unitary(3, rng);
  const KrausChannel lu = compose(cg, unitary_channel(u));
  REQUIRE(lu.kraus().size() == 2);
  for (std::size_t k = 0; k < 2; ++k) CHECK(frobenius_distance(lu.kraus()[k], cg.kraus()[k] * u) <= 1e-15);

  for (int trial = 0; trial < 10; ++trial) {
    const KrausChannel a = random_channel(3, 2, 2, rng), b = random_channel(4, 3, 3, rng);
    CHECK(frobenius_distance(transfer(compose(a, b)).mat, transfer(a).mat * transfer(b).mat) <= 1e-10);
  }
  CHECK_THROWS_AS(compose(cg, cg), Error);
}

TEST_CASE("dual: unitality and adjoint pairing") {
  Rng rng(13);
  const CMatrix u = haar_unitary(2, rng);
  CHECK(channels_equal(dual(unitary_channel(u)), unitary_channel(u.adjoint()), 1e-14));

  CHECK(frobenius_distance(dual(example1_cg())(CMatrix::identity(2)), CMatrix::identity(3)) <= 1e-12);

  const KrausChannel cg = example2_cg();
  const KrausMap cg_dual = dual(cg);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const CMatrix a = gaussian_matrix(2, 2, rng);
    const CMatrix rho = random_mixed_state(4, 4, rng);
    worst = std::max(worst, std::abs((a * cg(rho)).trace() - (cg_dual(a) * rho).trace()));
  }
  CHECK(worst < 1e-10);

  for (int trial = 0; trial < 10; ++trial) {
    const KrausChannel ch = random_channel(4, 3, 2, rng);
    CHECK(frobenius_distance(dual(ch)(CMatrix::identity(3)), CMatrix::identity(4)) <= 1e-9);
  }
}

TEST_CASE("channels_equal") {
  Rng rng(17);
  const KrausChannel ch = random_channel(3, 2, 3, rng);
  CHECK(channels_equal(ch, ch));
  const CMatrix w = haar_unitary(3, rng);
  CHECK(channels_equal(ch, KrausChannel(3, 2, remix(ch.kraus(), w))));
  CHECK_FALSE(channels_equal(identity_channel(2), unitary_channel(kPauliX)));

  // reflexive and symmetric on a small family
  std::vector<KrausChannel> family;
  for (int i = 0; i < 4; ++i) family.push_back(random_channel(2, 2, 2, rng));
  family.push_back(KrausChannel(2, 2, remix(family[0].kraus(), haar_unitary(2, rng))));
  for (const auto& a : family) {
    CHECK(channels_equal(a, a));
    for (const auto& b : family) CHECK(channels_equal(a, b) == channels_equal(b, a));
  }
  CHECK(channels_equal(family[0], family.back()));
  CHECK_THROWS_AS(channels_equal(identity_channel(2), identity_channel(3)), Error);
}

TEST_CASE("connecting_unitary: identical lists") {
  const KrausChannel cg = example1_cg();
  const CMatrix w = connecting_unitary(cg, cg);
  CHECK(is_unitary(w));
  CHECK(mixing_residual(cg.kraus(), cg.kraus(), w) <= 1e-12);
}

TEST_CASE("connecting_unitary: plant and recover") {
  Rng rng(19);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t count = 1 + trial % 4;
    const KrausChannel a = random_channel(3, 3, count, rng);
    const std::size_t n = count + trial % 3;  // pad beyond the Kraus rank sometimes
    const CMatrix w0 = haar_unitary(n, rng);
    const KrausChannel b(3, 3, remix(pad_kraus(a.kraus(), n), w0.adjoint()));  // a = w0 b
    const CMatrix w = connecting_unitary(a, b);
    CHECK(is_unitary(w, 1e-10));
    CHECK(mixing_residual(a.kraus(), b.kraus(), w) <= 1e-8);
  }
}

TEST_CASE("connecting_unitary: the qutrit coarse-graining under a rotation of its Kraus pair") {
  const KrausChannel cg = example1_cg();
  const double th = 0.7;
  const CMatrix rot{{std::cos(th), -std::sin(th)}, {std::sin(th), std::cos(th)}};
  const KrausChannel mixed(3, 2, remix(cg.kraus(), rot));
  const CMatrix w = connecting_unitary(mixed, cg);
  CHECK(mixing_residual(mixed.kraus(), cg.kraus(), w) < 1e-8);
  CHECK(frobenius_distance(w, rot) < 1e-8);  // Kraus pair is linearly independent, so W is unique
}

TEST_CASE("connecting_unitary: rejects different channels") {
  try {
    connecting_unitary(identity_channel(2), unitary_channel(kPauliX));
    FAIL("expected NotEquivalent");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotEquivalent);
  }
}

TEST_CASE("random channels are CPTP") {
  Rng rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const KrausChannel ch = random_channel(2 + trial % 4, 2 + trial % 2, 1 + trial % 3, rng);
    CHECK(frobenius_distance(ch.kraus_gram(), CMatrix::identity(ch.din())) <= 1e-9);
    CHECK(hermitian_eig(kraus_to_choi(ch).mat).values.front() >= -1e-8);
  }
}

TEST_CASE("KrausChannel rejects non trace preserving lists") {
  try {
    KrausChannel(2, 2, {0.5 * CMatrix::identity(2)});
    FAIL("expected NotTracePreserving");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotTracePreserving);
  }
  CHECK_THROWS_AS(KrausChannel(2, 2, {CMatrix::identity(3)}), Error);
}
