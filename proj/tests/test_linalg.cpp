#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "coarsekit/linalg.hpp"
#include "test_util.hpp"

using namespace coarsekit;
using coarsekit::testing::kPauliX;
using coarsekit::testing::random_rank_matrix;

namespace {

double reconstruction_residual(const CMatrix& a, const EigenDecomposition& eig) {
  return frobenius_distance(eig.vectors * CMatrix::diagonal(std::span<const double>(eig.values)) * eig.vectors.adjoint(),
                            a);
}

CMatrix svd_product(const Svd& d, std::size_t m, std::size_t n) {
  CMatrix s(m, n);
  for (std::size_t i = 0; i < d.s.size(); ++i) s(i, i) = d.s[i];
  return d.u * s * d.v.adjoint();
}

}  // namespace

TEST_CASE("hermitian_eig: diagonal input") {
  const std::vector<double> diag{3, 1, 2};
  const EigenDecomposition eig = hermitian_eig(CMatrix::diagonal(std::span<const double>(diag)));
  CHECK(eig.values == std::vector<double>{1, 2, 3});
  // eigenvector for 1 is e_1, for 2 is e_2, for 3 is e_0
  CHECK(std::abs(eig.vectors(1, 0)) == doctest::Approx(1.0));
  CHECK(std::abs(eig.vectors(2, 1)) == doctest::Approx(1.0));
  CHECK(std::abs(eig.vectors(0, 2)) == doctest::Approx(1.0));
}

TEST_CASE("hermitian_eig: Pauli X") {
  const EigenDecomposition eig = hermitian_eig(kPauliX);
  CHECK(eig.values[0] == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(eig.values[1] == doctest::Approx(1.0).epsilon(1e-14));
  const double r = 1.0 / std::sqrt(2.0);
  const CMatrix minus{{r}, {-r}}, plus{{r}, {r}};
  CHECK(std::abs(inner(minus, eig.vectors.column(0))) == doctest::Approx(1.0));
  CHECK(std::abs(inner(plus, eig.vectors.column(1))) == doctest::Approx(1.0));
}

TEST_CASE("hermitian_eig: reconstruction and orthonormality on random Hermitian matrices") {
  Rng rng(11);
  for (std::size_t n = 2; n <= 16; ++n) {
    const CMatrix a = random_hermitian(n, rng);
    const EigenDecomposition eig = hermitian_eig(a);
    CHECK(reconstruction_residual(a, eig) <= 1e-9 * std::max(1.0, frobenius_norm(a)));
    CHECK(frobenius_distance(eig.vectors.adjoint() * eig.vectors, CMatrix::identity(n)) <= 1e-10);
    CHECK(std::is_sorted(eig.values.begin(), eig.values.end()));
    for (std::size_t i = 0; i < n; ++i) {
      const CMatrix v = eig.vectors.column(i);
      CHECK(frobenius_norm(a * v - eig.values[i] * v) <= 1e-10 * frobenius_norm(a));
    }
  }
}

TEST_CASE("hermitian_eig: rejects non-Hermitian input") {
  const CMatrix a{{1, 2}, {0, 1}};
  CHECK_THROWS_AS(hermitian_eig(a), Error);
  try {
    hermitian_eig(a);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotHermitian);
  }
}

TEST_CASE("hermitian_eig: degenerate spectrum") {
  Rng rng(3);
  const CMatrix u = haar_unitary(6, rng);
  const std::vector<double> diag{1, 1, 1, -2, -2, 5};
  const CMatrix a = u * CMatrix::diagonal(std::span<const double>(diag)) * u.adjoint();
  const EigenDecomposition eig = hermitian_eig(a);
  CHECK(reconstruction_residual(a, eig) <= 1e-12);
  CHECK(eig.values[0] == doctest::Approx(-2.0));
  CHECK(eig.values[5] == doctest::Approx(5.0));
}

TEST_CASE("svd: identity and rank one") {
  const Svd id = svd(CMatrix::identity(3));
  for (double s : id.s) CHECK(s == doctest::Approx(1.0));

  Rng rng(5);
  const CMatrix x = random_pure_vector(4, rng), y = random_pure_vector(3, rng);
  const Svd r1 = svd(outer(x, y));
  CHECK(r1.s[0] == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(r1.s[1] <= 1e-14);
  CHECK(r1.s[2] <= 1e-14);
}

TEST_CASE("svd: Frobenius norm equals l2 norm of singular values") {
  Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const CMatrix a = gaussian_matrix(4, 6, rng);
    const Svd d = svd(a);
    double acc = 0.0;
    for (double s : d.s) acc += s * s;
    CHECK(std::abs(acc - std::pow(frobenius_norm(a), 2)) <= 1e-10);
  }
}

TEST_CASE("svd: reconstruction and unitary factors, wide, tall and rank deficient") {
  Rng rng(19);
  const std::size_t shapes[][3] = {{4, 6, 4}, {6, 4, 4}, {5, 5, 2}, {9, 36, 4}, {36, 9, 3}, {7, 3, 0}};
  for (const auto& sh : shapes) {
    const CMatrix a = random_rank_matrix(sh[0], sh[1], sh[2], rng);
    const Svd d = svd(a);
    CHECK(d.s.size() == std::min(sh[0], sh[1]));
    CHECK(frobenius_distance(svd_product(d, sh[0], sh[1]), a) <= 1e-9 * std::max(1.0, frobenius_norm(a)));
    CHECK(frobenius_distance(d.u.adjoint() * d.u, CMatrix::identity(sh[0])) <= 1e-10);
    CHECK(frobenius_distance(d.v.adjoint() * d.v, CMatrix::identity(sh[1])) <= 1e-10);
    CHECK(std::is_sorted(d.s.rbegin(), d.s.rend()));
    CHECK(numerical_rank(d.s) == sh[2]);
  }
}

TEST_CASE("pinv: invertible, zero and rank-deficient inputs") {
  const CMatrix a{{2, cplx(1, 1)}, {cplx(0, -1), 3}};
  const cplx det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
  const CMatrix inv = (1.0 / det) * CMatrix{{a(1, 1), -a(0, 1)}, {-a(1, 0), a(0, 0)}};
  CHECK(frobenius_distance(pinv(a), inv) <= 1e-10);

  CHECK(frobenius_norm(pinv(CMatrix(3, 2))) == 0.0);

  const CMatrix r1{{1, 2}, {2, 4}, {3, 6}};
  const CMatrix p = pinv(r1);
  CHECK(frobenius_distance(r1 * p * r1, r1) <= 1e-8);
  CHECK(frobenius_distance(p * r1 * p, p) <= 1e-8);
}

TEST_CASE("pinv: all four Penrose identities on random ranks") {
  Rng rng(23);
  const std::size_t m = 5, n = 4;
  for (std::size_t rank = 0; rank <= std::min(m, n); ++rank) {
    for (int trial = 0; trial < 5; ++trial) {
      const CMatrix a = random_rank_matrix(m, n, rank, rng);
      const CMatrix p = pinv(a);
      CHECK(frobenius_distance(a * p * a, a) <= 1e-8);
      CHECK(frobenius_distance(p * a * p, p) <= 1e-8);
      const CMatrix ap = a * p, pa = p * a;
      CHECK(frobenius_distance(ap, ap.adjoint()) <= 1e-8);
      CHECK(frobenius_distance(pa, pa.adjoint()) <= 1e-8);
    }
  }
}

TEST_CASE("kernel_basis spans the null space") {
  Rng rng(29);
  const CMatrix a = random_rank_matrix(4, 9, 4, rng);
  const CMatrix k = kernel_basis(a);
  CHECK(k.cols() == 5);
  CHECK(frobenius_norm(a * k) <= 1e-12 * frobenius_norm(a) * 10);
  CHECK(frobenius_distance(k.adjoint() * k, CMatrix::identity(5)) <= 1e-12);
}

TEST_CASE("kron: examples and mixed-product property") {
  CHECK(kron(CMatrix::identity(2), CMatrix::identity(2)) == CMatrix::identity(4));
  const std::vector<double> d12{1, 2}, d34{3, 4}, expect{3, 4, 6, 8};
  CHECK(kron(CMatrix::diagonal(std::span<const double>(d12)), CMatrix::diagonal(std::span<const double>(d34))) ==
        CMatrix::diagonal(std::span<const double>(expect)));

  Rng rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    const CMatrix a = gaussian_matrix(2, 2, rng), b = gaussian_matrix(2, 2, rng);
    const CMatrix c = gaussian_matrix(2, 2, rng), d = gaussian_matrix(2, 2, rng);
    CHECK(frobenius_distance(kron(a, b) * kron(c, d), kron(a * c, b * d)) <= 1e-12);
  }
}

TEST_CASE("partial_trace") {
  Rng rng(37);
  const CMatrix rho = random_mixed_state(3, 3, rng);
  CMatrix sigma = random_mixed_state(2, 2, rng);
  sigma *= 0.5;  // tr(sigma) = 1/2
  CHECK(frobenius_distance(partial_trace(kron(rho, sigma), 3, 2, Subsystem::A), 0.5 * rho) <= 1e-14);
  CHECK(frobenius_distance(partial_trace(kron(rho, sigma), 3, 2, Subsystem::B), sigma) <= 1e-14);

  const double r = 1.0 / std::sqrt(2.0);
  const CMatrix bell{{r}, {0}, {0}, {r}};
  CHECK(frobenius_distance(partial_trace(outer(bell, bell), 2, 2, Subsystem::A), 0.5 * CMatrix::identity(2)) <=
        1e-15);

  for (int trial = 0; trial < 10; ++trial) {
    const CMatrix s = random_mixed_state(8, 8, rng);
    CHECK(std::abs(partial_trace(s, 4, 2, Subsystem::A).trace() - 1.0) <= 1e-12);
    CHECK(std::abs(partial_trace(s, 4, 2, Subsystem::B).trace() - 1.0) <= 1e-12);
  }
  CHECK_THROWS_AS(partial_trace(CMatrix::identity(5), 2, 2, Subsystem::A), Error);
}

TEST_CASE("trace_norm") {
  const std::vector<double> pm{1, -1}, mixed{0.7, -0.2, 0.1};
  CHECK(trace_norm(CMatrix::diagonal(std::span<const double>(pm))) == doctest::Approx(2.0));
  CHECK(trace_norm(CMatrix::diagonal(std::span<const double>(mixed))) == doctest::Approx(1.0));

  Rng rng(41);
  CHECK(trace_norm(random_mixed_state(5, 2, rng)) == doctest::Approx(1.0).epsilon(1e-12));
  for (int trial = 0; trial < 20; ++trial) {
    const CMatrix a = random_hermitian(5, rng);
    const CMatrix u = haar_unitary(5, rng);
    const double tn = trace_norm(a);
    CHECK(tn >= std::abs(a.trace()) - 1e-12);
    CHECK(std::abs(trace_norm(u * a * u.adjoint()) - tn) <= 1e-10);
  }
  CHECK_THROWS_AS(trace_norm(CMatrix{{0, 1}, {0, 0}}), Error);
}

TEST_CASE("vec convention: vec(A X B) = (B^T kron A) vec(X)") {
  Rng rng(43);
  const CMatrix a = gaussian_matrix(2, 3, rng), x = gaussian_matrix(3, 4, rng), b = gaussian_matrix(4, 2, rng);
  CHECK(frobenius_distance(vec(a * x * b), kron(b.transpose(), a) * vec(x)) <= 1e-12);
  CHECK(unvec(vec(x), 3, 4) == x);
}
