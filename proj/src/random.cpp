#include "coarsekit/random.hpp"

#include <cmath>

namespace coarsekit {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

CMatrix gaussian_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  CMatrix out(rows, cols);
  for (auto& z : out.data()) {
    const double re = normal(rng);
    const double im = normal(rng);
    z = cplx(re, im) / std::sqrt(2.0);
  }
  return out;
}

CMatrix haar_isometry(std::size_t rows, std::size_t cols, Rng& rng) {
  if (cols > rows) throw Error(ErrorKind::InvalidArgument, "isometry needs rows >= cols");
  CMatrix q = gaussian_matrix(rows, cols, rng);
  for (std::size_t j = 0; j < cols; ++j) {
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t l = 0; l < j; ++l) {
        cplx proj = 0.0;
        for (std::size_t k = 0; k < rows; ++k) proj += std::conj(q(k, l)) * q(k, j);
        for (std::size_t k = 0; k < rows; ++k) q(k, j) -= proj * q(k, l);
      }
    }
    // Modified Gram-Schmidt yields R with a real positive diagonal, which is
    // the phase convention that makes Q Haar distributed.
    double nrm = 0.0;
    for (std::size_t k = 0; k < rows; ++k) nrm += std::norm(q(k, j));
    nrm = std::sqrt(nrm);
    for (std::size_t k = 0; k < rows; ++k) q(k, j) /= nrm;
  }
  return q;
}

CMatrix haar_unitary(std::size_t n, Rng& rng) { return haar_isometry(n, n, rng); }

CMatrix random_pure_vector(std::size_t n, Rng& rng) {
  CMatrix v = gaussian_matrix(n, 1, rng);
  v *= 1.0 / frobenius_norm(v);
  return v;
}

CMatrix random_pure_state(std::size_t n, Rng& rng) {
  const CMatrix v = random_pure_vector(n, rng);
  return outer(v, v);
}

CMatrix random_mixed_state(std::size_t n, std::size_t rank, Rng& rng) {
  const CMatrix g = gaussian_matrix(n, rank, rng);
  CMatrix rho = g * g.adjoint();
  rho *= 1.0 / rho.trace().real();
  return rho;
}

CMatrix random_hermitian(std::size_t n, Rng& rng) {
  const CMatrix g = gaussian_matrix(n, n, rng);
  return 0.5 * (g + g.adjoint());
}

}  // namespace coarsekit
