#include "coarsekit/scenarios.hpp"

#include <cmath>
#include <numbers>

namespace coarsekit {

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

// Columns |+>, |-> of a two-level block.
CMatrix plus_minus_basis() { return CMatrix{{kInvSqrt2, kInvSqrt2}, {kInvSqrt2, -kInvSqrt2}}; }

CMatrix real_rotation(double theta) {
  return CMatrix{{std::cos(theta), -std::sin(theta)}, {std::sin(theta), std::cos(theta)}};
}

// Fourier vector i of a k-level block embedded at offset block*k.
CMatrix fourier_vector(std::size_t k, std::size_t block, std::size_t i, std::size_t total) {
  CMatrix v(total, 1);
  for (std::size_t m = 0; m < k; ++m) {
    const double phase = 2.0 * std::numbers::pi * static_cast<double>(i * m) / static_cast<double>(k);
    v(block * k + m, 0) = std::polar(1.0 / std::sqrt(static_cast<double>(k)), phase);
  }
  return v;
}

double eigenvector_residual(const CMatrix& u, const CMatrix& v) {
  const CMatrix uv = u * v;
  const cplx lambda = inner(v, uv);
  return frobenius_distance(uv, lambda * v);
}

// u2 = F diag(e^{i t0}, e^{i t1}) F^* with F = (|+>, |->).
CMatrix diagonal_in_plus_minus(double t0, double t1) {
  const CMatrix f = plus_minus_basis();
  const std::vector<cplx> phases{std::polar(1.0, t0), std::polar(1.0, t1)};
  return f * CMatrix::diagonal(std::span<const cplx>(phases)) * f.adjoint();
}

}  // namespace

std::string_view to_string(Expected e) noexcept {
  switch (e) {
    case Expected::Compatible: return "compatible";
    case Expected::Incompatible: return "incompatible";
    case Expected::Unknown: return "unknown";
  }
  return "unknown";
}

NamedScenario example1(const CMatrix& u2) {
  if (u2.rows() != 2 || u2.cols() != 2) throw Error(ErrorKind::DimensionMismatch, "u2 must be 2x2");
  if (!is_unitary(u2, 1e-9)) throw Error(ErrorKind::NotUnitary, "u2 is not unitary");
  const double r = kInvSqrt2;
  const CMatrix k0{{1, 0, 0}, {0, r, r}};
  const CMatrix k1{{0, 0, 0}, {0, r, -r}};
  CMatrix u = CMatrix::identity(3);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) u(1 + i, 1 + j) = u2(i, j);

  const CMatrix f = plus_minus_basis();
  const bool eig = eigenvector_residual(u2, f.column(0)) <= 1e-9 && eigenvector_residual(u2, f.column(1)) <= 1e-9;
  return NamedScenario{"example1", Scenario(KrausChannel(3, 2, {k0, k1}), u),
                       eig ? Expected::Compatible : Expected::Incompatible,
                       "qutrit -> qubit; compatible iff |+>_12 and |->_12 are eigenvectors of U2"};
}

NamedScenario example2(std::size_t k, std::size_t d, const std::vector<CMatrix>& blocks, CoherenceMode mode) {
  if (k < 1 || d < 1) throw Error(ErrorKind::InvalidArgument, "k and d must be positive");
  if (blocks.size() != d)
    throw Error(ErrorKind::DimensionMismatch, "expected " + std::to_string(d) + " blocks, got " +
                                                  std::to_string(blocks.size()));
  const std::size_t total = k * d;
  CMatrix u(total, total);
  for (std::size_t j = 0; j < d; ++j) {
    if (blocks[j].rows() != k || blocks[j].cols() != k)
      throw Error(ErrorKind::DimensionMismatch, "block " + std::to_string(j) + " must be " + std::to_string(k) +
                                                    "x" + std::to_string(k));
    if (!is_unitary(blocks[j], 1e-9)) throw Error(ErrorKind::NotUnitary, "block " + std::to_string(j));
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = 0; b < k; ++b) u(j * k + a, j * k + b) = blocks[j](a, b);
  }

  std::vector<CMatrix> kraus;
  if (mode == CoherenceMode::Full) {
    for (std::size_t i = 0; i < k; ++i) {
      CMatrix ki(d, total);
      for (std::size_t j = 0; j < d; ++j) ki += outer(ket(d, j), fourier_vector(k, j, i, total));
      kraus.push_back(std::move(ki));
    }
  } else {
    for (std::size_t j = 0; j < d; ++j)
      for (std::size_t i = 0; i < k; ++i) kraus.push_back(outer(ket(d, j), fourier_vector(k, j, i, total)));
  }

  // Full coherence keeps tr(U_j'^* U_j C) = tr(C) for every coherence
  // block C only when U_j'^* U_j is a multiple of the identity.
  Expected expected = Expected::Compatible;
  if (mode == CoherenceMode::Full) {
    for (std::size_t j = 1; j < d; ++j) {
      const CMatrix rel = blocks[0].adjoint() * blocks[j];
      const cplx c = rel.trace() / static_cast<double>(k);
      if (frobenius_distance(rel, c * CMatrix::identity(k)) > 1e-9) expected = Expected::Incompatible;
    }
  }
  std::string notes = mode == CoherenceMode::Full ? "full coherence" : "no coherence";
  notes += "; image derived from the Kraus operators (lower-right entry of the coarse-grained 4x4 example is "
           "rho_22 + rho_33 in the +- basis)";
  return NamedScenario{"example2", Scenario(KrausChannel(total, d, std::move(kraus)), u), expected, notes};
}

std::array<CMatrix, 3> spin_matrices(std::size_t dim) {
  if (dim < 1) throw Error(ErrorKind::InvalidArgument, "spin dimension must be positive");
  const double j = (static_cast<double>(dim) - 1.0) / 2.0;
  CMatrix raise(dim, dim), jz(dim, dim);
  for (std::size_t idx = 0; idx < dim; ++idx) {
    const double m = j - static_cast<double>(idx);
    jz(idx, idx) = m;
    if (idx > 0) raise(idx - 1, idx) = std::sqrt(j * (j + 1) - m * (m + 1));
  }
  const CMatrix lower = raise.adjoint();
  return {0.5 * (raise + lower), cplx(0, -0.5) * (raise - lower), jz};
}

CMatrix rotation(const std::array<CMatrix, 3>& generators, double alpha, const std::array<double, 3>& n) {
  CMatrix h = n[0] * generators[0] + n[1] * generators[1] + n[2] * generators[2];
  h = 0.5 * (h + h.adjoint());
  return hermitian_function(h, [alpha](double l) { return std::exp(cplx(0, -alpha * l)); });
}

NamedScenario spin_dichotomization(std::size_t dim, double alpha, const std::array<double, 3>& n) {
  if (dim < 2) throw Error(ErrorKind::InvalidArgument, "spin dichotomization needs D >= 2");
  const double norm = std::sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]);
  if (std::abs(norm - 1.0) > 1e-12) throw Error(ErrorKind::InvalidArgument, "rotation axis must be a unit vector");

  const auto spin = spin_matrices(dim);
  const auto pauli = spin_matrices(2);  // sigma_i / 2
  const double factor = 2.0 / (static_cast<double>(dim) - 1.0);

  // Choi block (a, b) is the image of |a><b|: tr(J_i |a><b|) = (J_i)_{ba}.
  ChoiMatrix choi{dim, 2, CMatrix(2 * dim, 2 * dim)};
  for (std::size_t a = 0; a < dim; ++a)
    for (std::size_t b = 0; b < dim; ++b) {
      CMatrix image = (a == b ? 0.5 : 0.0) * CMatrix::identity(2);
      for (std::size_t i = 0; i < 3; ++i) image += (0.5 * factor * spin[i](b, a) * 2.0) * pauli[i];
      for (std::size_t r = 0; r < 2; ++r)
        for (std::size_t c = 0; c < 2; ++c) choi.mat(a * 2 + r, b * 2 + c) = image(r, c);
    }
  const double min_eig = hermitian_eig(choi.mat).values.front();
  if (min_eig < -1e-8)
    throw Error(ErrorKind::NotCP, "dichotomization map is not completely positive for D = " + std::to_string(dim) +
                                      " (Choi eigenvalue " + std::to_string(min_eig) + ")");

  return NamedScenario{"spin-d" + std::to_string(dim),
                       Scenario(choi_to_kraus(choi), rotation(spin, alpha, n)), Expected::Compatible,
                       "emergent dynamics: conjugation by exp(-i alpha <sigma/2, n>)"};
}

NamedScenario random_scenario(std::size_t micro, std::size_t macro, std::size_t kraus_count, std::uint64_t seed) {
  if (macro > micro || macro < 1) throw Error(ErrorKind::InvalidArgument, "need 1 <= d <= D");
  if (kraus_count < 1) throw Error(ErrorKind::InvalidArgument, "kraus_count must be >= 1");
  Rng rng(seed);
  KrausChannel cg = random_channel(micro, macro, kraus_count, rng);
  CMatrix u = haar_unitary(micro, rng);
  return NamedScenario{"random-" + std::to_string(micro) + "-" + std::to_string(macro) + "-" +
                           std::to_string(kraus_count) + "-" + std::to_string(seed),
                       Scenario(std::move(cg), std::move(u)), Expected::Unknown, "Haar unitary, Stinespring map"};
}

NamedScenario planted_covariant_scenario(std::size_t micro, std::size_t macro, std::uint64_t seed) {
  if (macro < 1 || micro % macro != 0) throw Error(ErrorKind::InvalidArgument, "d must divide D");
  const std::size_t k = micro / macro;
  Rng rng(seed);
  const CMatrix y = haar_unitary(micro, rng);
  const CMatrix v = haar_unitary(macro, rng);
  std::vector<CMatrix> kraus;
  for (std::size_t j = 0; j < k; ++j) kraus.push_back(kron(CMatrix::identity(macro), ket(k, j).adjoint()) * y);
  CMatrix u = y.adjoint() * kron(v, CMatrix::identity(k)) * y;
  return NamedScenario{"planted-" + std::to_string(micro) + "-" + std::to_string(macro) + "-" + std::to_string(seed),
                       Scenario(KrausChannel(micro, macro, std::move(kraus)), std::move(u)), Expected::Compatible,
                       "M_j U = V M_j by construction"};
}

const std::vector<NamedScenario>& registry() {
  static const std::vector<NamedScenario> entries = [] {
    std::vector<NamedScenario> out;
    auto named = [](NamedScenario s, std::string name) {
      s.name = std::move(name);
      return s;
    };
    out.push_back(named(example1(diagonal_in_plus_minus(0.3, 1.1)), "example1-compatible"));
    {
      const CMatrix f = plus_minus_basis();
      out.push_back(
          named(example1(f * real_rotation(std::numbers::pi / 4) * f.adjoint()), "example1-incompatible"));
    }
    const CMatrix f = plus_minus_basis();
    const CMatrix block = f * real_rotation(0.4) * diagonal_in_plus_minus(0.0, 0.9) * f.adjoint();
    out.push_back(named(example2(2, 2, {block, block}, CoherenceMode::Full), "example2-compatible"));
    out.push_back(named(example2(2, 2, {block, block * f * real_rotation(std::numbers::pi / 3) * f.adjoint()},
                                 CoherenceMode::Full),
                        "example2-incompatible"));
    out.push_back(spin_dichotomization(3, std::numbers::pi / 2, {0, 0, 1}));
    return out;
  }();
  return entries;
}

std::optional<NamedScenario> find_scenario(std::string_view name) {
  for (const auto& s : registry())
    if (s.name == name) return s;
  return std::nullopt;
}

}  // namespace coarsekit
