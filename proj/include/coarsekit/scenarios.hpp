#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "coarsekit/compat.hpp"

namespace coarsekit {

enum class Expected { Compatible, Incompatible, Unknown };
std::string_view to_string(Expected e) noexcept;

struct NamedScenario {
  std::string name;
  Scenario scenario;
  Expected expected = Expected::Unknown;
  std::string notes;
};

/// Qutrit -> qubit coarse-graining with K0 = |0><0| + |1><+|, K1 = |1><-|
/// (|+-> on span{|1>, |2>}) and dynamics diag(1, u2). Compatible iff |+->
/// are eigenvectors of u2.
NamedScenario example1(const CMatrix& u2);

enum class CoherenceMode { Full, None };

/// k levels per block, d blocks. Full coherence: k Kraus operators
/// K_i = sum_j |j><u_ij|; none: k*d operators |j><u_ij|. The |u_ij> are the
/// discrete Fourier vectors of block j (|+->, for k = 2). Dynamics is
/// block diagonal with the given k x k blocks, in each block's
/// computational basis.
NamedScenario example2(std::size_t k, std::size_t d, const std::vector<CMatrix>& blocks, CoherenceMode mode);

/// Spin-j generators (j = (dim - 1) / 2) with J_z diagonal, descending m.
std::array<CMatrix, 3> spin_matrices(std::size_t dim);

/// exp(-i alpha <G, n>) for Hermitian generators G.
CMatrix rotation(const std::array<CMatrix, 3>& generators, double alpha, const std::array<double, 3>& n);

/// Spin-D -> qubit map rho -> (I + 2/(D-1) sum_i <J_i> sigma_i) / 2 with
/// dynamics exp(-i alpha <J, n>). Throws NotCP if the map is not
/// completely positive for this D.
NamedScenario spin_dichotomization(std::size_t dim, double alpha, const std::array<double, 3>& n);

/// Haar-random unitary and Stinespring-random coarse-graining. The Kraus
/// count is raised to ceil(D / d) when smaller, the least a trace
/// preserving D -> d map needs.
NamedScenario random_scenario(std::size_t micro, std::size_t macro, std::size_t kraus_count, std::uint64_t seed);

/// d | D. Kraus M_j = (I_d (x) <j|) Y for a Haar unitary Y and dynamics
/// U = Y^* (V (x) I) Y, so M_j U = V M_j holds exactly.
NamedScenario planted_covariant_scenario(std::size_t micro, std::size_t macro, std::uint64_t seed);

const std::vector<NamedScenario>& registry();
std::optional<NamedScenario> find_scenario(std::string_view name);

}  // namespace coarsekit
