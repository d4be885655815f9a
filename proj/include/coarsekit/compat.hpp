#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "coarsekit/channel.hpp"

namespace coarsekit {

/// A coarse-graining `cg` (D -> d) together with microscopic unitary
/// dynamics `u` on the D-level system.
class Scenario {
 public:
  Scenario(KrausChannel cg, CMatrix u);

  std::size_t micro_dim() const noexcept { return cg_.din(); }
  std::size_t macro_dim() const noexcept { return cg_.dout(); }
  const KrausChannel& cg() const noexcept { return cg_; }
  const CMatrix& u() const noexcept { return u_; }

 private:
  KrausChannel cg_;
  CMatrix u_;
};

inline constexpr double kFiberTol = 1e-8;
inline constexpr double kAlgebraicRelTol = 1e-8;
inline constexpr double kDiagramTol = 1e-8;
inline constexpr double kEmergentDiagramTol = 1e-6;
inline constexpr double kKrausEquivalenceTol = 1e-7;
inline constexpr double kWitnessMargin = 1e-9;

struct FiberResult {
  bool preserved = false;
  /// Operator norm of T_cg * T_u restricted to ker(T_cg).
  double residual = 0.0;
  std::size_t kernel_dim = 0;
};

/// Exact form of "equal coarse-grained images stay equal after the
/// dynamics": ker(T_cg) must be mapped into ker(T_cg) by conjugation with u.
FiberResult check_fiber_preservation(const Scenario& s);

struct AlgebraicResult {
  std::optional<CMatrix> v;  // present when the residual passes
  CMatrix least_squares_v;   // minimal-norm minimizer, always filled
  double residual = 0.0;     // sqrt(sum_k ||M_k u - V M_k||_F^2)
  double threshold = 0.0;
};

/// Least-squares solve of M_k u = V M_k for all k.
AlgebraicResult solve_algebraic_v(const Scenario& s);

/// || u - sum_k M_k^* v M_k ||_F.
double verify_dual_identity(const Scenario& s, const CMatrix& v);

enum class SdpStatus { Feasible, Infeasible, Undecided };
std::string_view to_string(SdpStatus status) noexcept;

struct SdpResult {
  SdpStatus status = SdpStatus::Undecided;
  double residual = 0.0;
  int iterations = 0;
  std::optional<ChoiMatrix> choi;  // trace-normalized PSD point when feasible
};

inline constexpr int kDefaultSdpMaxIter = 20000;
inline constexpr double kDefaultSdpTol = 1e-7;
inline constexpr int kSdpStallWindow = 200;

/// Existence of a CPTP map G on the macroscopic system with
/// G o cg = cg o u, decided by Dykstra alternating projections between the
/// PSD cone and the affine set of Choi matrices meeting the trace and
/// diagram constraints.
SdpResult sdp_feasibility(const Scenario& s, int max_iter = kDefaultSdpMaxIter, double tol = kDefaultSdpTol);

/// || Choi(gamma o cg) - Choi(cg o u) ||_F.
double diagram_residual(const Scenario& s, const KrausChannel& gamma);

/// Emergent map from cg o u o cg^+ on the image of cg, falling back to the
/// SDP when the pseudoinverse completion is not CPTP.
std::optional<KrausChannel> construct_emergent(const Scenario& s, int max_iter = kDefaultSdpMaxIter,
                                               double tol = kDefaultSdpTol);

/// Optimal success probability for telling rho0 (prior p0) from rho1.
double helstrom_pguess(double p0, const DensityMatrix& rho0, const DensityMatrix& rho1);
double helstrom_pguess(double p0, const CMatrix& rho0, const CMatrix& rho1);

struct EnsembleWitness {
  double p0 = 0.5;
  double p1 = 0.5;
  std::size_t ancilla_dim = 1;
  std::size_t trial = 0;
  DensityMatrix rho0;
  DensityMatrix rho1;
  double pg_before = 0.5;  // ensemble after cg (x) id
  double pg_after = 0.5;   // ensemble after (cg o u) (x) id

  double gap() const noexcept { return pg_after - pg_before; }
};

/// Random search for a binary ensemble on D (x) ancilla whose coarse-grained
/// distinguishability grows under the dynamics. A hit rules out any CPTP
/// emergent map; no hit proves nothing.
std::optional<EnsembleWitness> search_witness(const Scenario& s, int trials, std::size_t ancilla_dim,
                                              std::uint64_t seed);

struct KrausEquivalence {
  bool equivalent = false;
  std::optional<CMatrix> v;  // connecting unitary over (i, j) -> i * N + j
  double residual = 0.0;
};

/// Checks {K_i M_j} against {M_k u} up to unitary mixing.
KrausEquivalence verify_kraus_equivalence(const Scenario& s, const KrausChannel& gamma);

struct CheckConfig {
  int sdp_max_iter = kDefaultSdpMaxIter;
  double sdp_tol = kDefaultSdpTol;
  int witness_trials = 1000;
  /// Empty means {1, d, D}.
  std::vector<std::size_t> ancilla_dims;
  std::uint64_t seed = 0;
};

enum class Verdict { Compatible, Incompatible, Inconclusive };
std::string_view to_string(Verdict v) noexcept;

struct MethodAgreement {
  Verdict geometric = Verdict::Inconclusive;
  Verdict algebraic = Verdict::Inconclusive;
  Verdict sdp = Verdict::Inconclusive;
  Verdict unitary_equivalence = Verdict::Inconclusive;
  /// Compatible iff a CPTP emergent map was constructed, Incompatible iff
  /// some method certified non-existence, else Inconclusive.
  Verdict overall = Verdict::Inconclusive;
};

struct CompatReport {
  FiberResult fiber;
  AlgebraicResult algebraic;
  double dual_identity_residual = 0.0;
  SdpResult sdp;
  std::optional<EnsembleWitness> witness;
  int witness_trials = 0;
  std::vector<std::size_t> ancilla_dims;
  std::optional<KrausChannel> emergent;
  double emergent_diagram_residual = 0.0;
  std::optional<KrausEquivalence> kraus_equivalence;
  MethodAgreement agreement;
};

/// Runs every criterion and cross-checks them; throws MethodDisagreement if
/// the verdicts contradict each other.
CompatReport run_all(const Scenario& s, const CheckConfig& cfg = {});

}  // namespace coarsekit
