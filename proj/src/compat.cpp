#include "coarsekit/compat.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace coarsekit {

std::string_view to_string(SdpStatus status) noexcept {
  switch (status) {
    case SdpStatus::Feasible: return "feasible";
    case SdpStatus::Infeasible: return "infeasible";
    case SdpStatus::Undecided: return "undecided";
  }
  return "undecided";
}

std::string_view to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::Compatible: return "compatible";
    case Verdict::Incompatible: return "incompatible";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

Scenario::Scenario(KrausChannel cg, CMatrix u) : cg_(std::move(cg)), u_(std::move(u)) {
  if (cg_.dout() > cg_.din())
    throw Error(ErrorKind::InvalidArgument, "coarse-graining must not increase the dimension");
  if (u_.rows() != cg_.din() || !u_.is_square())
    throw Error(ErrorKind::DimensionMismatch, "unitary must be " + std::to_string(cg_.din()) + "x" +
                                                  std::to_string(cg_.din()));
  if (!is_unitary(u_, 1e-9)) throw Error(ErrorKind::NotUnitary, "microscopic dynamics is not unitary");
}

FiberResult check_fiber_preservation(const Scenario& s) {
  const CMatrix t_cg = transfer(s.cg()).mat;
  const CMatrix t_u = kron(s.u().conj(), s.u());
  const CMatrix kernel = kernel_basis(t_cg);
  FiberResult out;
  out.kernel_dim = kernel.cols();
  out.residual = kernel.cols() == 0 ? 0.0 : spectral_norm(t_cg * t_u * kernel);
  out.preserved = out.residual <= kFiberTol;
  return out;
}

AlgebraicResult solve_algebraic_v(const Scenario& s) {
  const std::size_t d = s.macro_dim();
  const CMatrix id = CMatrix::identity(d);
  const auto& kraus = s.cg().kraus();
  const std::size_t block = kraus.front().size();

  // vec(V M_k) = (M_k^T (x) I) vec(V)
  CMatrix a(block * kraus.size(), d * d);
  CMatrix b(block * kraus.size(), 1);
  for (std::size_t k = 0; k < kraus.size(); ++k) {
    const CMatrix ak = kron(kraus[k].transpose(), id);
    const CMatrix bk = vec(kraus[k] * s.u());
    for (std::size_t r = 0; r < block; ++r) {
      for (std::size_t c = 0; c < d * d; ++c) a(k * block + r, c) = ak(r, c);
      b(k * block + r, 0) = bk(r, 0);
    }
  }
  const CMatrix x = pinv(a) * b;

  AlgebraicResult out;
  out.least_squares_v = unvec(x, d, d);
  out.residual = frobenius_norm(a * x - b);
  out.threshold = kAlgebraicRelTol * frobenius_norm(b);
  if (out.residual <= out.threshold) out.v = out.least_squares_v;
  return out;
}

double verify_dual_identity(const Scenario& s, const CMatrix& v) {
  const std::size_t d = s.macro_dim();
  if (v.rows() != d || v.cols() != d)
    throw Error(ErrorKind::DimensionMismatch, "V must be " + std::to_string(d) + "x" + std::to_string(d));
  CMatrix acc(s.micro_dim(), s.micro_dim());
  for (const CMatrix& m : s.cg().kraus()) acc += m.adjoint() * v * m;
  return frobenius_distance(s.u(), acc);
}

double diagram_residual(const Scenario& s, const KrausChannel& gamma) {
  const KrausChannel upper = compose(gamma, s.cg());
  const KrausChannel lower = compose(s.cg(), unitary_channel(s.u()));
  return choi_distance(upper, lower);
}

double helstrom_pguess(double p0, const CMatrix& rho0, const CMatrix& rho1) {
  if (!(p0 >= 0.0 && p0 <= 1.0)) throw Error(ErrorKind::InvalidArgument, "prior must lie in [0, 1]");
  if (rho0.rows() != rho1.rows() || rho0.cols() != rho1.cols())
    throw Error(ErrorKind::DimensionMismatch, "states of different dimension");
  CMatrix diff = p0 * rho0 - (1.0 - p0) * rho1;
  diff = 0.5 * (diff + diff.adjoint());
  return 0.5 * (1.0 + trace_norm(diff));
}

double helstrom_pguess(double p0, const DensityMatrix& rho0, const DensityMatrix& rho1) {
  return helstrom_pguess(p0, rho0.mat(), rho1.mat());
}

std::optional<EnsembleWitness> search_witness(const Scenario& s, int trials, std::size_t ancilla_dim,
                                              std::uint64_t seed) {
  if (trials < 1) throw Error(ErrorKind::InvalidArgument, "trials must be >= 1");
  if (ancilla_dim < 1) throw Error(ErrorKind::InvalidArgument, "ancilla dimension must be >= 1");
  const KrausChannel cg = extend(s.cg(), ancilla_dim);
  const CMatrix u = kron(s.u(), CMatrix::identity(ancilla_dim));
  const std::size_t n = s.micro_dim() * ancilla_dim;

  for (int t = 0; t < trials; ++t) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
    const double p0 = uniform01(rng);
    CMatrix rho0, rho1;
    if (t % 2 == 0) {
      rho0 = random_pure_state(n, rng);
      rho1 = random_pure_state(n, rng);
    } else {
      const std::size_t rank = 1 + static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n)) % n;
      rho0 = random_mixed_state(n, rank, rng);
      rho1 = random_mixed_state(n, rank, rng);
    }
    const double before = helstrom_pguess(p0, cg(rho0), cg(rho1));
    const double after = helstrom_pguess(p0, cg(u * rho0 * u.adjoint()), cg(u * rho1 * u.adjoint()));
    if (after > before + kWitnessMargin) {
      return EnsembleWitness{.p0 = p0,
                             .p1 = 1.0 - p0,
                             .ancilla_dim = ancilla_dim,
                             .trial = static_cast<std::size_t>(t),
                             .rho0 = DensityMatrix(std::move(rho0)),
                             .rho1 = DensityMatrix(std::move(rho1)),
                             .pg_before = before,
                             .pg_after = after};
    }
  }
  return std::nullopt;
}

KrausEquivalence verify_kraus_equivalence(const Scenario& s, const KrausChannel& gamma) {
  const std::size_t d = s.macro_dim();
  if (gamma.din() != d || gamma.dout() != d)
    throw Error(ErrorKind::DimensionMismatch, "emergent map must act on the macroscopic system");
  std::vector<CMatrix> upper, lower;
  for (const CMatrix& k : gamma.kraus())
    for (const CMatrix& m : s.cg().kraus()) upper.push_back(k * m);
  for (const CMatrix& m : s.cg().kraus()) lower.push_back(m * s.u());
  const KrausMap a(s.micro_dim(), d, std::move(upper));
  const KrausMap b(s.micro_dim(), d, std::move(lower));

  KrausEquivalence out;
  const double dist = choi_distance(a, b);
  if (dist > kChannelEqualTol) {
    out.residual = dist;
    return out;
  }
  try {
    CMatrix w = connecting_unitary(a, b, kChannelEqualTol);
    out.residual = mixing_residual(a.kraus(), b.kraus(), w);
    out.equivalent = out.residual <= kKrausEquivalenceTol;
    out.v = std::move(w);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NumericalFailure) throw;
    out.residual = dist;
  }
  return out;
}

CompatReport run_all(const Scenario& s, const CheckConfig& cfg) {
  CompatReport r;
  r.fiber = check_fiber_preservation(s);
  r.algebraic = solve_algebraic_v(s);
  r.dual_identity_residual = verify_dual_identity(s, r.algebraic.least_squares_v);
  r.sdp = sdp_feasibility(s, cfg.sdp_max_iter, cfg.sdp_tol);

  r.ancilla_dims = cfg.ancilla_dims;
  if (r.ancilla_dims.empty()) {
    for (std::size_t n : {std::size_t{1}, s.macro_dim(), s.micro_dim()})
      if (std::find(r.ancilla_dims.begin(), r.ancilla_dims.end(), n) == r.ancilla_dims.end())
        r.ancilla_dims.push_back(n);
  }
  for (std::size_t i = 0; i < r.ancilla_dims.size() && !r.witness; ++i) {
    r.witness = search_witness(s, cfg.witness_trials, r.ancilla_dims[i], derive_seed(cfg.seed, 1000 + i));
    r.witness_trials += r.witness ? static_cast<int>(r.witness->trial) + 1 : cfg.witness_trials;
  }

  r.emergent = construct_emergent(s, cfg.sdp_max_iter, cfg.sdp_tol);
  if (r.emergent) {
    r.emergent_diagram_residual = diagram_residual(s, *r.emergent);
    r.kraus_equivalence = verify_kraus_equivalence(s, *r.emergent);
  }

  MethodAgreement& m = r.agreement;
  m.geometric = r.fiber.preserved ? Verdict::Compatible : Verdict::Incompatible;
  m.algebraic = r.algebraic.v ? Verdict::Compatible : Verdict::Inconclusive;
  if (r.witness || r.sdp.status == SdpStatus::Infeasible)
    m.sdp = Verdict::Incompatible;
  else if (r.sdp.status == SdpStatus::Feasible)
    m.sdp = Verdict::Compatible;
  if (r.kraus_equivalence) m.unitary_equivalence = r.kraus_equivalence->equivalent ? Verdict::Compatible
                                                                                   : Verdict::Incompatible;
  if (r.emergent)
    m.overall = Verdict::Compatible;
  else if (m.geometric == Verdict::Incompatible || m.sdp == Verdict::Incompatible)
    m.overall = Verdict::Incompatible;

  std::ostringstream bad;
  if (r.algebraic.v && !r.fiber.preserved)
    bad << "algebraic V found (residual " << r.algebraic.residual << ") but fibers not preserved (residual "
        << r.fiber.residual << "); ";
  if (r.sdp.status == SdpStatus::Feasible && !r.fiber.preserved)
    bad << "SDP feasible but fibers not preserved (residual " << r.fiber.residual << "); ";
  if (r.witness && r.sdp.status == SdpStatus::Feasible)
    bad << "witness gap " << r.witness->gap() << " found on an SDP-feasible scenario; ";
  if (r.emergent && (r.witness || !r.fiber.preserved))
    bad << "emergent map constructed although a criterion rules it out; ";
  if (r.kraus_equivalence && !r.kraus_equivalence->equivalent)
    bad << "emergent map is not Kraus-equivalent (residual " << r.kraus_equivalence->residual << "); ";
  if (!bad.str().empty()) throw Error(ErrorKind::MethodDisagreement, bad.str());
  return r;
}

}  // namespace coarsekit
