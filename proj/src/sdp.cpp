// Choi-matrix feasibility for the emergent map and its construction.
#include <algorithm>
#include <cmath>
#include <deque>

#include "coarsekit/compat.hpp"

namespace coarsekit {

namespace {

const double kSqrt2 = std::sqrt(2.0);

// Isometric real coordinates of an n x n Hermitian matrix: the diagonal,
// then sqrt(2) Re and sqrt(2) Im of each upper off-diagonal entry.
std::vector<double> to_coords(const CMatrix& h) {
  const std::size_t n = h.rows();
  std::vector<double> x;
  x.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i) x.push_back(h(i, i).real());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const cplx z = 0.5 * (h(i, j) + std::conj(h(j, i)));
      x.push_back(kSqrt2 * z.real());
      x.push_back(kSqrt2 * z.imag());
    }
  return x;
}

CMatrix from_coords(std::span<const double> x, std::size_t n) {
  CMatrix h(n, n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) h(i, i) = x[k++];
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const cplx z(x[k] / kSqrt2, x[k + 1] / kSqrt2);
      k += 2;
      h(i, j) = z;
      h(j, i) = std::conj(z);
    }
  return h;
}

double distance(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(acc);
}

void append_real_imag(const CMatrix& m, std::vector<double>& out) {
  for (const cplx& z : m.data()) {
    out.push_back(z.real());
    out.push_back(z.imag());
  }
}

CMatrix project_psd(const CMatrix& h) {
  return hermitian_function(h, [](double l) { return cplx(std::max(l, 0.0)); });
}

// (S^{-1/2} (x) I) J (S^{-1/2} (x) I) with S the input marginal; keeps PSD
// and makes the trace condition exact.
ChoiMatrix normalize_trace(const ChoiMatrix& c) {
  CMatrix s = partial_trace(c.mat, c.din, c.dout, Subsystem::A);
  s = 0.5 * (s + s.adjoint());
  const CMatrix inv_sqrt = hermitian_function(s, [](double l) { return cplx(1.0 / std::sqrt(l)); });
  const CMatrix lift = kron(inv_sqrt, CMatrix::identity(c.dout));
  CMatrix mat = lift * c.mat * lift.adjoint();
  mat = 0.5 * (mat + mat.adjoint());
  return ChoiMatrix{c.din, c.dout, std::move(mat)};
}

// Affine set {x : A x = b} in Hermitian coordinates, stored as its
// minimal-norm point plus an orthonormal basis of directions.
struct AffineSet {
  std::vector<double> origin;
  CMatrix directions;  // columns
  double inconsistency = 0.0;

  std::vector<double> project(std::span<const double> x) const {
    std::vector<double> out = origin;
    const std::size_t n = origin.size();
    for (std::size_t c = 0; c < directions.cols(); ++c) {
      double coef = 0.0;
      for (std::size_t i = 0; i < n; ++i) coef += directions(i, c).real() * (x[i] - origin[i]);
      for (std::size_t i = 0; i < n; ++i) out[i] += coef * directions(i, c).real();
    }
    return out;
  }
};

// Constraints on the d^2 x d^2 Choi matrix J of G:
//   tr_out J = I_d   and   T_G(J) T_cg = T_cg T_u.
AffineSet build_constraints(const Scenario& s) {
  const std::size_t d = s.macro_dim();
  const std::size_t n = d * d;
  const std::size_t dim = n * n;
  const CMatrix t_cg = transfer(s.cg()).mat;
  const CMatrix target = t_cg * kron(s.u().conj(), s.u());

  std::vector<double> rhs;
  append_real_imag(CMatrix::identity(d), rhs);
  append_real_imag(target, rhs);
  const std::size_t rows = rhs.size();

  CMatrix a(rows, dim);
  std::vector<double> unit(dim, 0.0);
  for (std::size_t k = 0; k < dim; ++k) {
    unit[k] = 1.0;
    const ChoiMatrix basis{d, d, from_coords(unit, n)};
    unit[k] = 0.0;
    std::vector<double> col;
    col.reserve(rows);
    append_real_imag(partial_trace(basis.mat, d, d, Subsystem::A), col);
    append_real_imag(choi_to_transfer(basis).mat * t_cg, col);
    for (std::size_t r = 0; r < rows; ++r) a(r, k) = col[r];
  }

  const Svd dec = svd(a);
  const std::size_t rank = numerical_rank(dec.s);
  AffineSet set;
  set.directions = dec.v.columns(rank, dim - rank);
  set.origin.assign(dim, 0.0);
  // origin = A^+ b
  for (std::size_t k = 0; k < rank; ++k) {
    double coef = 0.0;
    for (std::size_t r = 0; r < rows; ++r) coef += dec.u(r, k).real() * rhs[r];
    coef /= dec.s[k];
    for (std::size_t i = 0; i < dim; ++i) set.origin[i] += coef * dec.v(i, k).real();
  }
  double worst = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    double lhs = 0.0;
    for (std::size_t i = 0; i < dim; ++i) lhs += a(r, i).real() * set.origin[i];
    worst += (lhs - rhs[r]) * (lhs - rhs[r]);
  }
  set.inconsistency = std::sqrt(worst);
  return set;
}

}  // namespace

SdpResult sdp_feasibility(const Scenario& s, int max_iter, double tol) {
  if (max_iter < 1) throw Error(ErrorKind::InvalidArgument, "max_iter must be >= 1");
  if (!(tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "tol must be positive");
  const std::size_t d = s.macro_dim();
  const std::size_t n = d * d;

  const AffineSet affine = build_constraints(s);
  SdpResult out;
  if (affine.inconsistency > tol) {
    // No linear map at all satisfies the diagram, so no CPTP one does.
    out.residual = affine.inconsistency;
    out.status = affine.inconsistency > 100.0 * tol ? SdpStatus::Infeasible : SdpStatus::Undecided;
    return out;
  }

  // Dykstra: y = P_affine(x + p), x = P_psd(y + q).
  const std::size_t dim = affine.origin.size();
  std::vector<double> x = affine.origin, y(dim), p(dim, 0.0), q(dim, 0.0), tmp(dim);
  std::deque<double> history;
  double residual = 0.0;
  for (int it = 1; it <= max_iter; ++it) {
    for (std::size_t i = 0; i < dim; ++i) tmp[i] = x[i] + p[i];
    y = affine.project(tmp);
    for (std::size_t i = 0; i < dim; ++i) p[i] = tmp[i] - y[i];
    for (std::size_t i = 0; i < dim; ++i) tmp[i] = y[i] + q[i];
    x = to_coords(project_psd(from_coords(tmp, n)));
    for (std::size_t i = 0; i < dim; ++i) q[i] = tmp[i] - x[i];

    residual = distance(x, y);
    out.iterations = it;
    if (residual <= tol) {
      out.status = SdpStatus::Feasible;
      out.residual = residual;
      out.choi = normalize_trace(ChoiMatrix{d, d, from_coords(x, n)});
      return out;
    }
    history.push_back(residual);
    if (history.size() > static_cast<std::size_t>(kSdpStallWindow)) {
      const double old = history.front();
      history.pop_front();
      if (residual > 100.0 * tol && std::abs(old - residual) < 1e-12 * old) {
        out.status = SdpStatus::Infeasible;
        out.residual = residual;
        return out;
      }
    }
  }
  out.status = SdpStatus::Undecided;
  out.residual = residual;
  return out;
}

std::optional<KrausChannel> construct_emergent(const Scenario& s, int max_iter, double tol) {
  const std::size_t d = s.macro_dim();
  const CMatrix t_cg = transfer(s.cg()).mat;
  const CMatrix lower = t_cg * kron(s.u().conj(), s.u());
  const TransferMatrix candidate{d, d, lower * pinv(t_cg)};
  if (frobenius_distance(candidate.mat * t_cg, lower) > kDiagramTol) return std::nullopt;

  ChoiMatrix choi = transfer_to_choi(candidate);
  choi.mat = 0.5 * (choi.mat + choi.mat.adjoint());
  const double min_eig = hermitian_eig(choi.mat).values.front();
  const double tp_dev =
      frobenius_distance(partial_trace(choi.mat, d, d, Subsystem::A), CMatrix::identity(d));

  std::optional<ChoiMatrix> accepted;
  if (min_eig >= -kDiagramTol && tp_dev <= kDiagramTol) {
    accepted = normalize_trace(ChoiMatrix{d, d, project_psd(choi.mat)});
  } else {
    SdpResult sdp = sdp_feasibility(s, max_iter, tol);
    if (sdp.status == SdpStatus::Feasible) accepted = std::move(sdp.choi);
  }
  if (!accepted) return std::nullopt;

  KrausChannel gamma = choi_to_kraus(*accepted);
  if (diagram_residual(s, gamma) > kEmergentDiagramTol) return std::nullopt;
  return gamma;
}

}  // namespace coarsekit
