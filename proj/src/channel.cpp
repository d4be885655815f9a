#include "coarsekit/channel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace coarsekit {

namespace {

std::string shape(std::size_t r, std::size_t c) { return std::to_string(r) + "x" + std::to_string(c); }

// Largest-modulus entry made real and nonnegative.
void fix_phase(CMatrix& k) {
  std::size_t best = 0;
  double best_abs = -1.0;
  for (std::size_t i = 0; i < k.size(); ++i) {
    const double a = std::abs(k.data()[i]);
    if (a > best_abs * (1.0 + 1e-12)) {
      best_abs = a;
      best = i;
    }
  }
  if (best_abs > 0.0) k *= std::conj(k.data()[best]) / best_abs;
}

CMatrix stack_vecs(const std::vector<CMatrix>& kraus) {
  const std::size_t len = kraus.front().size();
  CMatrix out(len, kraus.size());
  for (std::size_t j = 0; j < kraus.size(); ++j) out.set_column(j, vec(kraus[j]));
  return out;
}

}  // namespace

DensityMatrix::DensityMatrix(CMatrix mat, double tol) : mat_(std::move(mat)) {
  if (!mat_.is_square() || mat_.rows() == 0) throw Error(ErrorKind::DimensionMismatch, "density matrix must be square");
  if (!mat_.all_finite()) throw Error(ErrorKind::InvalidArgument, "density matrix has non-finite entries");
  if (frobenius_distance(mat_, mat_.adjoint()) > tol) throw Error(ErrorKind::NotHermitian, "density matrix");
  if (std::abs(mat_.trace() - 1.0) > tol) throw Error(ErrorKind::InvalidArgument, "density matrix trace != 1");
  const EigenDecomposition eig = hermitian_eig(mat_);
  if (eig.values.front() < -tol) throw Error(ErrorKind::InvalidArgument, "density matrix not positive semidefinite");
}

KrausMap::KrausMap(std::size_t din, std::size_t dout, std::vector<CMatrix> kraus)
    : din_(din), dout_(dout), kraus_(std::move(kraus)) {
  if (din_ == 0 || dout_ == 0) throw Error(ErrorKind::InvalidArgument, "channel dimensions must be positive");
  if (kraus_.empty()) throw Error(ErrorKind::InvalidArgument, "empty Kraus list");
  for (const CMatrix& k : kraus_) {
    if (k.rows() != dout_ || k.cols() != din_)
      throw Error(ErrorKind::DimensionMismatch, "Kraus operator is " + shape(k.rows(), k.cols()) + ", expected " +
                                                    shape(dout_, din_));
    if (!k.all_finite()) throw Error(ErrorKind::InvalidArgument, "Kraus operator has non-finite entries");
  }
}

CMatrix KrausMap::operator()(const CMatrix& x) const {
  if (x.rows() != din_ || x.cols() != din_) throw Error(ErrorKind::DimensionMismatch, "map input dimension");
  CMatrix out(dout_, dout_);
  for (const CMatrix& k : kraus_) out += k * x * k.adjoint();
  return out;
}

CMatrix KrausMap::kraus_gram() const {
  CMatrix out(din_, din_);
  for (const CMatrix& k : kraus_) out += k.adjoint() * k;
  return out;
}

KrausChannel::KrausChannel(std::size_t din, std::size_t dout, std::vector<CMatrix> kraus)
    : KrausMap(din, dout, std::move(kraus)) {
  const double dev = frobenius_distance(kraus_gram(), CMatrix::identity(din_));
  if (dev > kTraceTol)
    throw Error(ErrorKind::NotTracePreserving, "||sum K*K - I||_F = " + std::to_string(dev));
}

void ChoiMatrix::validate(double cp_tol, double tp_tol) const {
  if (mat.rows() != din * dout || !mat.is_square()) throw Error(ErrorKind::DimensionMismatch, "Choi matrix shape");
  if (!is_hermitian(mat, 1e-10)) throw Error(ErrorKind::NotHermitian, "Choi matrix");
  const EigenDecomposition eig = hermitian_eig(mat);
  if (eig.values.front() < -cp_tol)
    throw Error(ErrorKind::NotCP, "Choi eigenvalue " + std::to_string(eig.values.front()));
  const CMatrix reduced = partial_trace(mat, din, dout, Subsystem::A);
  if (frobenius_distance(reduced, CMatrix::identity(din)) > tp_tol)
    throw Error(ErrorKind::NotTracePreserving, "Choi partial trace differs from identity");
}

CMatrix TransferMatrix::operator()(const CMatrix& x) const {
  if (x.rows() != din || x.cols() != din) throw Error(ErrorKind::DimensionMismatch, "transfer input dimension");
  return unvec(mat * vec(x), dout, dout);
}

DensityMatrix apply(const KrausChannel& ch, const DensityMatrix& rho) {
  if (rho.dim() != ch.din())
    throw Error(ErrorKind::DimensionMismatch,
                "state of dim " + std::to_string(rho.dim()) + " into channel of din " + std::to_string(ch.din()));
  CMatrix out = ch(rho.mat());
  // Restore exact Hermiticity lost to rounding.
  out = 0.5 * (out + out.adjoint());
  return DensityMatrix(std::move(out), 1e-9);
}

KrausChannel identity_channel(std::size_t dim) { return KrausChannel(dim, dim, {CMatrix::identity(dim)}); }

KrausChannel unitary_channel(const CMatrix& u) {
  if (!is_unitary(u, 1e-9)) throw Error(ErrorKind::NotUnitary, "||U*U - I||_F exceeds 1e-9");
  return KrausChannel(u.rows(), u.rows(), {u});
}

ChoiMatrix kraus_to_choi(const KrausMap& ch) {
  const std::size_t n = ch.din() * ch.dout();
  ChoiMatrix c{ch.din(), ch.dout(), CMatrix(n, n)};
  for (const CMatrix& k : ch.kraus()) {
    const CMatrix v = vec(k);
    for (std::size_t i = 0; i < n; ++i) {
      const cplx vi = v(i, 0);
      if (vi == cplx{}) continue;
      for (std::size_t j = 0; j < n; ++j) c.mat(i, j) += vi * std::conj(v(j, 0));
    }
  }
  return c;
}

KrausChannel choi_to_kraus(const ChoiMatrix& c, double rank_tol) {
  if (c.mat.rows() != c.din * c.dout || !c.mat.is_square())
    throw Error(ErrorKind::DimensionMismatch, "Choi matrix shape");
  const EigenDecomposition eig = hermitian_eig(c.mat);
  if (eig.values.front() < -1e-8)
    throw Error(ErrorKind::NotCP, "Choi eigenvalue " + std::to_string(eig.values.front()));
  const double top = std::max(eig.values.back(), 0.0);
  std::vector<CMatrix> kraus;
  for (std::size_t r = eig.values.size(); r-- > 0;) {
    const double lambda = eig.values[r];
    if (lambda <= rank_tol * top || lambda <= 0.0) break;
    CMatrix k = unvec(eig.vectors.column(r), c.dout, c.din);
    k *= std::sqrt(lambda);
    fix_phase(k);
    kraus.push_back(std::move(k));
  }
  if (kraus.empty()) throw Error(ErrorKind::NotTracePreserving, "Choi matrix is zero");
  return KrausChannel(c.din, c.dout, std::move(kraus));
}

TransferMatrix transfer(const KrausMap& ch) {
  TransferMatrix t{ch.din(), ch.dout(), CMatrix(ch.dout() * ch.dout(), ch.din() * ch.din())};
  for (const CMatrix& k : ch.kraus()) t.mat += kron(k.conj(), k);
  return t;
}

// T(i + a*dout, j + b*din) = C(j*dout + i, b*dout + a)
TransferMatrix choi_to_transfer(const ChoiMatrix& c) {
  const std::size_t din = c.din, dout = c.dout;
  TransferMatrix t{din, dout, CMatrix(dout * dout, din * din)};
  for (std::size_t i = 0; i < dout; ++i)
    for (std::size_t a = 0; a < dout; ++a)
      for (std::size_t j = 0; j < din; ++j)
        for (std::size_t b = 0; b < din; ++b) t.mat(i + a * dout, j + b * din) = c.mat(j * dout + i, b * dout + a);
  return t;
}

ChoiMatrix transfer_to_choi(const TransferMatrix& t) {
  const std::size_t din = t.din, dout = t.dout;
  if (t.mat.rows() != dout * dout || t.mat.cols() != din * din)
    throw Error(ErrorKind::DimensionMismatch, "transfer matrix shape");
  ChoiMatrix c{din, dout, CMatrix(din * dout, din * dout)};
  for (std::size_t i = 0; i < dout; ++i)
    for (std::size_t a = 0; a < dout; ++a)
      for (std::size_t j = 0; j < din; ++j)
        for (std::size_t b = 0; b < din; ++b) c.mat(j * dout + i, b * dout + a) = t.mat(i + a * dout, j + b * din);
  return c;
}

CMatrix apply_choi(const ChoiMatrix& c, const CMatrix& x) {
  if (x.rows() != c.din || x.cols() != c.din) throw Error(ErrorKind::DimensionMismatch, "Choi input dimension");
  CMatrix out(c.dout, c.dout);
  for (std::size_t i = 0; i < c.dout; ++i)
    for (std::size_t ip = 0; ip < c.dout; ++ip) {
      cplx acc = 0.0;
      for (std::size_t j = 0; j < c.din; ++j)
        for (std::size_t jp = 0; jp < c.din; ++jp) acc += c.mat(j * c.dout + i, jp * c.dout + ip) * x(j, jp);
      out(i, ip) = acc;
    }
  return out;
}

KrausChannel compose(const KrausChannel& later, const KrausChannel& earlier) {
  if (earlier.dout() != later.din())
    throw Error(ErrorKind::DimensionMismatch, "compose: earlier.dout " + std::to_string(earlier.dout()) +
                                                  " != later.din " + std::to_string(later.din()));
  std::vector<CMatrix> kraus;
  kraus.reserve(later.kraus().size() * earlier.kraus().size());
  for (const CMatrix& l : later.kraus())
    for (const CMatrix& e : earlier.kraus()) kraus.push_back(l * e);
  return KrausChannel(earlier.din(), later.dout(), std::move(kraus));
}

KrausMap dual(const KrausMap& ch) {
  std::vector<CMatrix> kraus;
  kraus.reserve(ch.kraus().size());
  for (const CMatrix& k : ch.kraus()) kraus.push_back(k.adjoint());
  return KrausMap(ch.dout(), ch.din(), std::move(kraus));
}

KrausChannel extend(const KrausChannel& ch, std::size_t ancilla_dim) {
  if (ancilla_dim == 1) return ch;
  const CMatrix id = CMatrix::identity(ancilla_dim);
  std::vector<CMatrix> kraus;
  for (const CMatrix& k : ch.kraus()) kraus.push_back(kron(k, id));
  return KrausChannel(ch.din() * ancilla_dim, ch.dout() * ancilla_dim, std::move(kraus));
}

double choi_distance(const KrausMap& a, const KrausMap& b) {
  if (a.din() != b.din() || a.dout() != b.dout())
    throw Error(ErrorKind::DimensionMismatch, "channels act between different spaces");
  return frobenius_distance(kraus_to_choi(a).mat, kraus_to_choi(b).mat);
}

bool channels_equal(const KrausMap& a, const KrausMap& b, double tol) { return choi_distance(a, b) <= tol; }

std::vector<CMatrix> pad_kraus(std::vector<CMatrix> kraus, std::size_t count) {
  if (kraus.empty()) throw Error(ErrorKind::InvalidArgument, "cannot pad an empty Kraus list");
  const std::size_t r = kraus.front().rows(), c = kraus.front().cols();
  while (kraus.size() < count) kraus.emplace_back(r, c);
  return kraus;
}

double mixing_residual(const std::vector<CMatrix>& a, const std::vector<CMatrix>& b, const CMatrix& w) {
  const std::size_t n = std::max(a.size(), b.size());
  if (w.rows() != n || w.cols() != n) throw Error(ErrorKind::DimensionMismatch, "mixing matrix size");
  const auto pa = pad_kraus(a, n);
  const auto pb = pad_kraus(b, n);
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    CMatrix mixed(pa[i].rows(), pa[i].cols());
    for (std::size_t j = 0; j < n; ++j) mixed += w(i, j) * pb[j];
    worst = std::max(worst, frobenius_distance(pa[i], mixed));
  }
  return worst;
}

CMatrix connecting_unitary(const KrausMap& a, const KrausMap& b, double tol) {
  const double dist = choi_distance(a, b);
  if (dist > tol) throw Error(ErrorKind::NotEquivalent, "Choi distance " + std::to_string(dist));
  const std::size_t n = std::max(a.kraus().size(), b.kraus().size());
  const CMatrix va = stack_vecs(pad_kraus(a.kraus(), n));
  const CMatrix vb = stack_vecs(pad_kraus(b.kraus(), n));
  // Orthogonal Procrustes: Q = argmin ||va - vb Q|| over unitaries; the
  // minimum is zero when the Choi matrices agree, and then W = Q^T.
  const Svd d = svd(vb.adjoint() * va);
  const CMatrix w = (d.u * d.v.adjoint()).transpose();
  const double res = mixing_residual(a.kraus(), b.kraus(), w);
  if (res > 10.0 * tol) throw Error(ErrorKind::NumericalFailure, "connecting unitary residual " + std::to_string(res));
  return w;
}

KrausChannel random_channel(std::size_t din, std::size_t dout, std::size_t kraus_count, Rng& rng) {
  kraus_count = std::max(kraus_count, (din + dout - 1) / dout);
  const CMatrix iso = haar_isometry(dout * kraus_count, din, rng);
  std::vector<CMatrix> kraus;
  for (std::size_t k = 0; k < kraus_count; ++k) {
    CMatrix block(dout, din);
    for (std::size_t i = 0; i < dout; ++i)
      for (std::size_t j = 0; j < din; ++j) block(i, j) = iso(k * dout + i, j);
    kraus.push_back(std::move(block));
  }
  return KrausChannel(din, dout, std::move(kraus));
}

}  // namespace coarsekit
