#include "coarsekit/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace coarsekit {

namespace {

constexpr int kMaxSweeps = 100;

void require(bool ok, ErrorKind kind, const char* what) {
  if (!ok) throw Error(kind, what);
}

std::string dims(const CMatrix& a) {
  return std::to_string(a.rows()) + "x" + std::to_string(a.cols());
}

// Real Givens rotation on columns p, q:  p <- c p - s q,  q <- s p + c q.
void rotate_columns(CMatrix& a, std::size_t p, std::size_t q, double c, double s) {
  for (std::size_t k = 0; k < a.rows(); ++k) {
    const cplx akp = a(k, p);
    const cplx akq = a(k, q);
    a(k, p) = c * akp - s * akq;
    a(k, q) = s * akp + c * akq;
  }
}

void rotate_rows(CMatrix& a, std::size_t p, std::size_t q, double c, double s) {
  for (std::size_t k = 0; k < a.cols(); ++k) {
    const cplx apk = a(p, k);
    const cplx aqk = a(q, k);
    a(p, k) = c * apk - s * aqk;
    a(q, k) = s * apk + c * aqk;
  }
}

void scale_column(CMatrix& a, std::size_t j, cplx f) {
  for (std::size_t k = 0; k < a.rows(); ++k) a(k, j) *= f;
}

void scale_row(CMatrix& a, std::size_t i, cplx f) {
  for (std::size_t k = 0; k < a.cols(); ++k) a(i, k) *= f;
}

// Smaller root of t^2 + 2 zeta t - 1 = 0.
double jacobi_tangent(double zeta) {
  const double sign = zeta >= 0.0 ? 1.0 : -1.0;
  return sign / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
}

// One-sided Jacobi for rows >= cols.
Svd svd_tall(const CMatrix& a) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  // Columns of a and of v stored contiguously.
  std::vector<std::vector<cplx>> g(n, std::vector<cplx>(m)), vt(n, std::vector<cplx>(n, 0.0));
  double total = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    vt[j][j] = 1.0;
    for (std::size_t k = 0; k < m; ++k) {
      g[j][k] = a(k, j);
      total += std::norm(g[j][k]);
    }
  }
  // Columns below this are numerical zero; rotating them only churns noise.
  const double negligible = 1e-34 * total;

  auto rotate = [](std::vector<cplx>& x, std::vector<cplx>& y, cplx phase, double c, double s) {
    for (std::size_t k = 0; k < x.size(); ++k) {
      const cplx xk = x[k];
      const cplx yk = y[k] * phase;
      x[k] = c * xk - s * yk;
      y[k] = s * xk + c * yk;
    }
  };

  int sweep = 0;
  for (;; ++sweep) {
    if (sweep >= kMaxSweeps) throw Error(ErrorKind::NoConvergence, "one-sided Jacobi SVD exceeded sweep cap");
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double alpha = 0.0, beta = 0.0;
        cplx gamma = 0.0;
        const cplx* gp = g[p].data();
        const cplx* gq = g[q].data();
        for (std::size_t k = 0; k < m; ++k) {
          alpha += std::norm(gp[k]);
          beta += std::norm(gq[k]);
          gamma += std::conj(gp[k]) * gq[k];
        }
        if (alpha <= negligible || beta <= negligible) continue;
        const double mag = std::abs(gamma);
        if (mag == 0.0 || mag <= 1e-15 * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const cplx phase = std::conj(gamma / mag);
        const double t = jacobi_tangent((beta - alpha) / (2.0 * mag));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        rotate(g[p], g[q], phase, c, s);
        rotate(vt[p], vt[q], phase, c, s);
      }
    }
    if (!rotated) break;
  }

  std::vector<double> norms(n);
  for (std::size_t j = 0; j < n; ++j) {
    double acc = 0.0;
    for (const cplx& z : g[j]) acc += std::norm(z);
    norms[j] = std::sqrt(acc);
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return norms[x] > norms[y]; });

  Svd out;
  out.s.resize(n);
  out.v = CMatrix(n, n);
  const double smax = n > 0 ? norms[order[0]] : 0.0;
  std::size_t accepted = 0;
  CMatrix ubuf(m, n);
  for (std::size_t r = 0; r < n; ++r) {
    out.s[r] = norms[order[r]];
    for (std::size_t k = 0; k < n; ++k) out.v(k, r) = vt[order[r]][k];
  }
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t j = order[r];
    if (norms[j] > 0.0 && norms[j] > 1e-300 * smax) {
      CMatrix col(m, 1);
      for (std::size_t k = 0; k < m; ++k) col(k, 0) = g[j][k];
      col *= 1.0 / norms[j];
      // Re-orthogonalize against accepted columns; drop if it collapses.
      for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t l = 0; l < accepted; ++l) {
          cplx proj = 0.0;
          for (std::size_t k = 0; k < m; ++k) proj += std::conj(ubuf(k, l)) * col(k, 0);
          for (std::size_t k = 0; k < m; ++k) col(k, 0) -= proj * ubuf(k, l);
        }
      }
      const double nrm = frobenius_norm(col);
      if (nrm > 0.5) {
        col *= 1.0 / nrm;
        ubuf.set_column(accepted, col);
        ++accepted;
        continue;
      }
    }
    break;  // remaining columns have (numerically) zero singular values
  }
  out.u = complete_orthonormal(ubuf.columns(0, accepted));
  return out;
}

}  // namespace

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::NotUnitary: return "NotUnitary";
    case ErrorKind::NotCP: return "NotCP";
    case ErrorKind::NotTracePreserving: return "NotTracePreserving";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NotEquivalent: return "NotEquivalent";
    case ErrorKind::NumericalFailure: return "NumericalFailure";
    case ErrorKind::MethodDisagreement: return "MethodDisagreement";
    case ErrorKind::ZeroMarginal: return "ZeroMarginal";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Parse: return "Parse";
  }
  return "Unknown";
}

CMatrix::CMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  require(data_.size() == rows_ * cols_, ErrorKind::DimensionMismatch, "entry count does not match shape");
}

CMatrix::CMatrix(std::initializer_list<std::initializer_list<cplx>> init) {
  rows_ = init.size();
  cols_ = rows_ ? init.begin()->size() : 0;
  data_.reserve(rows_ * cols_);
  for (const auto& row : init) {
    require(row.size() == cols_, ErrorKind::DimensionMismatch, "ragged matrix literal");
    data_.insert(data_.end(), row.begin(), row.end());
  }
}

CMatrix CMatrix::identity(std::size_t n) {
  CMatrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) out(i, i) = 1.0;
  return out;
}

CMatrix CMatrix::diagonal(std::span<const double> values) {
  CMatrix out(values.size(), values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out(i, i) = values[i];
  return out;
}

CMatrix CMatrix::diagonal(std::span<const cplx> values) {
  CMatrix out(values.size(), values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out(i, i) = values[i];
  return out;
}

CMatrix CMatrix::adjoint() const {
  CMatrix out(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out(j, i) = std::conj((*this)(i, j));
  return out;
}

CMatrix CMatrix::transpose() const {
  CMatrix out(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
  return out;
}

CMatrix CMatrix::conj() const {
  CMatrix out = *this;
  for (auto& z : out.data_) z = std::conj(z);
  return out;
}

cplx CMatrix::trace() const {
  require(is_square(), ErrorKind::DimensionMismatch, "trace of non-square matrix");
  cplx acc = 0.0;
  for (std::size_t i = 0; i < rows_; ++i) acc += (*this)(i, i);
  return acc;
}

CMatrix CMatrix::column(std::size_t j) const {
  CMatrix out(rows_, 1);
  for (std::size_t i = 0; i < rows_; ++i) out(i, 0) = (*this)(i, j);
  return out;
}

void CMatrix::set_column(std::size_t j, const CMatrix& v) {
  require(v.rows() == rows_ && v.cols() == 1, ErrorKind::DimensionMismatch, "set_column shape");
  for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = v(i, 0);
}

CMatrix CMatrix::columns(std::size_t first, std::size_t count) const {
  require(first + count <= cols_, ErrorKind::IndexOutOfRange, "column range");
  CMatrix out(rows_, count);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < count; ++j) out(i, j) = (*this)(i, first + j);
  return out;
}

bool CMatrix::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(),
                     [](const cplx& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

CMatrix& CMatrix::operator+=(const CMatrix& other) {
  require(rows_ == other.rows_ && cols_ == other.cols_, ErrorKind::DimensionMismatch, "matrix sum shape");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
  return *this;
}

CMatrix& CMatrix::operator-=(const CMatrix& other) {
  require(rows_ == other.rows_ && cols_ == other.cols_, ErrorKind::DimensionMismatch, "matrix difference shape");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
  return *this;
}

CMatrix& CMatrix::operator*=(cplx scalar) {
  for (auto& z : data_) z *= scalar;
  return *this;
}

CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }
CMatrix operator*(cplx scalar, CMatrix a) { return a *= scalar; }
CMatrix operator*(CMatrix a, cplx scalar) { return a *= scalar; }

CMatrix operator*(const CMatrix& a, const CMatrix& b) {
  if (a.cols() != b.rows()) throw Error(ErrorKind::DimensionMismatch, "product " + dims(a) + " * " + dims(b));
  CMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const cplx aik = a(i, k);
      if (aik == cplx{}) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  }
  return out;
}

double frobenius_norm(const CMatrix& a) {
  double acc = 0.0;
  for (const cplx& z : a.data()) acc += std::norm(z);
  return std::sqrt(acc);
}

double frobenius_distance(const CMatrix& a, const CMatrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), ErrorKind::DimensionMismatch, "distance shape");
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) acc += std::norm(a.data()[k] - b.data()[k]);
  return std::sqrt(acc);
}

cplx inner(const CMatrix& a, const CMatrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), ErrorKind::DimensionMismatch, "inner product shape");
  cplx acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) acc += std::conj(a.data()[k]) * b.data()[k];
  return acc;
}

bool is_hermitian(const CMatrix& a, double rel_tol) {
  if (!a.is_square()) return false;
  double diff = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) diff += std::norm(a(i, j) - std::conj(a(j, i)));
  return std::sqrt(diff) <= rel_tol * frobenius_norm(a);
}

bool is_unitary(const CMatrix& a, double tol) {
  if (!a.is_square()) return false;
  return frobenius_distance(a.adjoint() * a, CMatrix::identity(a.rows())) <= tol;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  const std::size_t rb = b.rows(), cb = b.cols();
  CMatrix out(a.rows() * rb, a.cols() * cb);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const cplx aij = a(i, j);
      for (std::size_t k = 0; k < rb; ++k)
        for (std::size_t l = 0; l < cb; ++l) out(i * rb + k, j * cb + l) = aij * b(k, l);
    }
  return out;
}

CMatrix partial_trace(const CMatrix& a, std::size_t dim_a, std::size_t dim_b, Subsystem keep) {
  if (!a.is_square() || a.rows() != dim_a * dim_b)
    throw Error(ErrorKind::DimensionMismatch, "partial trace of " + dims(a) + " over " + std::to_string(dim_a) +
                                                  "x" + std::to_string(dim_b));
  if (keep == Subsystem::A) {
    CMatrix out(dim_a, dim_a);
    for (std::size_t i = 0; i < dim_a; ++i)
      for (std::size_t j = 0; j < dim_a; ++j)
        for (std::size_t k = 0; k < dim_b; ++k) out(i, j) += a(i * dim_b + k, j * dim_b + k);
    return out;
  }
  CMatrix out(dim_b, dim_b);
  for (std::size_t k = 0; k < dim_b; ++k)
    for (std::size_t l = 0; l < dim_b; ++l)
      for (std::size_t i = 0; i < dim_a; ++i) out(k, l) += a(i * dim_b + k, i * dim_b + l);
  return out;
}

CMatrix vec(const CMatrix& a) {
  CMatrix out(a.size(), 1);
  for (std::size_t j = 0; j < a.cols(); ++j)
    for (std::size_t i = 0; i < a.rows(); ++i) out(i + j * a.rows(), 0) = a(i, j);
  return out;
}

CMatrix unvec(const CMatrix& v, std::size_t rows, std::size_t cols) {
  require(v.size() == rows * cols, ErrorKind::DimensionMismatch, "unvec length");
  CMatrix out(rows, cols);
  for (std::size_t j = 0; j < cols; ++j)
    for (std::size_t i = 0; i < rows; ++i) out(i, j) = v.data()[i + j * rows];
  return out;
}

CMatrix ket(std::size_t dim, std::size_t index) {
  require(index < dim, ErrorKind::IndexOutOfRange, "basis index");
  CMatrix out(dim, 1);
  out(index, 0) = 1.0;
  return out;
}

CMatrix outer(const CMatrix& x, const CMatrix& y) { return x * y.adjoint(); }

EigenDecomposition hermitian_eig(const CMatrix& a) {
  require(a.is_square(), ErrorKind::DimensionMismatch, "eigendecomposition of non-square matrix");
  require(a.all_finite(), ErrorKind::InvalidArgument, "non-finite entries");
  if (!is_hermitian(a, 1e-10)) throw Error(ErrorKind::NotHermitian, "matrix is not Hermitian");

  const std::size_t n = a.rows();
  CMatrix h = 0.5 * (a + a.adjoint());
  for (std::size_t i = 0; i < n; ++i) h(i, i) = h(i, i).real();
  CMatrix v = CMatrix::identity(n);
  const double scale = frobenius_norm(h);

  for (int sweep = 0;; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) off += std::norm(h(i, j));
    if (std::sqrt(off) <= 1e-14 * scale) break;
    if (sweep >= kMaxSweeps) throw Error(ErrorKind::NoConvergence, "Jacobi eigensolver exceeded sweep cap");

    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const cplx apq = h(p, q);
        const double mag = std::abs(apq);
        if (mag == 0.0) continue;
        // Rotate the phase of q so that h(p, q) becomes real and positive.
        const cplx phase = std::conj(apq / mag);
        scale_column(h, q, phase);
        scale_row(h, q, std::conj(phase));
        scale_column(v, q, phase);

        const double t = jacobi_tangent((h(q, q).real() - h(p, p).real()) / (2.0 * mag));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        rotate_columns(h, p, q, c, s);
        rotate_rows(h, p, q, c, s);
        rotate_columns(v, p, q, c, s);
        h(p, q) = 0.0;
        h(q, p) = 0.0;
        h(p, p) = h(p, p).real();
        h(q, q) = h(q, q).real();
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return h(x, x).real() < h(y, y).real(); });
  EigenDecomposition out;
  out.values.reserve(n);
  out.vectors = CMatrix(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    out.values.push_back(h(order[r], order[r]).real());
    for (std::size_t k = 0; k < n; ++k) out.vectors(k, r) = v(k, order[r]);
  }
  return out;
}

Svd svd(const CMatrix& a) {
  require(a.all_finite(), ErrorKind::InvalidArgument, "non-finite entries");
  if (a.rows() >= a.cols()) return svd_tall(a);
  // a^* = U S V^*  =>  a = V S U^*
  Svd t = svd_tall(a.adjoint());
  return Svd{std::move(t.v), std::move(t.s), std::move(t.u)};
}

std::size_t numerical_rank(std::span<const double> singular_values, double rank_tol) {
  if (singular_values.empty()) return 0;
  const double smax = *std::max_element(singular_values.begin(), singular_values.end());
  if (smax <= 0.0) return 0;
  return static_cast<std::size_t>(std::count_if(singular_values.begin(), singular_values.end(),
                                                [&](double s) { return s > rank_tol * smax; }));
}

CMatrix pinv(const CMatrix& a, double rank_tol) {
  if (!(rank_tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "rank_tol must be positive");
  const Svd d = svd(a);
  const std::size_t r = numerical_rank(d.s, rank_tol);
  CMatrix out(a.cols(), a.rows());
  for (std::size_t k = 0; k < r; ++k) {
    const double inv = 1.0 / d.s[k];
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const cplx vik = d.v(i, k) * inv;
      for (std::size_t j = 0; j < a.rows(); ++j) out(i, j) += vik * std::conj(d.u(j, k));
    }
  }
  return out;
}

CMatrix kernel_basis(const CMatrix& a, double rank_tol) {
  const Svd d = svd(a);
  const std::size_t r = numerical_rank(d.s, rank_tol);
  return d.v.columns(r, a.cols() - r);
}

double trace_norm(const CMatrix& a) {
  const EigenDecomposition eig = hermitian_eig(a);
  double acc = 0.0;
  for (double lambda : eig.values) acc += std::abs(lambda);
  return acc;
}

double spectral_norm(const CMatrix& a) {
  if (a.size() == 0) return 0.0;
  const Svd d = svd(a);
  return d.s.empty() ? 0.0 : d.s.front();
}

CMatrix complete_orthonormal(const CMatrix& q) {
  const std::size_t n = q.rows();
  require(q.cols() <= n, ErrorKind::DimensionMismatch, "more columns than rows");
  CMatrix out(n, n);
  std::size_t filled = 0;
  for (; filled < q.cols(); ++filled) out.set_column(filled, q.column(filled));

  // r = I - Q Q^*; its largest column is the best-conditioned new direction.
  CMatrix r = CMatrix::identity(n) - q * q.adjoint();
  while (filled < n) {
    std::size_t best = 0;
    double best_norm = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t k = 0; k < n; ++k) acc += std::norm(r(k, i));
      if (acc > best_norm) {
        best_norm = acc;
        best = i;
      }
    }
    CMatrix x = r.column(best);
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t l = 0; l < filled; ++l) {
        cplx proj = 0.0;
        for (std::size_t k = 0; k < n; ++k) proj += std::conj(out(k, l)) * x(k, 0);
        for (std::size_t k = 0; k < n; ++k) x(k, 0) -= proj * out(k, l);
      }
      x *= 1.0 / frobenius_norm(x);
    }
    out.set_column(filled, x);
    ++filled;
    // r <- r - x (x^* r)
    const CMatrix xr = x.adjoint() * r;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) r(i, j) -= x(i, 0) * xr(0, j);
  }
  return out;
}

}  // namespace coarsekit
