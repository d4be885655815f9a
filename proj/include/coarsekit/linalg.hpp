#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

#include "coarsekit/error.hpp"

namespace coarsekit {

using cplx = std::complex<double>;

/// Dense complex matrix, row-major. Every operator in the project (states,
/// Kraus operators, unitaries, transfer and Choi matrices) is one of these.
class CMatrix {
 public:
  CMatrix() = default;
  CMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  CMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> data);
  CMatrix(std::initializer_list<std::initializer_list<cplx>> init);

  static CMatrix identity(std::size_t n);
  static CMatrix zeros(std::size_t rows, std::size_t cols) { return CMatrix(rows, cols); }
  static CMatrix diagonal(std::span<const double> values);
  static CMatrix diagonal(std::span<const cplx> values);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool is_square() const noexcept { return rows_ == cols_; }

  cplx& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const cplx& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<cplx> data() noexcept { return data_; }
  std::span<const cplx> data() const noexcept { return data_; }

  CMatrix adjoint() const;
  CMatrix transpose() const;
  CMatrix conj() const;
  cplx trace() const;

  CMatrix column(std::size_t j) const;
  void set_column(std::size_t j, const CMatrix& v);
  /// Columns [first, first + count).
  CMatrix columns(std::size_t first, std::size_t count) const;

  bool all_finite() const noexcept;

  CMatrix& operator+=(const CMatrix& other);
  CMatrix& operator-=(const CMatrix& other);
  CMatrix& operator*=(cplx scalar);

  friend bool operator==(const CMatrix&, const CMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cplx> data_;
};

CMatrix operator+(CMatrix a, const CMatrix& b);
CMatrix operator-(CMatrix a, const CMatrix& b);
CMatrix operator*(const CMatrix& a, const CMatrix& b);
CMatrix operator*(cplx scalar, CMatrix a);
CMatrix operator*(CMatrix a, cplx scalar);

double frobenius_norm(const CMatrix& a);
/// Frobenius norm of a - b without materializing the difference.
double frobenius_distance(const CMatrix& a, const CMatrix& b);
/// Hilbert-Schmidt inner product tr(a* b).
cplx inner(const CMatrix& a, const CMatrix& b);

bool is_hermitian(const CMatrix& a, double rel_tol = 1e-10);
bool is_unitary(const CMatrix& a, double tol = 1e-9);

CMatrix kron(const CMatrix& a, const CMatrix& b);

enum class Subsystem { A, B };
/// Partial trace of an operator on A (x) B, keeping the named factor.
CMatrix partial_trace(const CMatrix& a, std::size_t dim_a, std::size_t dim_b, Subsystem keep);

/// Column-stacking vectorization: vec(A)[i + j*rows] = A(i, j), so that
/// vec(A X B) = (B^T (x) A) vec(X).
CMatrix vec(const CMatrix& a);
CMatrix unvec(const CMatrix& v, std::size_t rows, std::size_t cols);

CMatrix ket(std::size_t dim, std::size_t index);
CMatrix outer(const CMatrix& x, const CMatrix& y);

struct EigenDecomposition {
  std::vector<double> values;  // ascending
  CMatrix vectors;             // columns are eigenvectors
};

/// Cyclic Jacobi eigensolver for Hermitian matrices.
EigenDecomposition hermitian_eig(const CMatrix& a);

struct Svd {
  CMatrix u;              // rows x rows, unitary
  std::vector<double> s;  // min(rows, cols) values, descending
  CMatrix v;              // cols x cols, unitary
};

/// Full SVD a = u * diag(s) * v^*, computed by one-sided Jacobi.
Svd svd(const CMatrix& a);

inline constexpr double kDefaultRankTol = 1e-10;

/// Moore-Penrose pseudoinverse; singular values below rank_tol * s_max are
/// treated as zero.
CMatrix pinv(const CMatrix& a, double rank_tol = kDefaultRankTol);

std::size_t numerical_rank(std::span<const double> singular_values, double rank_tol = kDefaultRankTol);

/// Orthonormal basis (as columns) of the null space of a.
CMatrix kernel_basis(const CMatrix& a, double rank_tol = kDefaultRankTol);

double trace_norm(const CMatrix& a);
double spectral_norm(const CMatrix& a);

/// Applies f to the eigenvalues of a Hermitian matrix.
template <typename F>
CMatrix hermitian_function(const CMatrix& a, F&& f) {
  EigenDecomposition eig = hermitian_eig(a);
  std::vector<cplx> mapped;
  mapped.reserve(eig.values.size());
  for (double lambda : eig.values) mapped.push_back(f(lambda));
  return eig.vectors * CMatrix::diagonal(std::span<const cplx>(mapped)) * eig.vectors.adjoint();
}

/// Extends orthonormal columns q (n x k) to an n x n unitary.
CMatrix complete_orthonormal(const CMatrix& q);

}  // namespace coarsekit
