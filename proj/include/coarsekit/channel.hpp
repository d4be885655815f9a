#pragma once

#include <cstddef>
#include <vector>

#include "coarsekit/linalg.hpp"
#include "coarsekit/random.hpp"

namespace coarsekit {

/// Unit-trace positive semidefinite operator. Construction validates.
class DensityMatrix {
 public:
  explicit DensityMatrix(CMatrix mat, double tol = 1e-10);

  std::size_t dim() const noexcept { return mat_.rows(); }
  const CMatrix& mat() const noexcept { return mat_; }

 private:
  CMatrix mat_;
};

/// Completely positive map given by Kraus operators, x -> sum_k K x K^*.
/// No trace condition; duals of channels are of this kind.
class KrausMap {
 public:
  KrausMap(std::size_t din, std::size_t dout, std::vector<CMatrix> kraus);

  std::size_t din() const noexcept { return din_; }
  std::size_t dout() const noexcept { return dout_; }
  const std::vector<CMatrix>& kraus() const noexcept { return kraus_; }

  /// Acts on arbitrary din x din operators, not only states.
  CMatrix operator()(const CMatrix& x) const;

  /// Sum_k K_k^* K_k.
  CMatrix kraus_gram() const;

 protected:
  std::size_t din_;
  std::size_t dout_;
  std::vector<CMatrix> kraus_;
};

/// Trace-preserving KrausMap: || sum_k K_k^* K_k - I ||_F <= 1e-9.
class KrausChannel : public KrausMap {
 public:
  static constexpr double kTraceTol = 1e-9;

  KrausChannel(std::size_t din, std::size_t dout, std::vector<CMatrix> kraus);
};

struct ChoiMatrix {
  std::size_t din = 0;
  std::size_t dout = 0;
  /// (din*dout) square, indexed (j*dout + i) with j the input and i the
  /// output level: sum_k vec(K_k) vec(K_k)^*.
  CMatrix mat;

  /// Throws NotHermitian / NotCP / NotTracePreserving.
  void validate(double cp_tol = 1e-8, double tp_tol = 1e-8) const;
};

struct TransferMatrix {
  std::size_t din = 0;
  std::size_t dout = 0;
  /// dout^2 x din^2, acting on column-stacked operators.
  CMatrix mat;

  CMatrix operator()(const CMatrix& x) const;
};

DensityMatrix apply(const KrausChannel& ch, const DensityMatrix& rho);

KrausChannel identity_channel(std::size_t dim);
KrausChannel unitary_channel(const CMatrix& u);

ChoiMatrix kraus_to_choi(const KrausMap& ch);
KrausChannel choi_to_kraus(const ChoiMatrix& c, double rank_tol = kDefaultRankTol);

TransferMatrix transfer(const KrausMap& ch);
TransferMatrix choi_to_transfer(const ChoiMatrix& c);
ChoiMatrix transfer_to_choi(const TransferMatrix& t);

/// Output of the map encoded by a Choi matrix, by direct index contraction.
CMatrix apply_choi(const ChoiMatrix& c, const CMatrix& x);

/// later o earlier, Kraus set {L_i E_j}.
KrausChannel compose(const KrausChannel& later, const KrausChannel& earlier);

/// Heisenberg-picture map with Kraus {K_k^*}; unital when ch is TP.
KrausMap dual(const KrausMap& ch);

/// ch (x) id_n.
KrausChannel extend(const KrausChannel& ch, std::size_t ancilla_dim);

inline constexpr double kChannelEqualTol = 1e-8;

double choi_distance(const KrausMap& a, const KrausMap& b);
bool channels_equal(const KrausMap& a, const KrausMap& b, double tol = kChannelEqualTol);

/// Pads with zero operators up to `count` entries.
std::vector<CMatrix> pad_kraus(std::vector<CMatrix> kraus, std::size_t count);

/// N x N unitary W with K^a_i = sum_j W_ij K^b_j, N the larger Kraus count
/// (the shorter list is padded with zeros). Throws NotEquivalent when the
/// channels differ and NumericalFailure if the residual exceeds 10 * tol.
CMatrix connecting_unitary(const KrausMap& a, const KrausMap& b, double tol = kChannelEqualTol);

/// max_i || K^a_i - sum_j W_ij K^b_j ||_F over the padded lists.
double mixing_residual(const std::vector<CMatrix>& a, const std::vector<CMatrix>& b, const CMatrix& w);

/// Random CPTP map via a Haar isometry D -> d * kraus_count (Stinespring).
KrausChannel random_channel(std::size_t din, std::size_t dout, std::size_t kraus_count, Rng& rng);

}  // namespace coarsekit
