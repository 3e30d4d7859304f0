#ifndef SPECTRALOSS_LEGENDRE_HPP
#define SPECTRALOSS_LEGENDRE_HPP

#include <vector>

namespace spectraloss {

/// Fully normalized associated Legendre functions Pbar_k^l(mu), without the
/// Condon-Shortley phase, normalized so that
///   integral_{-1}^{1} Pbar_k^l(mu)^2 dmu / 2 = 1.
/// Computed by the stable three-term recurrence in k at fixed l; all values
/// stay O(sqrt(2k+1)) and satisfy the addition theorem
///   sum_l weight(l) Pbar_k^l(mu)^2 = 2k+1.

/// Pbar_k^l(mu) for k = l..kmax (column at fixed l).
std::vector<double> legendre_column(int l, int kmax, double mu);

/// Precomputed Pbar values for one set of quadrature nodes.
class LegendreTable {
 public:
  LegendreTable(const std::vector<double>& mu, int kmax);

  int kmax() const { return kmax_; }
  int nnodes() const { return nnodes_; }

  /// Pointer to Pbar_k^l at all nodes, contiguous over node index.
  const double* row(int k, int l) const {
    return &values_[l][static_cast<size_t>(k - l) * nnodes_];
  }

 private:
  int kmax_;
  int nnodes_;
  std::vector<std::vector<double>> values_;  // [l][(k-l)*nnodes + i]
};

}  // namespace spectraloss

#endif
