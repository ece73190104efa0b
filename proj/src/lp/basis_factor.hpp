#pragma once

#include <vector>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

namespace recdr::lp::detail {

/// Sparse column with explicit row indices.
struct SparseColumn {
  std::vector<int> index;
  std::vector<double> value;
};

/// LU factorization of a simplex basis with product-form (eta) updates.
///
/// After k updates the represented matrix is B_0 E_1 ... E_k, where B_0 is the
/// last refactorized basis and each E replaces one column.
class BasisFactor {
 public:
  /// Factorizes the m x m matrix whose columns are given. Returns false if the
  /// matrix is numerically singular.
  bool factorize(int m, const std::vector<SparseColumn>& columns);

  /// v <- B^{-1} v
  void ftran(std::vector<double>& v) const;
  /// v <- B^{-T} v
  void btran(std::vector<double>& v) const;

  /// Records the replacement of basis position r by a column whose FTRAN
  /// image is alpha.
  void update(int r, const std::vector<double>& alpha);

  int num_updates() const { return static_cast<int>(etas_.size()); }
  long eta_nonzeros() const { return eta_nnz_; }

 private:
  struct Eta {
    int pivot_row = 0;
    double pivot = 1.0;
    std::vector<int> index;  // excludes pivot_row
    std::vector<double> value;
  };

  int m_ = 0;
  mutable Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu_;  // transpose() is non-const
  std::vector<Eta> etas_;
  long eta_nnz_ = 0;
  mutable Eigen::VectorXd work_;
};

}  // namespace recdr::lp::detail
