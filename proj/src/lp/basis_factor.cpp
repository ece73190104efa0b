#include "basis_factor.hpp"

#include <cmath>

namespace recdr::lp::detail {

bool BasisFactor::factorize(int m, const std::vector<SparseColumn>& columns) {
  m_ = m;
  etas_.clear();
  eta_nnz_ = 0;
  work_.resize(m);
  if (m == 0) return true;

  std::vector<Eigen::Triplet<double>> triplets;
  std::size_t nnz = 0;
  for (const auto& c : columns) nnz += c.index.size();
  triplets.reserve(nnz);
  for (int j = 0; j < m; ++j) {
    const auto& c = columns[static_cast<std::size_t>(j)];
    for (std::size_t k = 0; k < c.index.size(); ++k) triplets.emplace_back(c.index[k], j, c.value[k]);
  }
  Eigen::SparseMatrix<double> b(m, m);
  b.setFromTriplets(triplets.begin(), triplets.end());
  b.makeCompressed();
  lu_.analyzePattern(b);
  lu_.factorize(b);
  if (lu_.info() != Eigen::Success) return false;

  // SparseLU accepts tiny pivots; treat a blown-up solve as singular.
  const Eigen::VectorXd probe = lu_.solve(Eigen::VectorXd::Ones(m));
  for (int i = 0; i < m; ++i) {
    if (!std::isfinite(probe[i]) || std::abs(probe[i]) > 1e14) return false;
  }
  return true;
}

void BasisFactor::ftran(std::vector<double>& v) const {
  if (m_ == 0) return;
  Eigen::Map<Eigen::VectorXd> vm(v.data(), m_);
  work_ = lu_.solve(vm);
  vm = work_;
  for (const auto& e : etas_) {
    const double vr = v[static_cast<std::size_t>(e.pivot_row)] / e.pivot;
    v[static_cast<std::size_t>(e.pivot_row)] = vr;
    if (vr == 0.0) continue;
    for (std::size_t k = 0; k < e.index.size(); ++k) v[static_cast<std::size_t>(e.index[k])] -= e.value[k] * vr;
  }
}

void BasisFactor::btran(std::vector<double>& v) const {
  if (m_ == 0) return;
  for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
    double s = v[static_cast<std::size_t>(it->pivot_row)];
    for (std::size_t k = 0; k < it->index.size(); ++k) s -= it->value[k] * v[static_cast<std::size_t>(it->index[k])];
    v[static_cast<std::size_t>(it->pivot_row)] = s / it->pivot;
  }
  Eigen::Map<Eigen::VectorXd> vm(v.data(), m_);
  work_ = lu_.transpose().solve(vm);
  vm = work_;
}

void BasisFactor::update(int r, const std::vector<double>& alpha) {
  Eta e;
  e.pivot_row = r;
  e.pivot = alpha[static_cast<std::size_t>(r)];
  for (int i = 0; i < m_; ++i) {
    const double a = alpha[static_cast<std::size_t>(i)];
    if (i != r && std::abs(a) > 1e-14) {
      e.index.push_back(i);
      e.value.push_back(a);
    }
  }
  eta_nnz_ += static_cast<long>(e.index.size());
  etas_.push_back(std::move(e));
}

}  // namespace recdr::lp::detail
