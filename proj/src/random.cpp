#include "tds/random.hpp"

#include <algorithm>
#include <numeric>

namespace tds {

Eigen::MatrixXcd random_gaussian(Rng& rng, Index rows, Index cols) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXcd m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) {
      double re = n(rng);
      double im = n(rng);
      m(i, j) = cd(re, im);
    }
  return m;
}

Eigen::MatrixXcd random_isometry(Rng& rng, Index rows, Index cols) {
  if (rows < cols) throw DimensionError("random_isometry: rows < cols");
  Eigen::MatrixXcd g = random_gaussian(rng, rows, cols);
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
  Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(rows, cols);
  Eigen::MatrixXcd r = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
  for (Index j = 0; j < cols; ++j) {
    cd d = r(j, j);
    double a = std::abs(d);
    if (a > 0) q.col(j) *= d / a;
  }
  return q;
}

Eigen::MatrixXcd random_unitary(Rng& rng, Index d) { return random_isometry(rng, d, d); }

Eigen::VectorXcd random_state(Rng& rng, Index d) {
  Eigen::VectorXcd v = random_gaussian(rng, d, 1).col(0);
  return v / v.norm();
}

LabeledTensor random_tensor(Rng& rng, const LabelList& labels) {
  return LabeledTensor(labels, random_gaussian(rng, total_dim(labels), 1).col(0));
}

UnitaryBlock random_unitary_block(Rng& rng, const LabelList& in, const LabelList& out) {
  if (total_dim(in) != total_dim(out)) throw DimensionError("random_unitary_block: dims differ");
  return UnitaryBlock(in, out, random_unitary(rng, total_dim(in)));
}

UnitaryBlock random_permutation_block(Rng& rng, const LabelList& in, const LabelList& out) {
  const Index d = total_dim(in);
  if (d != total_dim(out)) throw DimensionError("random_permutation_block: dims differ");
  std::vector<Index> p(static_cast<std::size_t>(d));
  std::iota(p.begin(), p.end(), 0);
  std::shuffle(p.begin(), p.end(), rng);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
  for (Index j = 0; j < d; ++j) m(p[static_cast<std::size_t>(j)], j) = 1.0;
  return UnitaryBlock(in, out, std::move(m));
}

}  // namespace tds
