#pragma once

#include <random>

#include "tds/syslab.hpp"

namespace tds {

using Rng = std::mt19937_64;

Eigen::MatrixXcd random_gaussian(Rng& rng, Index rows, Index cols);
// Haar-distributed unitary (QR of a Ginibre matrix with phase fix).
Eigen::MatrixXcd random_unitary(Rng& rng, Index d);
// Isometry with `rows` ≥ `cols`.
Eigen::MatrixXcd random_isometry(Rng& rng, Index rows, Index cols);
Eigen::VectorXcd random_state(Rng& rng, Index d);

LabeledTensor random_tensor(Rng& rng, const LabelList& labels);
UnitaryBlock random_unitary_block(Rng& rng, const LabelList& in, const LabelList& out);
// Unitary that maps computational basis states to computational basis states.
UnitaryBlock random_permutation_block(Rng& rng, const LabelList& in, const LabelList& out);

}  // namespace tds
