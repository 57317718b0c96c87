// Randomised property suite for the link product.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tds/syslab.hpp"

namespace tds {

struct LawResult {
  std::string law;
  int trials = 0;
  int failures = 0;
  double max_residual = 0;
};

// Laws: commutativity, associativity (each label on at most two operands),
// pure and mixed unitary cancellation, pure and mixed composition.
// Every trial draws from one generator seeded with `seed`.
std::vector<LawResult> run_link_laws(std::uint64_t seed, int trials, double tol = kDefaultTol);

}  // namespace tds
