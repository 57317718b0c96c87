#include "doctest.h"
#include "tds/bw_catalog.hpp"
#include "tds/classical.hpp"
#include "tds/pipeline.hpp"
#include "tds/random.hpp"

using namespace tds;

namespace {

// o_A = ¬i_B ∧ i_C and cyclic, written out by hand.
Correlation formula() {
  Correlation c = Correlation::binary(3);
  for (Index s = 0; s < 8; ++s) {
    const Index a = s >> 2, b = (s >> 1) & 1, x = s & 1;
    c.at({(1 - b) * x, (1 - x) * a, (1 - a) * b}, {a, b, x}) = 1;
  }
  return c;
}

// max |(A B†) − 1_x ⊗ G| over the block structure, plus the unitarity defect of G.
double gauge_distance(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b, Index dx) {
  const Eigen::MatrixXcd m = a * b.adjoint();
  const Index dz = m.rows() / dx;
  const Eigen::MatrixXcd g = m.block(0, 0, dz, dz);
  double res = (g * g.adjoint() - Eigen::MatrixXcd::Identity(dz, dz)).cwiseAbs().maxCoeff();
  for (Index i = 0; i < dx; ++i)
    for (Index j = 0; j < dx; ++j) {
      const Eigen::MatrixXcd want = i == j ? g : Eigen::MatrixXcd::Zero(dz, dz);
      res = std::max(res, static_cast<double>((m.block(i * dz, j * dz, dz, dz) - want).cwiseAbs().maxCoeff()));
    }
  return res;
}

}  // namespace

TEST_CASE("BW circuit operations are unitary for random and classical U_C") {
  Rng rng(61);
  std::vector<UnitaryBlock> ucs{catalog::ci_strategy("C", 0), catalog::ci_strategy("C", 1), random_local(rng, "C", 2, 2),
                                random_local(rng, "C", 2, 3)};
  for (const auto& uc : ucs) {
    CHECK(is_unitary(bw::omega1(uc)));
    CHECK(is_unitary(bw::omega3(uc)));
  }
  CHECK(is_unitary(bw::omega2_open()));
  CHECK(is_unitary(bw::omega2_closed()));
}

TEST_CASE("U_C must have one ancilla and qubit party wires") {
  Rng rng(62);
  CHECK_THROWS_AS(bw::omega1(random_unitary_block(rng, {qubit("C_I")}, {qubit("C_O")})), LabelError);
  CHECK_THROWS_AS(bw::omega1(random_unitary_block(rng, {qubit("X_I"), qubit("C_I'")}, {qubit("C_O"), qubit("C_O'")})),
                  LabelError);
}

TEST_CASE("explicit factorisation reconstructs U_BW") {
  const Factorization f = bw::bw_factorization();
  CHECK(f.z.dim == 16);
  CHECK(is_unitary(f.u1));
  CHECK(is_unitary(f.u2));
  CHECK(reconstruction_residual(f, catalog::make_U_BW().tensor()) == 0.0);
}

TEST_CASE("numerical factorisation through C is gauge-equivalent to the explicit one") {
  const ProcessVector u = catalog::make_U_BW();
  const Factorization num = factor_no_influence(u, "C");
  const Factorization ex = bw::bw_factorization();
  CHECK(num.z.dim == ex.z.dim);
  CHECK(reconstruction_residual(num, u.tensor()) <= 1e-10);
  const std::vector<std::string> ins{"P1", "P2", "P3", "A_O", "B_O"};
  const UnitaryBlock a = reorder(num.u1, ins, {"C_I", num.z.name});
  const UnitaryBlock b = reorder(ex.u1, ins, {"C_I", ex.z.name});
  CHECK(gauge_distance(a.matrix(), b.matrix(), 2) <= 1e-10);
}

TEST_CASE("BW circuit matches the global unitary for random locals") {
  Rng rng(63);
  const ProcessVector u = catalog::make_U_BW();
  for (int trial = 0; trial < 3; ++trial) {
    const UnitaryBlock ua = random_local(rng, "A", 2, 2), ub = random_local(rng, "B", 2, 2), uc = random_local(rng, "C", 2, 2);
    const TemporalCircuit c = bw::build_bw_circuit(ua, ub, uc);
    CHECK(max_abs_diff(simulate_choi(c), global_unitary(u, {{"A", ua}, {"B", ub}, {"C", uc}})) <= 1e-9);
  }
}

TEST_CASE("the BW circuit with classical strategies is a classical circuit") {
  for (int i = 0; i < 2; ++i) {
    const TemporalCircuit c =
        bw::build_bw_circuit(catalog::ci_strategy("A", i), catalog::ci_strategy("B", 1 - i), catalog::ci_strategy("C", i));
    CHECK_NOTHROW(classicalize(c));
  }
}

TEST_CASE("three correlation routes agree with the formula") {
  const Correlation want = formula();
  CHECK(bw::circuit_correlation() == want);
  CHECK(bw::born_correlation() == want);
  CHECK(bw::classical_circuit_correlation() == want);
}

TEST_CASE("demo report") {
  const bw::DemoReport r = bw::bw_inequality_demo();
  CHECK(r.routes_agree);
  CHECK(r.i1 == -1);
  CHECK(r.unit_entries == 8);
  CHECK(r.formula == formula());
}
