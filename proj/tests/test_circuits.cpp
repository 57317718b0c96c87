#include "doctest.h"
#include "tds/circuits.hpp"
#include "tds/pipeline.hpp"
#include "tds/random.hpp"

using namespace tds;

namespace {

SystemLabel w(const std::string& n, Index d = 2) { return {n, d}; }

// Feeds tautilde_<x> back into tau_<x> for every listed wire.
LabeledTensor relink(LabeledTensor t, const std::vector<SystemLabel>& wires) {
  for (const auto& x : wires)
    t = link(t, identity_dket<cd>({tau_tilde_name(x.name), x.dim}, {tau_name(x.name), x.dim}));
  return t;
}

}  // namespace

TEST_CASE("circuit wiring errors") {
  Rng rng(31);
  const UnitaryBlock u = random_unitary_block(rng, {w("a")}, {w("b")});
  const UnitaryBlock v = random_unitary_block(rng, {w("a")}, {w("c")});
  CHECK_THROWS_AS(TemporalCircuit({unitary_gate("u", u), unitary_gate("v", v)}), CircuitError);
  const UnitaryBlock x = random_unitary_block(rng, {w("b", 3)}, {w("c", 3)});
  CHECK_THROWS_AS(TemporalCircuit({unitary_gate("u", u), unitary_gate("x", x)}), DimensionError);
  const UnitaryBlock back = random_unitary_block(rng, {w("b")}, {w("a")});
  CHECK_THROWS_AS(TemporalCircuit({unitary_gate("back", back), unitary_gate("u", u)}), CircuitError);
  const TemporalCircuit ok({unitary_gate("u", u)});
  CHECK_THROWS_AS(ok.gate("nope"), CircuitError);
}

TEST_CASE("sequential gates simulate to the matrix product") {
  Rng rng(32);
  const UnitaryBlock u = random_unitary_block(rng, {w("a"), w("e")}, {w("b"), w("f")});
  const UnitaryBlock v = random_unitary_block(rng, {w("b")}, {w("c")});
  const TemporalCircuit c({unitary_gate("u", u), unitary_gate("v", v)});
  CHECK(c.external_inputs().size() == 2);
  CHECK(c.external_outputs().size() == 2);
  // Oracle: (V ⊗ 1_f) U as a block a e → c f.
  Eigen::MatrixXcd kr = Eigen::MatrixXcd::Zero(4, 4);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) kr(i * 2 + k, j * 2 + k) = v.matrix()(i, j);
  const UnitaryBlock expected({w("a"), w("e")}, {w("c"), w("f")}, kr * u.matrix());
  CHECK(max_abs_diff(simulate_choi(c), pure_choi(expected)) < 1e-13);
}

TEST_CASE("simulation is invariant under reordering independent gates") {
  Rng rng(33);
  const UnitaryBlock u = random_unitary_block(rng, {w("a")}, {w("b")});
  const UnitaryBlock v = random_unitary_block(rng, {w("c")}, {w("d")});
  const UnitaryBlock x = random_unitary_block(rng, {w("b"), w("d")}, {w("e"), w("f")});
  const LabeledTensor one = simulate_choi(TemporalCircuit({unitary_gate("u", u), unitary_gate("v", v), unitary_gate("x", x)}));
  const LabeledTensor two = simulate_choi(TemporalCircuit({unitary_gate("v", v), unitary_gate("u", u), unitary_gate("x", x)}));
  CHECK(max_abs_diff(one, two) < 1e-14);
}

TEST_CASE("controlled pair with equal branches is the gate tensored with a control wire") {
  Rng rng(34);
  const UnitaryBlock u = random_unitary_block(rng, {w("a")}, {w("b")});
  const Gate g = controlled_gate("cu", u, u, w("k"), w("k'"));
  const LabeledTensor expected = tensor(pure_choi(u), identity_dket<cd>(w("k"), w("k'")));
  CHECK(max_abs_diff(gate_choi(g), expected) < 1e-14);
}

TEST_CASE("preparation and projection gates") {
  Eigen::VectorXcd plus(2);
  plus << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
  const TemporalCircuit c({prepare_gate("prep", w("a"), plus), project_gate("proj", w("a"), plus)});
  CHECK(c.non_unitary());
  CHECK(std::abs(simulate_choi(c).value() - cd(1)) < 1e-14);
  const TemporalCircuit t({prepare_gate("prep", w("a"), plus), trace_gate("tr", w("a"))});
  const LabeledOperator m = simulate_mixed(t);
  CHECK(std::abs(m.matrix()(0, 0) - cd(1)) < 1e-14);
}

TEST_CASE("quantum switch components rebuild the switch process") {
  const QcqcComponents comp = switch_components();
  validate_components(comp);
  const ProcessVector u = qcqc_process_vector(comp);
  CHECK(unitarity_residual(u) < 1e-14);
  // P_O = control ⊗ target with the A≺B block first.
  const LabeledTensor split = split_label(split_label(u.tensor(), "P_O", {w("P_c"), w("P_t")}), "F_I", {w("F_c"), w("F_t")});
  CHECK(max_abs_diff(split, catalog::make_switch().tensor()) < 1e-14);
}

TEST_CASE("assembled QC-QC circuits match the process composed with the locals") {
  Rng rng(35);
  for (int trial = 0; trial < 50; ++trial) {
    const Index lambda = 1 + trial % 2, rho = 1 + (trial / 2) % 2;
    const QcqcComponents comp = random_qcqc_components(rng, lambda, rho, trial % 3 == 0);
    validate_components(comp);
    const UnitaryBlock ua = random_local(rng, "A", 2, 2), ub = random_local(rng, "B", 2, 2);
    const ProcessVector u = qcqc_process_vector(comp);
    const TemporalCircuit c = assemble_qcqc(comp, ua, ub);
    CHECK(max_abs_diff(simulate_choi(c), global_unitary(u, {{"A", ua}, {"B", ub}})) <= 1e-9);
  }
}

TEST_CASE("component validation rejects non-unitary ν") {
  QcqcComponents comp = switch_components();
  comp.nu2_ab(0, 0) = 2.0;
  CHECK_THROWS(validate_components(comp));
}

TEST_CASE("switch circuit requires ancilla wires") {
  Rng rng(36);
  const QcqcComponents comp = switch_components();
  const UnitaryBlock ua = random_local(rng, "A", 2, 2), ub = random_local(rng, "B", 2, 2);
  CHECK_THROWS_AS(switch_circuit(qcqc_operations(comp), ua, ub, party("A", 2, 2), party("B", 2, 2), false), LabelError);
}

TEST_CASE("disconnecting both wires of a one-gate circuit exposes the gate on the ancillas") {
  Rng rng(37);
  const UnitaryBlock u = random_unitary_block(rng, {w("x", 3)}, {w("y", 3)});
  const TemporalCircuit c({unitary_gate("u", u)});
  const TemporalCircuit d = disconnect_fragment(c, {"x", "y"});
  const LabeledTensor got = simulate_choi(d);
  // Gate on tau_x → tautilde_y, the original wires routed straight through.
  const LabeledTensor expected =
      tensor(tensor(relabel(pure_choi(u), {{"x", tau_name("x")}, {"y", tau_tilde_name("y")}}),
                    identity_dket<cd>(w("x", 3), w(tau_tilde_name("x"), 3))),
             identity_dket<cd>(w(tau_name("y"), 3), w("y", 3)));
  CHECK(max_abs_diff(got, expected) < 1e-14);
  CHECK(max_abs_diff(relink(got, {w("x", 3), w("y", 3)}), simulate_choi(c)) < 1e-13);
  CHECK_THROWS_AS(disconnect_fragment(c, {"zz"}), CircuitError);
}

TEST_CASE("disconnecting A in a bipartite comb isolates U_A") {
  Rng rng(38);
  const UnitaryBlock w1 = random_unitary_block(rng, {w("P", 4)}, {w("A_I"), w("E")});
  const UnitaryBlock w2 = random_unitary_block(rng, {w("A_O"), w("E")}, {w("F", 4)});
  const UnitaryBlock ua = random_unitary_block(rng, {w("A_I"), w("A_I'")}, {w("A_O"), w("A_O'")});
  const TemporalCircuit c = build_bipartite_comb(w1, w2, ua);
  const TemporalCircuit d = disconnect_fragment(c, {"A_I", "A_O"});
  const LabeledTensor full = simulate_choi(d);
  // Tomography: the A part of the disconnected Choi factorises from the rest
  // and equals U_A on tau_A_I → tautilde_A_O.
  const LabeledTensor ua_probe = relabel(pure_choi(ua), {{"A_I", tau_name("A_I")}, {"A_O", tau_tilde_name("A_O")}});
  const LabeledTensor rest = link(relabel(pure_choi(w1), {{"A_I", tau_tilde_name("A_I")}}),
                                  relabel(pure_choi(w2), {{"A_O", tau_name("A_O")}}));
  CHECK(max_abs_diff(full, tensor(ua_probe, rest)) < 1e-13);
  CHECK(max_abs_diff(relink(full, {w("A_I"), w("A_O")}), simulate_choi(c)) < 1e-13);
}

TEST_CASE("SWAP-wrapped local operation") {
  Rng rng(39);
  const PartySpec b = party("B", 2, 2, 2);
  const UnitaryBlock ub = random_local(rng, "B", 2, 2);
  const UnitaryBlock s = swap_probe(ub, b);
  CHECK(is_unitary(s));
  const LabeledTensor expected =
      tensor(tensor(relabel(pure_choi(ub), {{"B_I", tau_name("B_I")}, {"B_O", tau_tilde_name("B_O")}}),
                    identity_dket<cd>(w("B_I"), w(tau_tilde_name("B_I")))),
             identity_dket<cd>(w(tau_name("B_O")), w("B_O")));
  CHECK(max_abs_diff(pure_choi(s), expected) < 1e-14);
}
