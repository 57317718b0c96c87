// Acyclic circuits over named wires, their Choi simulation, and assembly of
// comb and coherently-controlled-order circuits.
#pragma once

#include <functional>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "tds/process.hpp"
#include "tds/syslab.hpp"

namespace tds {

struct UnitaryGate {
  UnitaryBlock u;
};

// u0 when the control is |0⟩, u1 when it is |1⟩; the control passes control_in → control_out.
struct ControlledPairGate {
  UnitaryBlock u0, u1;
  SystemLabel control_in, control_out;
};

struct PrepareGate {
  SystemLabel wire;
  Eigen::VectorXcd state;
};

struct ProjectGate {
  SystemLabel wire;
  Eigen::VectorXcd state;
};

struct TraceOutGate {
  SystemLabel wire;
};

struct Gate {
  std::string name;
  std::variant<UnitaryGate, ControlledPairGate, PrepareGate, ProjectGate, TraceOutGate> op;

  LabelList inputs() const;
  LabelList outputs() const;
};

Gate unitary_gate(std::string name, UnitaryBlock u);
Gate controlled_gate(std::string name, UnitaryBlock u0, UnitaryBlock u1, SystemLabel control_in, SystemLabel control_out);
Gate prepare_gate(std::string name, SystemLabel wire, Eigen::VectorXcd state);
Gate project_gate(std::string name, SystemLabel wire, Eigen::VectorXcd state);
Gate trace_gate(std::string name, SystemLabel wire);

// Pure Choi of a single gate (TraceOut has none and is rejected).
LabeledTensor gate_choi(const Gate& g);
Gate relabel(const Gate& g, const std::map<std::string, std::string>& mapping);

class TemporalCircuit {
 public:
  TemporalCircuit() = default;
  // Throws CircuitError on a dangling/duplicated wire and DimensionError on a dim mismatch.
  explicit TemporalCircuit(std::vector<Gate> gates);

  const std::vector<Gate>& gates() const { return gates_; }
  const LabelList& external_inputs() const { return ext_in_; }
  const LabelList& external_outputs() const { return ext_out_; }
  // Wires consumed by TraceOut gates; they stay open legs of the pure Choi.
  const LabelList& discarded() const { return discarded_; }
  // True when the circuit contains projections or discards.
  bool non_unitary() const { return non_unitary_; }
  const Gate& gate(const std::string& name) const;

 private:
  std::vector<Gate> gates_;
  LabelList ext_in_, ext_out_, discarded_;
  bool non_unitary_ = false;
};

// Link product of the gate Chois in gate order; legs ordered inputs, outputs, discarded.
LabeledTensor simulate_choi(const TemporalCircuit& c);
// Mixed Choi with discarded wires traced out.
LabeledOperator simulate_mixed(const TemporalCircuit& c);

TemporalCircuit build_bipartite_comb(const UnitaryBlock& omega1, const UnitaryBlock& omega2, const UnitaryBlock& u_A);

// ---- coherently controlled order -------------------------------------------

namespace wire {
inline const std::string T1 = "T1", T1p = "T1'", T2 = "T2", T2p = "T2'";
inline const std::string T1bar = "T1bar", T1pbar = "T1'bar", T2bar = "T2bar", T2pbar = "T2'bar";
inline const std::string Q1 = "Q1", Q1p = "Q1'", Q2 = "Q2", Q2p = "Q2'", Q1bar = "Q1bar", Q2pbar = "Q2'bar";
inline const std::string E1 = "E1", E2 = "E2", alpha = "alpha", beta = "beta", p = "p", f = "f";
}  // namespace wire

// The four circuit operations, always written with the barred wire names:
// ω₁: past [p] → T1bar E1 Q1bar (+extras), ω₂°/ω₂•: T1'bar E1 → T2bar E2,
// ω₃: T2'bar E2 Q2'bar (+extras) → future [f].
struct SwitchOperations {
  UnitaryBlock omega1, omega2_open, omega2_closed, omega3;
  bool has_pf = false;
};

// Gates named omega1, stage1, omega2, stage2, omega3 (+ prep_p, proj_f); with
// `bar_identities` the identity channels are gates whose names start with "id_".
TemporalCircuit switch_circuit(const SwitchOperations& ops, const UnitaryBlock& u_A, const UnitaryBlock& u_B,
                               const PartySpec& A, const PartySpec& B, bool bar_identities);

// Components of a bipartite unitary process with coherently controlled order.
// Past and future are split as direct sums: the first d·λ (past) / d·λ (future)
// flat indices form the A≺B block, the rest the B≺A block. ν matrices map
// column spaces to row spaces with row-major pairs (party wire, ancilla):
//   nu1_ab: P^ℓ → A_I λ1     nu2_ab: A_O λ1 → B_I λ2     nu3_ab: B_O λ2 → F^ℓ
//   nu1_ba: P^r → B_I ρ1     nu2_ba: B_O ρ1 → A_I ρ2     nu3_ba: A_O ρ2 → F^r
// Tilde complements swap P^ℓ/P^r, F^ℓ/F^r and λ/ρ; absent ones default to identity.
struct QcqcComponents {
  PartySpec A, B;
  LabelList past, future;
  Index lambda1 = 1, lambda2 = 1, rho1 = 1, rho2 = 1;
  Eigen::MatrixXcd nu1_ab, nu2_ab, nu3_ab, nu1_ba, nu2_ba, nu3_ba;
  std::optional<Eigen::MatrixXcd> tnu1_ab, tnu2_ab, tnu3_ab, tnu1_ba, tnu2_ba, tnu3_ba;
};

void validate_components(const QcqcComponents& comp, double tol = kDefaultTol);
SwitchOperations qcqc_operations(const QcqcComponents& comp);
// |U⟩⟩ = |ν₁⟩⟩∗|ν₂⟩⟩∗|ν₃⟩⟩ summed over both orders.
ProcessVector qcqc_process_vector(const QcqcComponents& comp);
TemporalCircuit assemble_qcqc(const QcqcComponents& comp, const UnitaryBlock& u_A, const UnitaryBlock& u_B);
// Identity ν's on qubits: the quantum switch with P_O = control ⊗ target merged into one leg.
QcqcComponents switch_components();

// Supplies the circuit operations for |U⟩⟩ ∗ |U_C⟩⟩ given U_C.
using SwitchDecomposer = std::function<SwitchOperations(const UnitaryBlock&)>;

TemporalCircuit tripartite_circuit(const ProcessVector& process, const UnitaryBlock& u_A, const UnitaryBlock& u_B,
                                   const UnitaryBlock& u_C, const SwitchDecomposer& decomposer);

// ---- disconnection ----------------------------------------------------------

std::string tau_name(const std::string& wire);
std::string tau_tilde_name(const std::string& wire);

// Routes a fresh input tau_<w> into the place of each wire w and sends the
// original content out on tautilde_<w>.
TemporalCircuit disconnect_fragment(const TemporalCircuit& c, const std::set<std::string>& wires);

// SWAP-wrapped local operation: U acts tau_<X_I> → tautilde_<X_O>, X_I is routed
// to tautilde_<X_I> and tau_<X_O> to X_O.
UnitaryBlock swap_probe(const UnitaryBlock& u, const PartySpec& p);

}  // namespace tds
