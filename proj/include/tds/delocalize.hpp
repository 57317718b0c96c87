// No-influence factorization, time-delocalised subsystem isomorphisms and the
// cyclic reconstruction identities.
#pragma once

#include <string>
#include <vector>

#include "tds/circuits.hpp"
#include "tds/process.hpp"

namespace tds {

// U = U1 ∗ |𝟙⟩⟩^{Z Zbar} ∗ U2 where U1 ends on the party input and U2 starts on
// the party output.
struct Factorization {
  std::string party;
  UnitaryBlock u1;  // remaining inputs → X_I Z
  UnitaryBlock u2;  // X_O Zbar → remaining outputs
  SystemLabel z, zbar;
};

inline const std::string kZ = "Z", kZbar = "Zbar";

// Splits a unitary block (inputs ∋ c_out, outputs ∋ x_in) through a memory
// system. Throws NotAProcess when x_in depends on c_out; `z`/`zbar` name the
// memory on the U1 and U2 sides.
Factorization factor_block(const UnitaryBlock& u, const std::string& x_in, const std::string& c_out,
                           const std::string& z, const std::string& zbar, double tol = kDefaultTol);

Factorization factor_no_influence(const ProcessVector& u, const std::string& party, double tol = kDefaultTol);
LabeledTensor reconstruct(const Factorization& f);
double reconstruction_residual(const Factorization& f, const LabeledTensor& target);

struct CombFactorization {
  UnitaryBlock omega1;  // inputs before the party → X_I E
  UnitaryBlock omega2;  // X_O E → remaining outputs
  Index e_dim = 1;
};

// g is the pure Choi of a unitary `inputs` → `outputs` with the party's X_O among
// the inputs and X_I among the outputs. Throws NotAComb on X_O → X_I influence.
CombFactorization comb_factorize(const LabeledTensor& g, const std::vector<std::string>& inputs,
                                 const std::vector<std::string>& outputs, const PartySpec& a, double tol = kDefaultTol);

struct SubsystemDecomposition {
  UnitaryBlock j_in;    // new subsystems → red-fragment input wires
  UnitaryBlock j_out;   // red-fragment output wires → new subsystems
  LabelList complement;  // Z Zbar, or Y Ybar Z Zbar Q1bar Q2'bar
};

inline const std::string kY = "Y", kYbar = "Ybar";

SubsystemDecomposition make_bipartite_decomposition(const Factorization& f);
// `f` factors the process through the party acting first (C); A and B are the
// switched parties.
SubsystemDecomposition make_tripartite_decomposition(const Factorization& f, const PartySpec& A, const PartySpec& B,
                                                     const LabelList& past, const LabelList& future);

// |J_in⟩⟩ ∗ red ∗ |J_out⟩⟩.
LabeledTensor rewrite_red_fragment(const LabeledTensor& red, const SubsystemDecomposition& d);

// Red/blue split of the tripartite circuit: red is every gate not named id_*.
TemporalCircuit red_fragment(const TemporalCircuit& c);
TemporalCircuit blue_fragment(const TemporalCircuit& c);

// R(U_C) read off a rewritten red fragment by projecting out |U_A⟩⟩ ⊗ |U_B⟩⟩;
// `factor_residual` receives ‖rewritten − U_A ⊗ U_B ⊗ R‖_max.
LabeledTensor extract_R(const LabeledTensor& rewritten, const UnitaryBlock& u_A, const UnitaryBlock& u_B,
                        double* factor_residual = nullptr);

// |J_out†⟩⟩ ∗ (six bar identities) ∗ |J_in†⟩⟩.
LabeledTensor compute_R_prime(const SubsystemDecomposition& d);

// ‖R(U_C) ∗ R′ − |U⟩⟩ ∗ |U_C⟩⟩‖_max. The two operands must share exactly the
// labels Y Ybar Z Zbar Q1bar Q2'bar and the C wires; anything else is LabelError.
double verify_cyclic_reconstruction(const LabeledTensor& r_uc, const LabeledTensor& r_prime, const ProcessVector& u,
                                    const UnitaryBlock& u_C);

// Schmidt-rank-1 test across `left` vs the remaining legs: second singular
// value ≤ tol · first.
bool is_product_across(const LabeledTensor& t, const std::vector<std::string>& left, double tol = 1e-9);

}  // namespace tds
