// The explicit Baumeler-Wolf realisation on time-delocalised subsystems.
#pragma once

#include <map>
#include <string>
#include <vector>

#include "tds/causality.hpp"
#include "tds/circuits.hpp"
#include "tds/delocalize.hpp"

namespace tds::bw {

inline const std::string gamma = "gamma";

// U_C acts on C_I plus one ancilla input (γ carries its ancilla output).
UnitaryBlock omega1(const UnitaryBlock& u_C);
UnitaryBlock omega2_open();
UnitaryBlock omega2_closed();
// Includes the U_C (X ⊗ 𝟙) U_C† correction on the two inputs where C's input
// must be flipped.
UnitaryBlock omega3(const UnitaryBlock& u_C);

SwitchOperations operations(const UnitaryBlock& u_C);
SwitchDecomposer decomposer();

// Circuit with bar identities; parties are the A, B, C of make_U_BW.
TemporalCircuit build_bw_circuit(const UnitaryBlock& u_A, const UnitaryBlock& u_B, const UnitaryBlock& u_C);

// U1: P1 P2 P3 A_O B_O → C_I Z with Z = (p1, p2, a_O, b_O) and
// U2: C_O Zbar → A_I B_I F1 F2 F3.
Factorization bw_factorization();

// Probability table from the circuit route: past |000⟩, ancilla inputs |0⟩,
// ancilla outputs measured, future traced. Entries are rounded to exact 0/1
// after checking they are within `tol`.
Correlation circuit_correlation(double tol = 1e-12);
// Born rule on W_AF with the measure-and-prepare instruments.
Correlation born_correlation(double tol = 1e-12);
// Classicalised circuit with ci strategies.
Correlation classical_circuit_correlation();

struct DemoReport {
  Correlation born, circuit, classical, formula;
  bool routes_agree = false;
  mpq_class i1;
  int unit_entries = 0;
};

DemoReport bw_inequality_demo();

}  // namespace tds::bw
