// End-to-end verification chains: factor → build → split → rewrite →
// reconstruct, each stage reporting its residual.
#pragma once

#include <string>
#include <vector>

#include "tds/circuits.hpp"
#include "tds/delocalize.hpp"
#include "tds/random.hpp"

namespace tds {

struct Stage {
  std::string name;
  double residual = 0;
  double tol = 0;
  bool passed() const { return residual <= tol; }
};

struct ChainReport {
  std::string mode;
  std::vector<Stage> stages;
  bool passed() const;
  const Stage& stage(const std::string& name) const;
};

// Haar-random X_I X_I' → X_O X_O'.
UnitaryBlock random_local(Rng& rng, const std::string& party, Index d, Index d_anc);

// A ≺ B comb P_O → A_I m → B_I m → F_I built from three Haar unitaries.
ProcessVector random_comb_process(Rng& rng, Index d, Index mem);
// Switch-like components with Haar ν's (and tildes when `random_tildes`).
QcqcComponents random_qcqc_components(Rng& rng, Index lambda, Index rho, bool random_tildes);

// Bipartite chain: g = |U⟩⟩∗|U_B⟩⟩ is comb-factorised around A, the circuit
// ω₁ U_A ω₂ is built, and the red fragment {ω₁, ω₂} is rewritten with the
// isomorphisms from factoring U through B.
// `progress`, when given, holds the stage being worked on, so a caller that
// catches an exception can name where it came from.
ChainReport verify_bipartite_chain(const ProcessVector& u, const UnitaryBlock& u_A, const UnitaryBlock& u_B,
                                   double tol = 1e-9, std::string* progress = nullptr);

// Tripartite chain for a process with an explicit circuit decomposer (C acts
// first, A and B are switched).
ChainReport verify_tripartite_chain(const ProcessVector& u, const SwitchDecomposer& decomposer,
                                    const UnitaryBlock& u_A, const UnitaryBlock& u_B, const UnitaryBlock& u_C,
                                    double tol = 1e-9, std::string* progress = nullptr);

}  // namespace tds
