// Classical instruments over named random variables, their link composition,
// and the classical reading of basis-preserving circuits.
#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "tds/causality.hpp"
#include "tds/circuits.hpp"

namespace tds {

struct RandomVar {
  std::string name;
  Index card = 2;
  bool operator==(const RandomVar&) const = default;
};
using VarList = std::vector<RandomVar>;

VarList vars_of(const LabelList& ls);

// P(out | in), stored densely: entry index = in_index * n_out + out_index, both
// mixed radix over the declared variable order.
class ClassicalInstrument {
 public:
  ClassicalInstrument();  // no variables, value 1
  ClassicalInstrument(VarList in, VarList out, std::vector<mpq_class> table);
  // Deterministic map given as out_index = f(in_index).
  static ClassicalInstrument deterministic(VarList in, VarList out, const std::function<Index(Index)>& f);

  const VarList& in_vars() const { return in_; }
  const VarList& out_vars() const { return out_; }
  const std::vector<mpq_class>& table() const { return table_; }
  Index n_in() const;
  Index n_out() const;
  const mpq_class& at(Index in_index, Index out_index) const;
  // Looks up P for a full assignment of in and out variables by name.
  mpq_class prob(const std::map<std::string, Index>& assignment) const;

  // Every in-assignment sums to 1.
  bool is_normalized() const;
  bool is_deterministic() const;

 private:
  VarList in_, out_;
  std::vector<mpq_class> table_;
};

// Sums the product table over the variables the two instruments share (an
// output of one and an input of the other). Open inputs: a's then b's.
ClassicalInstrument classical_link(const ClassicalInstrument& a, const ClassicalInstrument& b);
ClassicalInstrument reorder(const ClassicalInstrument& p, const std::vector<std::string>& in,
                            const std::vector<std::string>& out);
// Drops output variables by summing over them.
ClassicalInstrument marginalize(const ClassicalInstrument& p, const std::vector<std::string>& out);
// Diagonal Choi operator Σ P(out|in) |in,out⟩⟨in,out|.
LabeledOperator diagonal_choi(const ClassicalInstrument& p);

struct Bijection {
  VarList domain, codomain;
  std::vector<Index> forward;  // codomain index of each domain index
};

Bijection make_bijection(VarList domain, VarList codomain, std::vector<Index> forward);
Bijection inverse(const Bijection& b);
ClassicalInstrument as_instrument(const Bijection& b);

// perm[col] = row when every column of u is a computational basis vector up to
// a phase; nullopt otherwise.
std::optional<std::vector<Index>> is_basis_preserving(const UnitaryBlock& u, double tol = kDefaultTol);
std::optional<Bijection> bijection_of(const UnitaryBlock& u, double tol = kDefaultTol);

struct ClassicalGate {
  std::string name;
  ClassicalInstrument inst;
};

struct ClassicalCircuit {
  std::vector<ClassicalGate> gates;
};

// Throws NotClassical naming the first gate that is not a basis permutation or
// basis preparation/projection.
ClassicalCircuit classicalize(const TemporalCircuit& c, double tol = kDefaultTol);
ClassicalInstrument simulate_classical(const ClassicalCircuit& c);

// j_in ∗ red ∗ j_out with the bijections read as deterministic instruments.
ClassicalInstrument delocalized_rewrite_classical(const ClassicalInstrument& red, const Bijection& j_in,
                                                  const Bijection& j_out);

// P(o|i) of an instrument with inputs `settings` and outputs `outcomes`
// (all other variables must be absent).
Correlation to_correlation(const ClassicalInstrument& p, const std::vector<std::string>& settings,
                           const std::vector<std::string>& outcomes);

// P_AF on (A_O B_O C_O) → (A_I B_I C_I).
ClassicalInstrument bw_classical_process();
// P(X_O, o_X | X_I, i_X) = δ_{o_X, X_I} δ_{X_O, i_X}; variables X_I X_O i_X o_X.
ClassicalInstrument bw_strategy(const std::string& party);
// Σ P_AF · P_A · P_B · P_C over the party wires.
Correlation bw_classical_correlation(const std::map<std::string, ClassicalInstrument>& strategies);

}  // namespace tds
