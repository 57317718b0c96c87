// Process vectors and matrices, the generalised Born rule and the catalog of
// named processes.
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tds/random.hpp"
#include "tds/syslab.hpp"

namespace tds {

struct PartySpec {
  std::string name;
  SystemLabel in;   // X_I
  SystemLabel out;  // X_O
  std::optional<SystemLabel> anc_in;
  std::optional<SystemLabel> anc_out;
};

// Default wire names for a party: X_I, X_O, X_I', X_O'.
PartySpec party(const std::string& name, Index d_in, Index d_out, Index d_anc = 0);
std::string in_name(const std::string& party);
std::string out_name(const std::string& party);
std::string anc_in_name(const std::string& party);
std::string anc_out_name(const std::string& party);

class ProcessVector {
 public:
  ProcessVector(LabeledTensor tensor, std::vector<PartySpec> parties, LabelList past, LabelList future);

  const LabeledTensor& tensor() const { return tensor_; }
  const std::vector<PartySpec>& parties() const { return parties_; }
  const LabelList& past() const { return past_; }
  const LabelList& future() const { return future_; }
  const PartySpec& party(const std::string& name) const;

  // past ++ party outputs, and future ++ party inputs (parties sorted by name).
  LabelList operator_inputs() const;
  LabelList operator_outputs() const;
  UnitaryBlock as_unitary() const;

 private:
  LabeledTensor tensor_;
  std::vector<PartySpec> parties_;
  LabelList past_, future_;
};

double unitarity_residual(const ProcessVector& u);

struct ProcessMatrix {
  LabeledOperator op;
  std::vector<PartySpec> parties;
  LabelList future;  // untraced global-future legs, if any
};

struct Instrument {
  std::string party;
  std::vector<LabeledOperator> outcomes;  // Choi of each CP map on X_I X_O
};

struct OutcomeTable {
  std::vector<std::string> parties;
  std::vector<Index> cards;
  std::vector<double> probs;  // mixed radix, first party most significant

  double at(const std::vector<Index>& outcome) const;
  double total() const;
};

// Largest violation of positivity / trace preservation; 0 for a valid instrument.
double instrument_defect(const Instrument& inst, const PartySpec& p);

OutcomeTable born_rule(const ProcessMatrix& w, const std::vector<Instrument>& instruments, double tol = kDefaultTol);

struct ValidationReport {
  double min_eigenvalue = 0;
  bool positive = false;
  double trace = 0;
  double expected_trace = 0;
  bool trace_ok = false;
  int samples = 0;
  double max_normalization_error = 0;
  bool normalization_ok = false;

  bool passed() const { return positive && trace_ok && normalization_ok; }
};

ValidationReport validate_process_matrix(const ProcessMatrix& w, int n_samples, Rng& rng, double tol = kDefaultTol);

ProcessMatrix reduce_unitary_extension(const ProcessVector& u, const LabeledOperator& past_state, bool trace_future);
ProcessMatrix reduce_unitary_extension(const ProcessVector& u, const LabeledTensor& past_state, bool trace_future);

// |U_G⟩⟩ = |U⟩⟩ ∗ ⊗_X |U_X⟩⟩; every party needs a local operation.
LabeledTensor global_unitary(const ProcessVector& u, const std::map<std::string, UnitaryBlock>& locals);
// Unitarity residual of the global operation (past ++ ancilla ins → future ++ ancilla outs).
double global_unitarity_residual(const ProcessVector& u, const std::map<std::string, UnitaryBlock>& locals,
                                 const LabeledTensor& global);

ProcessVector pad_to_equal_dims(const ProcessVector& u);

// Random CPTP instrument on the party's X_I → X_O with the given number of outcomes.
Instrument random_instrument(Rng& rng, const PartySpec& p, int n_outcomes);
// Contracts the ancilla input with `anc_state` and measures the ancilla output in the computational basis.
Instrument instrument_from_dilation(const UnitaryBlock& u, const PartySpec& p, const Eigen::VectorXcd& anc_state);
// Measures X_I in the computational basis and prepares |i⟩ on X_O.
Instrument measure_prepare_instrument(const PartySpec& p, Index i);

namespace catalog {

ProcessMatrix make_W_AF();
ProcessVector make_U_BW();
// Quantum switch with control/target past legs P_c, P_t and future legs F_c, F_t.
ProcessVector make_switch();
// X_I → X_O', and X_I' → X_O (identity for i = 0, NOT for i = 1).
UnitaryBlock ci_strategy(const std::string& party, int i);
// Local identity X_I → X_O and X_I' → X_O'.
UnitaryBlock identity_local(const std::string& party, Index d, Index d_anc);

}  // namespace catalog

}  // namespace tds
