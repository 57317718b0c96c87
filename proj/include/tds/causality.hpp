// Correlations, causal inequalities, the causal polytope of binary n ≤ 3
// scenarios and strict partial orders.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "tds/errors.hpp"
#include "tds/syslab.hpp"

namespace tds {

// P(o|i) over n parties; settings and outcomes are mixed radix with the first
// party most significant. Entry index = setting_index * n_outcomes + outcome_index.
struct Correlation {
  std::vector<Index> settings, outcomes;
  std::vector<mpq_class> p;

  static Correlation zeros(std::vector<Index> settings, std::vector<Index> outcomes);
  static Correlation binary(int n) { return zeros(std::vector<Index>(n, 2), std::vector<Index>(n, 2)); }

  int parties() const { return static_cast<int>(settings.size()); }
  Index n_settings() const;
  Index n_outcomes() const;
  Index setting_index(const std::vector<Index>& i) const;
  Index outcome_index(const std::vector<Index>& o) const;
  mpq_class& at(const std::vector<Index>& o, const std::vector<Index>& i);
  const mpq_class& at(const std::vector<Index>& o, const std::vector<Index>& i) const;
  bool nonnegative() const;
  bool normalized() const;
  bool operator==(const Correlation& other) const;
};

// Σ coeff · P ≥ bound.
struct CausalInequality {
  std::vector<Index> settings, outcomes;
  std::vector<mpq_class> coeffs;  // same layout as Correlation::p
  mpq_class bound = 0;
};

// Σ coeff · P − bound.
mpq_class eval_inequality(const Correlation& c, const CausalInequality& q);
CausalInequality make_I1();
std::size_t term_count(const CausalInequality& q);

// o_A = ¬i_B ∧ i_C, o_B = ¬i_C ∧ i_A, o_C = ¬i_A ∧ i_B.
Correlation bw_correlation();
Correlation uniform_correlation(int n);

// Deterministic binary correlations as codes: outcome bits of setting s occupy
// bits [n·s, n·s + n), first party most significant.
std::vector<std::uint64_t> causal_vertex_codes(int n);
Correlation vertex_correlation(int n, std::uint64_t code);
std::vector<Correlation> enumerate_causal_vertices(int n);
// Code of a deterministic binary correlation; nullopt when it is not 0/1.
std::optional<std::uint64_t> deterministic_code(const Correlation& c);

struct CausalCertificate {
  bool feasible = false;
  // (vertex code, weight) with positive weights summing to 1.
  std::vector<std::pair<std::uint64_t, mpq_class>> weights;
  // Valid for every causal correlation and violated by the input.
  std::optional<CausalInequality> witness;
  int pivots = 0;
};

// Exact membership test in the causal polytope (binary settings and outcomes).
CausalCertificate is_causal(const Correlation& c);
// Re-checks a certificate against the vertex list in exact arithmetic.
bool check_certificate(const Correlation& c, const CausalCertificate& cert);

// ---- strict partial orders ----------------------------------------------------

struct SPO {
  std::vector<std::string> elements;
  std::vector<std::vector<char>> rel;  // rel[a][b]: a ≺ b

  explicit SPO(std::vector<std::string> elems = {});
  int index(const std::string& name) const;
  bool precedes(const std::string& a, const std::string& b) const;
  void add(const std::string& a, const std::string& b);
};

SPO transitive_closure(SPO s);

struct SpoReport {
  bool irreflexive = true;
  bool transitive = true;
  std::vector<std::string> violations;
  bool ok() const { return irreflexive && transitive; }
};

SpoReport spo_validate(const SPO& s);

struct CausalSets {
  std::vector<std::string> past, future, elsewhere;
};

CausalSets causal_sets(const SPO& s, const std::string& x);

// X C Y iff X_O ≺ Λ1_I, Λ1_O ≺ Λ2_I, …, ΛM_O ≺ Y_I for some M ≥ 0.
struct CoarseRelation {
  std::vector<std::string> parties;
  std::vector<std::vector<char>> rel;
  bool is_spo = true;
  bool related(const std::string& x, const std::string& y) const;
};

CoarseRelation coarse_grain(const SPO& s);

// Conditions (i) and (ii) of the closed-laboratory constraint for one party,
// checked against every element of the ground set.
bool check_closed_lab(const SPO& s, const std::string& party);

}  // namespace tds
