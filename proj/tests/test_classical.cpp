#include "doctest.h"
#include "tds/bw_catalog.hpp"
#include "tds/classical.hpp"
#include "tds/random.hpp"

using namespace tds;

namespace {

ClassicalInstrument not_gate(const std::string& in, const std::string& out) {
  return ClassicalInstrument::deterministic({{in, 2}}, {{out, 2}}, [](Index i) { return 1 - i; });
}

UnitaryBlock hadamard(const std::string& in, const std::string& out) {
  Eigen::MatrixXcd h(2, 2);
  h << 1, 1, 1, -1;
  return UnitaryBlock({{in, 2}}, {{out, 2}}, h / std::sqrt(2.0));
}

}  // namespace

TEST_CASE("NOT followed by NOT is the identity") {
  const ClassicalInstrument nn = classical_link(not_gate("x", "y"), not_gate("y", "z"));
  CHECK(nn.is_deterministic());
  CHECK(nn.is_normalized());
  for (Index i = 0; i < 2; ++i)
    for (Index o = 0; o < 2; ++o) CHECK(nn.at(i, o) == (i == o ? 1 : 0));
}

TEST_CASE("classical link agrees with the mixed link of diagonal Choi operators") {
  // A noisy channel x → y followed by a noisy channel y → z, exact rationals.
  const ClassicalInstrument a({{"x", 2}}, {{"y", 2}}, {mpq_class(3, 4), mpq_class(1, 4), mpq_class(1, 3), mpq_class(2, 3)});
  const ClassicalInstrument b({{"y", 2}}, {{"z", 3}},
                              {mpq_class(1, 2), mpq_class(1, 2), 0, mpq_class(1, 5), mpq_class(1, 5), mpq_class(3, 5)});
  const ClassicalInstrument ab = classical_link(a, b);
  CHECK(ab.is_normalized());
  const LabeledOperator q = link_mixed(diagonal_choi(a), diagonal_choi(b));
  const LabeledOperator c = diagonal_choi(ab);
  CHECK(max_abs_diff(q, c) < 1e-14);
  // Hand-computed entry: P(z=2|x=1) = 1/3·0 + 2/3·3/5.
  CHECK(ab.prob({{"x", 1}, {"z", 2}}) == mpq_class(2, 5));
}

TEST_CASE("basis-preserving detection") {
  const UnitaryBlock x({{"a", 2}}, {{"b", 2}}, (Eigen::MatrixXcd(2, 2) << 0, 1, 1, 0).finished());
  const auto perm = is_basis_preserving(x);
  REQUIRE(perm);
  CHECK((*perm)[0] == 1);
  CHECK((*perm)[1] == 0);
  // Phases are allowed.
  const UnitaryBlock ph({{"a", 2}}, {{"b", 2}}, (Eigen::MatrixXcd(2, 2) << cd(0, 1), 0, 0, -1).finished());
  CHECK(is_basis_preserving(ph));
  CHECK_FALSE(is_basis_preserving(hadamard("a", "b")));
}

TEST_CASE("classicalize rejects a Hadamard and names the gate") {
  const TemporalCircuit c({unitary_gate("h", hadamard("a", "b"))});
  CHECK_THROWS_AS(classicalize(c), NotClassical);
  try {
    classicalize(c);
  } catch (const NotClassical& e) {
    CHECK(std::string(e.what()).find("'h'") != std::string::npos);
  }
}

TEST_CASE("classicalized circuits match the quantum simulation on basis states") {
  Rng rng(51);
  const UnitaryBlock p = random_permutation_block(rng, {{"a", 2}, {"b", 2}}, {{"c", 4}});
  const UnitaryBlock q = random_permutation_block(rng, {{"c", 4}}, {{"d", 2}, {"e", 2}});
  const TemporalCircuit circ({unitary_gate("p", p), unitary_gate("q", q)});
  const ClassicalInstrument cl = simulate_classical(classicalize(circ));
  const LabeledTensor choi = simulate_choi(circ);
  // |amp|² of the pure Choi is the classical transition table.
  const ClassicalInstrument r = reorder(cl, names_of(circ.external_inputs()), names_of(circ.external_outputs()));
  for (Index i = 0; i < r.n_in(); ++i)
    for (Index o = 0; o < r.n_out(); ++o)
      CHECK(std::norm(choi.amps()(i * r.n_out() + o)) == doctest::Approx(r.at(i, o).get_d()));
}

TEST_CASE("BW classical correlation matches the Boolean formula") {
  std::map<std::string, ClassicalInstrument> st;
  for (const char* x : {"A", "B", "C"}) st.emplace(x, bw_strategy(x));
  const Correlation c = bw_classical_correlation(st);
  for (Index s = 0; s < 8; ++s) {
    const Index ia = s >> 2, ib = (s >> 1) & 1, ic = s & 1;
    const Index oa = (1 - ib) * ic, ob = (1 - ic) * ia, oc = (1 - ia) * ib;
    for (Index o = 0; o < 8; ++o) {
      const std::vector<Index> out{o >> 2, (o >> 1) & 1, o & 1};
      const bool hit = out[0] == oa && out[1] == ob && out[2] == oc;
      CHECK(c.at(out, {ia, ib, ic}) == (hit ? 1 : 0));
    }
  }
  CHECK(c == bw_correlation());
}

TEST_CASE("constant strategies give a product of point distributions") {
  // Every party outputs a fixed bit regardless of setting and reports its input.
  auto constant = [](const std::string& x, Index bit) {
    return ClassicalInstrument::deterministic({{x + "_I", 2}, {"i_" + x, 2}}, {{x + "_O", 2}, {"o_" + x, 2}},
                                              [bit](Index k) { return bit * 2 + (k >> 1); });
  };
  std::map<std::string, ClassicalInstrument> st{{"A", constant("A", 1)}, {"B", constant("B", 0)}, {"C", constant("C", 1)}};
  const Correlation c = bw_classical_correlation(st);
  // a=1, b=0, c=1: A_I = ¬b∧c = 1, B_I = ¬c∧a = 0, C_I = ¬a∧b = 0.
  for (Index s = 0; s < 8; ++s) CHECK(c.at({1, 0, 0}, {s >> 2, (s >> 1) & 1, s & 1}) == 1);
}

TEST_CASE("delocalised rewrite is undone by the inverse bijections") {
  Rng rng(52);
  const ClassicalInstrument red({{"a", 2}, {"b", 2}}, {{"c", 2}},
                                {mpq_class(1, 2), mpq_class(1, 2), 1, 0, mpq_class(1, 3), mpq_class(2, 3), 0, 1});
  const Bijection jin = make_bijection({{"n", 4}}, {{"a", 2}, {"b", 2}}, {2, 0, 3, 1});
  const Bijection jout = make_bijection({{"c", 2}}, {{"m", 2}}, {1, 0});
  const ClassicalInstrument rw = delocalized_rewrite_classical(red, jin, jout);
  CHECK(rw.is_normalized());
  CHECK(rw.prob({{"n", 0}, {"m", 0}}) == mpq_class(2, 3));  // n=0 → (a,b)=(1,0) → P(c=1)=2/3 → m=0
  const ClassicalInstrument back = delocalized_rewrite_classical(rw, inverse(jin), inverse(jout));
  const ClassicalInstrument back_r = reorder(back, {"a", "b"}, {"c"});
  CHECK(back_r.table() == red.table());
  CHECK_THROWS_AS(delocalized_rewrite_classical(red, jout, jin), LabelError);
}

TEST_CASE("the classicalized BW circuit route equals the formula") {
  CHECK(bw::classical_circuit_correlation() == bw_correlation());
}

TEST_CASE("bijection validation") {
  CHECK_THROWS(make_bijection({{"a", 2}}, {{"b", 2}}, {0, 0}));
  CHECK_THROWS(make_bijection({{"a", 2}}, {{"b", 3}}, {0, 1}));
  const auto b = bijection_of(UnitaryBlock({{"a", 2}}, {{"b", 2}}, (Eigen::MatrixXcd(2, 2) << 0, 1, 1, 0).finished()));
  REQUIRE(b);
  CHECK(b->forward == std::vector<Index>{1, 0});
}
