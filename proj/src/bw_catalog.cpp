#include "tds/bw_catalog.hpp"

#include "tds/classical.hpp"

namespace tds::bw {

namespace {

struct SplitUC {
  Eigen::MatrixXcd m;  // rows (C_O, C_O'), cols (C_I, C_I')
  SystemLabel anc_in, anc_out;
  Index dg = 1;
};

SplitUC split(const UnitaryBlock& u_C) {
  const std::string ci = in_name("C"), co = out_name("C");
  if (u_C.in_labels().size() != 2 || u_C.out_labels().size() != 2)
    throw LabelError("U_C must act on C_I plus one ancilla and output C_O plus one ancilla");
  const int i = find_label(u_C.in_labels(), ci), o = find_label(u_C.out_labels(), co);
  if (i < 0 || o < 0) throw LabelError("U_C must act C_I -> C_O");
  SplitUC s;
  s.anc_in = u_C.in_labels()[static_cast<std::size_t>(1 - i)];
  s.anc_out = u_C.out_labels()[static_cast<std::size_t>(1 - o)];
  if (u_C.in_labels()[static_cast<std::size_t>(i)].dim != 2 || u_C.out_labels()[static_cast<std::size_t>(o)].dim != 2)
    throw DimensionError("BW party systems must be qubits");
  if (s.anc_in.dim != s.anc_out.dim) throw DimensionError("U_C ancilla in/out dims differ");
  s.dg = s.anc_in.dim;
  s.m = reorder(u_C, {ci, s.anc_in.name}, {co, s.anc_out.name}).matrix();
  return s;
}

Index rounded(double v, double tol) {
  if (std::abs(v) <= tol) return 0;
  if (std::abs(v - 1.0) <= tol) return 1;
  throw Error("correlation entry " + std::to_string(v) + " is not 0/1 within tolerance");
}

const std::vector<std::string> kParties{"A", "B", "C"};

}  // namespace

UnitaryBlock omega1(const UnitaryBlock& u_C) {
  using namespace wire;
  const SplitUC s = split(u_C);
  const Index dg = s.dg;
  Eigen::MatrixXcd w = Eigen::MatrixXcd::Zero(8 * dg, 8 * dg);
  for (Index p1 = 0; p1 < 2; ++p1)
    for (Index p2 = 0; p2 < 2; ++p2)
      for (Index p3 = 0; p3 < 2; ++p3)
        for (Index c = 0; c < dg; ++c) {
          const Index col = ((p1 * 2 + p2) * 2 + p3) * dg + c;
          for (Index q = 0; q < 2; ++q)
            for (Index g = 0; g < dg; ++g) {
              const Index t = q == 0 ? p1 : p2, e = q == 0 ? p2 : p1;
              w(((t * 2 + e) * 2 + q) * dg + g, col) = s.m(q * dg + g, p3 * dg + c);
            }
        }
  return UnitaryBlock({qubit("P1"), qubit("P2"), qubit("P3"), s.anc_in},
                      {qubit(T1bar), qubit(E1), qubit(Q1bar), {gamma, dg}}, std::move(w));
}

namespace {

UnitaryBlock omega2(bool negate) {
  using namespace wire;
  Eigen::MatrixXcd w = Eigen::MatrixXcd::Zero(4, 4);
  for (Index x = 0; x < 2; ++x)
    for (Index e = 0; e < 2; ++e) {
      const Index t2 = e ^ (negate ? 1 - x : x);
      w(t2 * 2 + x, x * 2 + e) = 1.0;
    }
  return UnitaryBlock({qubit(T1pbar), qubit(E1)}, {qubit(T2bar), qubit(E2)}, std::move(w));
}

}  // namespace

UnitaryBlock omega2_open() { return omega2(false); }
UnitaryBlock omega2_closed() { return omega2(true); }

UnitaryBlock omega3(const UnitaryBlock& u_C) {
  using namespace wire;
  const SplitUC s = split(u_C);
  const Index dg = s.dg;
  Eigen::MatrixXcd x_on_c = Eigen::MatrixXcd::Zero(2 * dg, 2 * dg);
  for (Index c = 0; c < 2; ++c)
    for (Index g = 0; g < dg; ++g) x_on_c((1 - c) * dg + g, c * dg + g) = 1.0;
  const Eigen::MatrixXcd W = s.m * x_on_c * s.m.adjoint();

  Eigen::MatrixXcd w = Eigen::MatrixXcd::Zero(8 * dg, 8 * dg);
  // (x, y, q) → F for the inputs that need no correction
  const std::pair<Index, Index> plain[] = {{0, 0}, {1, 1}, {2, 4}, {5, 5}, {6, 6}, {7, 7}};
  for (auto [in, f] : plain)
    for (Index g = 0; g < dg; ++g) w(f * dg + g, in * dg + g) = 1.0;
  // 100 carries c_O = 0 and 011 carries c_O = 1; both land on F = (0, 1, a)
  const std::pair<Index, Index> corrected[] = {{4, 0}, {3, 1}};
  for (auto [in, c] : corrected)
    for (Index g = 0; g < dg; ++g)
      for (Index a = 0; a < 2; ++a)
        for (Index b = 0; b < dg; ++b) w((2 + a) * dg + b, in * dg + g) = W(a * dg + b, c * dg + g);
  return UnitaryBlock({qubit(T2pbar), qubit(E2), qubit(Q2pbar), {gamma, dg}},
                      {qubit("F1"), qubit("F2"), qubit("F3"), s.anc_out}, std::move(w));
}

SwitchOperations operations(const UnitaryBlock& u_C) {
  return SwitchOperations{omega1(u_C), omega2_open(), omega2_closed(), omega3(u_C), false};
}

SwitchDecomposer decomposer() { return [](const UnitaryBlock& u_C) { return operations(u_C); }; }

TemporalCircuit build_bw_circuit(const UnitaryBlock& u_A, const UnitaryBlock& u_B, const UnitaryBlock& u_C) {
  return tripartite_circuit(catalog::make_U_BW(), u_A, u_B, u_C, decomposer());
}

Factorization bw_factorization() {
  Eigen::MatrixXcd u1 = Eigen::MatrixXcd::Zero(32, 32);
  for (Index col = 0; col < 32; ++col) {
    const Index p1 = (col >> 4) & 1, p2 = (col >> 3) & 1, p3 = (col >> 2) & 1, a = (col >> 1) & 1, b = col & 1;
    const Index ci = p3 ^ ((!a) && b);
    const Index z = ((p1 * 2 + p2) * 2 + a) * 2 + b;
    u1(ci * 16 + z, col) = 1.0;
  }
  Eigen::MatrixXcd u2 = Eigen::MatrixXcd::Zero(32, 32);
  for (Index col = 0; col < 32; ++col) {
    const Index c = (col >> 4) & 1, z = col & 15;
    const Index p1 = (z >> 3) & 1, p2 = (z >> 2) & 1, a = (z >> 1) & 1, b = z & 1;
    const Index ai = p1 ^ ((!b) && c), bi = p2 ^ ((!c) && a);
    const Index row = ((((ai * 2 + bi) * 2 + a) * 2 + b) * 2) + c;
    u2(row, col) = 1.0;
  }
  Factorization f;
  f.party = "C";
  f.z = {kZ, 16};
  f.zbar = {kZbar, 16};
  f.u1 = UnitaryBlock({qubit("P1"), qubit("P2"), qubit("P3"), qubit("A_O"), qubit("B_O")}, {qubit("C_I"), f.z},
                      std::move(u1));
  f.u2 = UnitaryBlock({qubit("C_O"), f.zbar}, {qubit("A_I"), qubit("B_I"), qubit("F1"), qubit("F2"), qubit("F3")},
                      std::move(u2));
  return f;
}

Correlation circuit_correlation(double tol) {
  Correlation c = Correlation::binary(3);
  for (Index s = 0; s < 8; ++s) {
    const std::vector<Index> i{(s >> 2) & 1, (s >> 1) & 1, s & 1};
    const auto circ = build_bw_circuit(catalog::ci_strategy("A", static_cast<int>(i[0])),
                                       catalog::ci_strategy("B", static_cast<int>(i[1])),
                                       catalog::ci_strategy("C", static_cast<int>(i[2])));
    LabeledTensor t = simulate_choi(circ);
    for (const std::string n : {"P1", "P2", "P3"}) t = link(t, basis_ket(qubit(n), 0));
    for (const auto& p : kParties) t = link(t, basis_ket(qubit(anc_in_name(p)), 0));
    t = permute(t, {anc_out_name("A"), anc_out_name("B"), anc_out_name("C"), "F1", "F2", "F3"});
    for (Index o = 0; o < 8; ++o) {
      double pr = t.amps().segment(o * 8, 8).squaredNorm();
      c.at({(o >> 2) & 1, (o >> 1) & 1, o & 1}, i) = static_cast<long>(rounded(pr, tol));
    }
  }
  return c;
}

Correlation born_correlation(double tol) {
  const ProcessMatrix w = catalog::make_W_AF();
  Correlation c = Correlation::binary(3);
  for (Index s = 0; s < 8; ++s) {
    const std::vector<Index> i{(s >> 2) & 1, (s >> 1) & 1, s & 1};
    std::vector<Instrument> insts;
    for (std::size_t k = 0; k < 3; ++k) insts.push_back(measure_prepare_instrument(party(kParties[k], 2, 2), i[k]));
    const OutcomeTable t = born_rule(w, insts, tol);
    for (Index o = 0; o < 8; ++o)
      c.at({(o >> 2) & 1, (o >> 1) & 1, o & 1}, i) = static_cast<long>(rounded(t.probs[static_cast<std::size_t>(o)], tol));
  }
  return c;
}

Correlation classical_circuit_correlation() {
  Correlation c = Correlation::binary(3);
  for (Index s = 0; s < 8; ++s) {
    const std::vector<Index> i{(s >> 2) & 1, (s >> 1) & 1, s & 1};
    const auto circ = build_bw_circuit(catalog::ci_strategy("A", static_cast<int>(i[0])),
                                       catalog::ci_strategy("B", static_cast<int>(i[1])),
                                       catalog::ci_strategy("C", static_cast<int>(i[2])));
    ClassicalInstrument acc = simulate_classical(classicalize(circ));
    std::vector<std::string> zero_in{"P1", "P2", "P3"};
    for (const auto& p : kParties) zero_in.push_back(anc_in_name(p));
    for (const auto& n : zero_in)
      acc = classical_link(ClassicalInstrument::deterministic({}, {{n, 2}}, [](Index) { return Index{0}; }), acc);
    acc = marginalize(acc, {"F1", "F2", "F3"});
    acc = reorder(acc, {}, {anc_out_name("A"), anc_out_name("B"), anc_out_name("C")});
    for (Index o = 0; o < 8; ++o) c.at({(o >> 2) & 1, (o >> 1) & 1, o & 1}, i) = acc.at(0, o);
  }
  return c;
}

DemoReport bw_inequality_demo() {
  DemoReport r;
  r.born = born_correlation();
  r.circuit = circuit_correlation();
  r.classical = classical_circuit_correlation();
  std::map<std::string, ClassicalInstrument> strategies;
  for (const auto& p : kParties) strategies.emplace(p, bw_strategy(p));
  r.formula = bw_classical_correlation(strategies);
  r.routes_agree = r.born == r.circuit && r.circuit == r.classical && r.classical == r.formula;
  r.i1 = eval_inequality(r.born, make_I1());
  for (const auto& x : r.born.p)
    if (x == 1) ++r.unit_entries;
  return r;
}

}  // namespace tds::bw
