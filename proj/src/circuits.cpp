#include "tds/circuits.hpp"

#include <algorithm>
#include <map>

namespace tds {

namespace {

std::map<std::string, std::string> restrict_mapping(const std::map<std::string, std::string>& m, const LabelList& ls) {
  std::map<std::string, std::string> out;
  for (const auto& l : ls) {
    auto it = m.find(l.name);
    if (it != m.end()) out.emplace(it->first, it->second);
  }
  return out;
}

UnitaryBlock relabel_some(const UnitaryBlock& u, const std::map<std::string, std::string>& m) {
  return relabel(u, restrict_mapping(m, concat(u.in_labels(), u.out_labels())));
}

SystemLabel renamed(SystemLabel l, const std::map<std::string, std::string>& m) {
  auto it = m.find(l.name);
  if (it != m.end()) l.name = it->second;
  return l;
}

SystemLabel label_in(const LabelList& ls, const std::string& name) {
  int i = find_label(ls, name);
  if (i < 0) throw LabelError("missing wire '" + name + "'");
  return ls[static_cast<std::size_t>(i)];
}

}  // namespace

LabelList Gate::inputs() const {
  return std::visit(
      [](const auto& g) -> LabelList {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, UnitaryGate>) {
          return g.u.in_labels();
        } else if constexpr (std::is_same_v<T, ControlledPairGate>) {
          return concat(g.u0.in_labels(), LabelList{g.control_in});
        } else if constexpr (std::is_same_v<T, PrepareGate>) {
          return {};
        } else {
          return {g.wire};
        }
      },
      op);
}

LabelList Gate::outputs() const {
  return std::visit(
      [](const auto& g) -> LabelList {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, UnitaryGate>) {
          return g.u.out_labels();
        } else if constexpr (std::is_same_v<T, ControlledPairGate>) {
          return concat(g.u0.out_labels(), LabelList{g.control_out});
        } else if constexpr (std::is_same_v<T, PrepareGate>) {
          return {g.wire};
        } else {
          return {};
        }
      },
      op);
}

Gate unitary_gate(std::string name, UnitaryBlock u) { return Gate{std::move(name), UnitaryGate{std::move(u)}}; }

Gate controlled_gate(std::string name, UnitaryBlock u0, UnitaryBlock u1, SystemLabel control_in, SystemLabel control_out) {
  if (control_in.dim != 2 || control_out.dim != 2) throw DimensionError("controlled gate '" + name + "': control must be a qubit");
  auto sorted_labels = [](LabelList ls) {
    std::sort(ls.begin(), ls.end(), [](const SystemLabel& a, const SystemLabel& b) { return a.name < b.name; });
    return ls;
  };
  if (sorted_labels(u0.in_labels()) != sorted_labels(u1.in_labels()) ||
      sorted_labels(u0.out_labels()) != sorted_labels(u1.out_labels()))
    throw LabelError("controlled gate '" + name + "': branches act on different wires");
  u1 = reorder(u1, names_of(u0.in_labels()), names_of(u0.out_labels()));
  return Gate{std::move(name), ControlledPairGate{std::move(u0), std::move(u1), std::move(control_in), std::move(control_out)}};
}

Gate prepare_gate(std::string name, SystemLabel wire, Eigen::VectorXcd state) {
  if (state.size() != wire.dim) throw DimensionError("prepare gate '" + name + "': state dim mismatch");
  return Gate{std::move(name), PrepareGate{std::move(wire), std::move(state)}};
}

Gate project_gate(std::string name, SystemLabel wire, Eigen::VectorXcd state) {
  if (state.size() != wire.dim) throw DimensionError("project gate '" + name + "': state dim mismatch");
  return Gate{std::move(name), ProjectGate{std::move(wire), std::move(state)}};
}

Gate trace_gate(std::string name, SystemLabel wire) { return Gate{std::move(name), TraceOutGate{std::move(wire)}}; }

LabeledTensor gate_choi(const Gate& g) {
  return std::visit(
      [&](const auto& op) -> LabeledTensor {
        using T = std::decay_t<decltype(op)>;
        if constexpr (std::is_same_v<T, UnitaryGate>) {
          return pure_choi(op.u);
        } else if constexpr (std::is_same_v<T, ControlledPairGate>) {
          auto c0 = tensor(pure_choi(op.u0), tensor(basis_ket(op.control_in, 0), basis_ket(op.control_out, 0)));
          auto c1 = tensor(pure_choi(op.u1), tensor(basis_ket(op.control_in, 1), basis_ket(op.control_out, 1)));
          return c0 + c1;
        } else if constexpr (std::is_same_v<T, PrepareGate>) {
          return LabeledTensor({op.wire}, op.state);
        } else if constexpr (std::is_same_v<T, ProjectGate>) {
          return LabeledTensor({op.wire}, op.state.conjugate());
        } else {
          throw CircuitError("gate '" + g.name + "': a discard has no pure Choi");
        }
      },
      g.op);
}

Gate relabel(const Gate& g, const std::map<std::string, std::string>& m) {
  return std::visit(
      [&](const auto& op) -> Gate {
        using T = std::decay_t<decltype(op)>;
        if constexpr (std::is_same_v<T, UnitaryGate>) {
          return Gate{g.name, UnitaryGate{relabel_some(op.u, m)}};
        } else if constexpr (std::is_same_v<T, ControlledPairGate>) {
          return Gate{g.name, ControlledPairGate{relabel_some(op.u0, m), relabel_some(op.u1, m), renamed(op.control_in, m),
                                                 renamed(op.control_out, m)}};
        } else {
          T copy = op;
          copy.wire = renamed(op.wire, m);
          return Gate{g.name, copy};
        }
      },
      g.op);
}

TemporalCircuit::TemporalCircuit(std::vector<Gate> gates) : gates_(std::move(gates)) {
  std::map<std::string, Index> produced, consumed;
  std::vector<SystemLabel> in_order, out_order;
  for (const auto& g : gates_) {
    if (std::holds_alternative<ProjectGate>(g.op) || std::holds_alternative<TraceOutGate>(g.op)) non_unitary_ = true;
    for (const auto& w : g.inputs()) {
      if (consumed.count(w.name)) throw CircuitError("wire '" + w.name + "' consumed twice (gate '" + g.name + "')");
      auto it = produced.find(w.name);
      if (it != produced.end()) {
        if (it->second != w.dim) throw DimensionError("wire '" + w.name + "' changes dim at gate '" + g.name + "'");
      } else {
        in_order.push_back(w);
      }
      consumed.emplace(w.name, w.dim);
      if (std::holds_alternative<TraceOutGate>(g.op)) discarded_.push_back(w);
    }
    for (const auto& w : g.outputs()) {
      if (produced.count(w.name)) throw CircuitError("wire '" + w.name + "' produced twice (gate '" + g.name + "')");
      if (consumed.count(w.name))
        throw CircuitError("wire '" + w.name + "' consumed before it is produced (gate '" + g.name + "')");
      produced.emplace(w.name, w.dim);
      out_order.push_back(w);
    }
  }
  for (const auto& w : in_order) ext_in_.push_back(w);
  for (const auto& w : out_order)
    if (!consumed.count(w.name)) ext_out_.push_back(w);
  // A discarded wire that was never produced is an external input that is dropped.
  LabelList kept;
  for (const auto& w : discarded_)
    if (produced.count(w.name)) kept.push_back(w);
  discarded_ = kept;
}

const Gate& TemporalCircuit::gate(const std::string& name) const {
  for (const auto& g : gates_)
    if (g.name == name) return g;
  throw CircuitError("no gate '" + name + "'");
}

LabeledTensor simulate_choi(const TemporalCircuit& c) {
  LabeledTensor acc;
  for (const auto& g : c.gates()) {
    if (std::holds_alternative<TraceOutGate>(g.op)) continue;
    acc = link(acc, gate_choi(g));
  }
  std::vector<std::string> order = names_of(c.external_inputs());
  for (const auto& n : names_of(c.external_outputs())) order.push_back(n);
  for (const auto& n : names_of(c.discarded())) order.push_back(n);
  // Discarded external inputs never appear in the Choi; skip names that are absent.
  std::vector<std::string> present;
  for (const auto& n : order)
    if (acc.has(n)) present.push_back(n);
  return permute(acc, present);
}

LabeledOperator simulate_mixed(const TemporalCircuit& c) {
  auto m = outer(simulate_choi(c));
  if (c.discarded().empty()) return m;
  return partial_trace(m, names_of(c.discarded()));
}

TemporalCircuit build_bipartite_comb(const UnitaryBlock& omega1, const UnitaryBlock& omega2, const UnitaryBlock& u_A) {
  for (const auto& l : u_A.in_labels())
    if (find_label(omega1.out_labels(), l.name) >= 0 && label_in(omega1.out_labels(), l.name).dim != l.dim)
      throw DimensionError("comb: omega1 and U_A disagree on '" + l.name + "'");
  bool chained_in = false, chained_out = false;
  for (const auto& l : u_A.in_labels()) chained_in = chained_in || find_label(omega1.out_labels(), l.name) >= 0;
  for (const auto& l : u_A.out_labels()) chained_out = chained_out || find_label(omega2.in_labels(), l.name) >= 0;
  if (!chained_in || !chained_out) throw CircuitError("comb: U_A is not wired between omega1 and omega2");
  return TemporalCircuit({unitary_gate("omega1", omega1), unitary_gate("U_A", u_A), unitary_gate("omega2", omega2)});
}

// ---- coherently controlled order -------------------------------------------

TemporalCircuit switch_circuit(const SwitchOperations& ops, const UnitaryBlock& u_A, const UnitaryBlock& u_B,
                               const PartySpec& A, const PartySpec& B, bool bar_identities) {
  using namespace wire;
  if (!A.anc_in || !A.anc_out || !B.anc_in || !B.anc_out)
    throw LabelError("switch circuit: parties need ancilla wires (dim 1 allowed)");
  if (A.in.dim != B.in.dim || A.out.dim != B.out.dim) throw DimensionError("switch circuit: party dims differ");
  if (A.anc_in->dim != A.anc_out->dim || B.anc_in->dim != B.anc_out->dim)
    throw DimensionError("switch circuit: ancilla in/out dims differ");
  const SystemLabel al{alpha, A.anc_in->dim}, be{beta, B.anc_in->dim};
  const SystemLabel q1{Q1, 2}, q1p{Q1p, 2}, q2{Q2, 2}, q2p{Q2p, 2};

  auto s1_0 = kron(relabel(u_A, {{A.in.name, T1}, {A.out.name, T1p}, {A.anc_out->name, alpha}}),
                   identity_block({*B.anc_in}, {be}));
  auto s1_1 = kron(relabel(u_B, {{B.in.name, T1}, {B.out.name, T1p}, {B.anc_out->name, beta}}),
                   identity_block({*A.anc_in}, {al}));
  auto s2_0 = kron(relabel(u_B, {{B.in.name, T2}, {B.anc_in->name, beta}, {B.out.name, T2p}}),
                   identity_block({al}, {*A.anc_out}));
  auto s2_1 = kron(relabel(u_A, {{A.in.name, T2}, {A.anc_in->name, alpha}, {A.out.name, T2p}}),
                   identity_block({be}, {*B.anc_out}));

  UnitaryBlock w1 = ops.omega1, w2o = ops.omega2_open, w2c = ops.omega2_closed, w3 = ops.omega3;
  if (!bar_identities) {
    const std::map<std::string, std::string> unbar{{T1bar, T1}, {Q1bar, Q1}, {T1pbar, T1p},
                                                   {T2bar, T2}, {T2pbar, T2p}, {Q2pbar, Q2p}};
    w1 = relabel_some(w1, unbar);
    w2o = relabel_some(w2o, unbar);
    w2c = relabel_some(w2c, unbar);
    w3 = relabel_some(w3, unbar);
  }

  std::vector<Gate> gates;
  if (ops.has_pf) gates.push_back(prepare_gate("prep_p", SystemLabel{p, 2}, Eigen::Vector2cd(1, 0)));
  gates.push_back(unitary_gate("omega1", w1));
  if (bar_identities) {
    gates.push_back(unitary_gate("id_T1", identity_block({{T1bar, A.in.dim}}, {{T1, A.in.dim}})));
    gates.push_back(unitary_gate("id_Q1", identity_block({{Q1bar, 2}}, {q1})));
  }
  gates.push_back(controlled_gate("stage1", s1_0, s1_1, q1, q1p));
  if (bar_identities) gates.push_back(unitary_gate("id_T1'", identity_block({{T1p, A.out.dim}}, {{T1pbar, A.out.dim}})));
  gates.push_back(controlled_gate("omega2", w2o, w2c, q1p, q2));
  if (bar_identities) gates.push_back(unitary_gate("id_T2", identity_block({{T2bar, A.in.dim}}, {{T2, A.in.dim}})));
  gates.push_back(controlled_gate("stage2", s2_0, s2_1, q2, q2p));
  if (bar_identities) {
    gates.push_back(unitary_gate("id_T2'", identity_block({{T2p, A.out.dim}}, {{T2pbar, A.out.dim}})));
    gates.push_back(unitary_gate("id_Q2'", identity_block({q2p}, {{Q2pbar, 2}})));
  }
  gates.push_back(unitary_gate("omega3", w3));
  if (ops.has_pf) gates.push_back(project_gate("proj_f", SystemLabel{f, 2}, Eigen::Vector2cd(1, 0)));
  return TemporalCircuit(std::move(gates));
}

namespace {

Index party_dim(const QcqcComponents& c) { return c.A.in.dim; }

void expect_shape(const Eigen::MatrixXcd& m, Index rows, Index cols, const char* what) {
  if (m.rows() != rows || m.cols() != cols)
    throw ShapeError(std::string("component ") + what + " has shape " + std::to_string(m.rows()) + "x" +
                     std::to_string(m.cols()) + ", expected " + std::to_string(rows) + "x" + std::to_string(cols));
}

Eigen::MatrixXcd tilde_or_identity(const std::optional<Eigen::MatrixXcd>& m, Index n) {
  return m ? *m : Eigen::MatrixXcd::Identity(n, n);
}

}  // namespace

void validate_components(const QcqcComponents& c, double tol) {
  const Index d = party_dim(c);
  for (Index x : {c.A.in.dim, c.A.out.dim, c.B.in.dim, c.B.out.dim})
    if (x != d) throw DimensionError("qcqc: all party wires must share one dim");
  if (c.lambda1 != c.lambda2 || c.rho1 != c.rho2) throw DimensionError("qcqc: unitary ν₂ needs λ1 = λ2 and ρ1 = ρ2");
  if (c.lambda1 < 0 || c.rho1 < 0 || c.lambda1 + c.rho1 == 0) throw DimensionError("qcqc: empty memory");
  const Index l = c.lambda1, r = c.rho1;
  if (total_dim(c.past) != d * (l + r) || total_dim(c.future) != d * (l + r))
    throw DimensionError("qcqc: past/future dims must equal d(λ+ρ)");
  expect_shape(c.nu1_ab, d * l, d * l, "nu1_ab");
  expect_shape(c.nu2_ab, d * l, d * l, "nu2_ab");
  expect_shape(c.nu3_ab, d * l, d * l, "nu3_ab");
  expect_shape(c.nu1_ba, d * r, d * r, "nu1_ba");
  expect_shape(c.nu2_ba, d * r, d * r, "nu2_ba");
  expect_shape(c.nu3_ba, d * r, d * r, "nu3_ba");
  const std::pair<const std::optional<Eigen::MatrixXcd>*, Index> tildes[] = {
      {&c.tnu1_ab, d * r}, {&c.tnu2_ab, d * r}, {&c.tnu3_ab, d * r},
      {&c.tnu1_ba, d * l}, {&c.tnu2_ba, d * l}, {&c.tnu3_ba, d * l}};
  for (const auto& [t, n] : tildes)
    if (*t) expect_shape(**t, n, n, "tilde component");
  auto unitary = [&](const Eigen::MatrixXcd& m) {
    if (m.size() == 0) return true;
    return (m.adjoint() * m - Eigen::MatrixXcd::Identity(m.cols(), m.cols())).cwiseAbs().maxCoeff() <= tol;
  };
  for (const auto* m : {&c.nu1_ab, &c.nu2_ab, &c.nu3_ab, &c.nu1_ba, &c.nu2_ba, &c.nu3_ba})
    if (!unitary(*m)) throw ShapeError("qcqc: a ν component is not unitary");
  for (const auto& [t, n] : tildes)
    if (*t && !unitary(**t)) throw ShapeError("qcqc: a tilde component is not unitary");
}

SwitchOperations qcqc_operations(const QcqcComponents& c) {
  using namespace wire;
  validate_components(c);
  const Index d = party_dim(c), l = c.lambda1, r = c.rho1, e = l + r;
  const Index dl = d * l, fl = d * l;
  const Index dp = total_dim(c.past), df = total_dim(c.future);
  const Eigen::MatrixXcd t1ab = tilde_or_identity(c.tnu1_ab, d * r), t2ab = tilde_or_identity(c.tnu2_ab, d * r),
                         t3ab = tilde_or_identity(c.tnu3_ab, d * r), t1ba = tilde_or_identity(c.tnu1_ba, d * l),
                         t2ba = tilde_or_identity(c.tnu2_ba, d * l), t3ba = tilde_or_identity(c.tnu3_ba, d * l);

  // ω₁: (past, p) → (T1bar, E1, Q1bar); E1 = λ ⊕ ρ with the λ block first.
  Eigen::MatrixXcd w1 = Eigen::MatrixXcd::Zero(d * e * 2, dp * 2);
  auto row1 = [&](Index t, Index ee, Index q) { return (t * e + ee) * 2 + q; };
  for (Index i = 0; i < dp; ++i) {
    for (Index pp = 0; pp < 2; ++pp) {
      const Index col = i * 2 + pp;
      const bool left = i < dl;
      const Index k = left ? i : i - dl;
      const Eigen::MatrixXcd& m = left ? (pp == 0 ? c.nu1_ab : t1ba) : (pp == 0 ? c.nu1_ba : t1ab);
      const Index anc = left ? l : r, off = left ? 0 : l;
      // branch: Q1 = 0 for A first (ν₁^{A≺B}, ν̃₁^{A≺B}), Q1 = 1 otherwise
      const Index q = (left == (pp == 0)) ? 0 : 1;
      for (Index t = 0; t < d; ++t)
        for (Index a = 0; a < anc; ++a) w1(row1(t, off + a, q), col) = m(t * anc + a, k);
    }
  }
  LabelList w1_in = concat(c.past, LabelList{{p, 2}});
  UnitaryBlock omega1(w1_in, {{T1bar, d}, {E1, e}, {Q1bar, 2}}, std::move(w1));

  // ω₂: (T1'bar, E1) → (T2bar, E2), block diagonal in λ/ρ.
  auto omega2 = [&](const Eigen::MatrixXcd& on_l, const Eigen::MatrixXcd& on_r) {
    Eigen::MatrixXcd w = Eigen::MatrixXcd::Zero(d * e, d * e);
    for (Index x = 0; x < d; ++x)
      for (Index ee = 0; ee < e; ++ee) {
        const bool lb = ee < l;
        const Index anc = lb ? l : r, a = lb ? ee : ee - l, off = lb ? 0 : l;
        const Eigen::MatrixXcd& m = lb ? on_l : on_r;
        for (Index y = 0; y < d; ++y)
          for (Index b = 0; b < anc; ++b) w(y * e + off + b, x * e + ee) = m(y * anc + b, x * anc + a);
      }
    return UnitaryBlock({{T1pbar, d}, {E1, e}}, {{T2bar, d}, {E2, e}}, std::move(w));
  };
  UnitaryBlock w2o = omega2(c.nu2_ab, t2ab);
  UnitaryBlock w2c = omega2(t2ba, c.nu2_ba);

  // ω₃: (T2'bar, E2, Q2'bar) → (future, f).
  Eigen::MatrixXcd w3 = Eigen::MatrixXcd::Zero(df * 2, d * e * 2);
  for (Index x = 0; x < d; ++x)
    for (Index ee = 0; ee < e; ++ee)
      for (Index q = 0; q < 2; ++q) {
        const Index col = (x * e + ee) * 2 + q;
        const bool lb = ee < l;
        const Index anc = lb ? l : r, a = lb ? ee : ee - l;
        const Eigen::MatrixXcd& m = q == 0 ? (lb ? c.nu3_ab : t3ab) : (lb ? t3ba : c.nu3_ba);
        const Index foff = lb ? 0 : fl;
        const Index ff = (q == 0) == lb ? 0 : 1;
        for (Index k = 0; k < m.rows(); ++k) w3((foff + k) * 2 + ff, col) = m(k, x * anc + a);
      }
  UnitaryBlock omega3({{T2pbar, d}, {E2, e}, {Q2pbar, 2}}, concat(c.future, LabelList{{f, 2}}), std::move(w3));
  return SwitchOperations{std::move(omega1), std::move(w2o), std::move(w2c), std::move(omega3), true};
}

ProcessVector qcqc_process_vector(const QcqcComponents& c) {
  validate_components(c);
  const Index d = party_dim(c), l = c.lambda1, r = c.rho1;
  const Index dp = total_dim(c.past), df = total_dim(c.future);
  auto branch = [&](Index anc, Index poff, const Eigen::MatrixXcd& n1, const Eigen::MatrixXcd& n2,
                    const Eigen::MatrixXcd& n3, const PartySpec& first, const PartySpec& second) {
    const SystemLabel m1{"mem1", anc}, m2{"mem2", anc};
    Eigen::MatrixXcd e1 = Eigen::MatrixXcd::Zero(d * anc, dp);
    e1.middleCols(poff, d * anc) = n1;
    Eigen::MatrixXcd e3 = Eigen::MatrixXcd::Zero(df, d * anc);
    e3.middleRows(poff, d * anc) = n3;
    return link_chain<cd>({pure_choi(UnitaryBlock(c.past, {first.in, m1}, std::move(e1))),
                           pure_choi(UnitaryBlock({first.out, m1}, {second.in, m2}, n2)),
                           pure_choi(UnitaryBlock({second.out, m2}, c.future, std::move(e3)))});
  };
  LabelList layout = concat(c.past, LabelList{c.A.in, c.A.out, c.B.in, c.B.out});
  layout = concat(layout, c.future);
  std::optional<LabeledTensor> acc;
  if (l > 0) acc = permute_like(branch(l, 0, c.nu1_ab, c.nu2_ab, c.nu3_ab, c.A, c.B), layout);
  if (r > 0) {
    auto ba = permute_like(branch(r, d * l, c.nu1_ba, c.nu2_ba, c.nu3_ba, c.B, c.A), layout);
    acc = acc ? *acc + ba : ba;
  }
  return ProcessVector(*acc, {c.A, c.B}, c.past, c.future);
}

TemporalCircuit assemble_qcqc(const QcqcComponents& comp, const UnitaryBlock& u_A, const UnitaryBlock& u_B) {
  return switch_circuit(qcqc_operations(comp), u_A, u_B, comp.A, comp.B, false);
}

QcqcComponents switch_components() {
  QcqcComponents c;
  c.A = party("A", 2, 2, 2);
  c.B = party("B", 2, 2, 2);
  c.past = {{"P_O", 4}};
  c.future = {{"F_I", 4}};
  c.lambda1 = c.lambda2 = c.rho1 = c.rho2 = 1;
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(2, 2);
  c.nu1_ab = c.nu2_ab = c.nu3_ab = c.nu1_ba = c.nu2_ba = c.nu3_ba = id;
  return c;
}

TemporalCircuit tripartite_circuit(const ProcessVector& process, const UnitaryBlock& u_A, const UnitaryBlock& u_B,
                                   const UnitaryBlock& u_C, const SwitchDecomposer& decomposer) {
  if (!decomposer) throw CircuitError("tripartite_circuit: no decomposition available");
  if (process.parties().size() != 3) throw ShapeError("tripartite_circuit: process must have three parties");
  const PartySpec* first = nullptr;
  std::vector<const PartySpec*> rest;
  for (const auto& p : process.parties()) {
    if (find_label(u_C.in_labels(), p.in.name) >= 0)
      first = &p;
    else
      rest.push_back(&p);
  }
  if (!first || rest.size() != 2) throw LabelError("tripartite_circuit: U_C does not act on a party input");
  auto with_anc = [](PartySpec p, const UnitaryBlock& u) {
    for (const auto& l : u.in_labels())
      if (l.name != p.in.name) p.anc_in = l;
    for (const auto& l : u.out_labels())
      if (l.name != p.out.name) p.anc_out = l;
    return p;
  };
  return switch_circuit(decomposer(u_C), u_A, u_B, with_anc(*rest[0], u_A), with_anc(*rest[1], u_B), true);
}

// ---- disconnection ----------------------------------------------------------

std::string tau_name(const std::string& w) { return "tau_" + w; }
std::string tau_tilde_name(const std::string& w) { return "tautilde_" + w; }

TemporalCircuit disconnect_fragment(const TemporalCircuit& c, const std::set<std::string>& wires) {
  std::vector<Gate> gates = c.gates();
  for (const auto& w : wires) {
    int prod = -1, cons = -1;
    SystemLabel lab;
    for (std::size_t i = 0; i < gates.size(); ++i) {
      for (const auto& l : gates[i].outputs())
        if (l.name == w) {
          prod = static_cast<int>(i);
          lab = l;
        }
      for (const auto& l : gates[i].inputs())
        if (l.name == w) {
          cons = static_cast<int>(i);
          lab = l;
        }
    }
    if (prod < 0 && cons < 0) throw CircuitError("disconnect_fragment: no wire '" + w + "'");
    const SystemLabel tau{tau_name(w), lab.dim}, tilde{tau_tilde_name(w), lab.dim};
    const std::string shifted = w + "^s";
    if (cons >= 0) {
      // consumer now reads the fresh ancilla; the original content leaves on tautilde
      gates[static_cast<std::size_t>(cons)] = relabel(gates[static_cast<std::size_t>(cons)], {{w, shifted}});
      Gate sw = unitary_gate("swap_" + w, identity_block({lab, tau}, {tilde, {shifted, lab.dim}}));
      gates.insert(gates.begin() + cons, std::move(sw));
    } else {
      gates[static_cast<std::size_t>(prod)] = relabel(gates[static_cast<std::size_t>(prod)], {{w, shifted}});
      Gate sw = unitary_gate("swap_" + w, identity_block({{shifted, lab.dim}, tau}, {tilde, lab}));
      gates.insert(gates.begin() + prod + 1, std::move(sw));
    }
  }
  return TemporalCircuit(std::move(gates));
}

UnitaryBlock swap_probe(const UnitaryBlock& u, const PartySpec& p) {
  const SystemLabel tin{tau_name(p.in.name), p.in.dim}, ttin{tau_tilde_name(p.in.name), p.in.dim};
  const SystemLabel tout{tau_name(p.out.name), p.out.dim}, ttout{tau_tilde_name(p.out.name), p.out.dim};
  auto core = relabel(u, {{p.in.name, tin.name}, {p.out.name, ttout.name}});
  return kron(kron(core, identity_block({p.in}, {ttin})), identity_block({tout}, {p.out}));
}

}  // namespace tds
