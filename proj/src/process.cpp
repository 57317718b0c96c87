#include "tds/process.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace tds {

std::string in_name(const std::string& p) { return p + "_I"; }
std::string out_name(const std::string& p) { return p + "_O"; }
std::string anc_in_name(const std::string& p) { return p + "_I'"; }
std::string anc_out_name(const std::string& p) { return p + "_O'"; }

PartySpec party(const std::string& name, Index d_in, Index d_out, Index d_anc) {
  PartySpec p{name, {in_name(name), d_in}, {out_name(name), d_out}, std::nullopt, std::nullopt};
  if (d_anc > 0) {
    p.anc_in = SystemLabel{anc_in_name(name), d_anc};
    p.anc_out = SystemLabel{anc_out_name(name), d_anc};
  }
  return p;
}

ProcessVector::ProcessVector(LabeledTensor tensor, std::vector<PartySpec> parties, LabelList past, LabelList future)
    : tensor_(std::move(tensor)), parties_(std::move(parties)), past_(std::move(past)), future_(std::move(future)) {
  std::sort(parties_.begin(), parties_.end(), [](const PartySpec& a, const PartySpec& b) { return a.name < b.name; });
  LabelList all = past_;
  for (const auto& p : parties_) {
    all.push_back(p.in);
    all.push_back(p.out);
  }
  all = concat(all, future_);
  check_labels(all);
  if (all.size() != tensor_.rank()) throw LabelError("process tensor legs do not match past/parties/future");
  for (const auto& l : all) {
    if (tensor_.label(l.name).dim != l.dim) throw DimensionError("process leg '" + l.name + "' has inconsistent dim");
  }
}

const PartySpec& ProcessVector::party(const std::string& name) const {
  for (const auto& p : parties_)
    if (p.name == name) return p;
  throw LabelError("no party '" + name + "'");
}

LabelList ProcessVector::operator_inputs() const {
  LabelList ls = past_;
  for (const auto& p : parties_) ls.push_back(p.out);
  return ls;
}

LabelList ProcessVector::operator_outputs() const {
  LabelList ls = future_;
  for (const auto& p : parties_) ls.push_back(p.in);
  return ls;
}

UnitaryBlock ProcessVector::as_unitary() const {
  return choi_to_matrix(tensor_, names_of(operator_inputs()), names_of(operator_outputs()));
}

double unitarity_residual(const ProcessVector& u) {
  auto b = u.as_unitary();
  if (b.matrix().rows() != b.matrix().cols()) return std::numeric_limits<double>::infinity();
  return unitarity_residual(b);
}

double OutcomeTable::at(const std::vector<Index>& outcome) const {
  if (outcome.size() != cards.size()) throw ShapeError("outcome tuple has wrong arity");
  Index idx = 0;
  for (std::size_t k = 0; k < cards.size(); ++k) idx = idx * cards[k] + outcome[k];
  return probs[static_cast<std::size_t>(idx)];
}

double OutcomeTable::total() const { return std::accumulate(probs.begin(), probs.end(), 0.0); }

double instrument_defect(const Instrument& inst, const PartySpec& p) {
  if (inst.outcomes.empty()) return std::numeric_limits<double>::infinity();
  LabelList ls{p.in, p.out};
  Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(total_dim(ls), total_dim(ls));
  double defect = 0;
  for (const auto& m : inst.outcomes) {
    auto pm = permute(m, names_of(ls));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (pm.matrix() + pm.matrix().adjoint()));
    defect = std::max(defect, -es.eigenvalues().minCoeff());
    defect = std::max(defect, static_cast<double>((pm.matrix() - pm.matrix().adjoint()).cwiseAbs().maxCoeff()));
    sum += pm.matrix();
  }
  auto reduced = partial_trace(LabeledOperator(ls, sum), {p.out.name});
  Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(p.in.dim, p.in.dim);
  defect = std::max(defect, static_cast<double>((reduced.matrix() - id).cwiseAbs().maxCoeff()));
  return defect;
}

OutcomeTable born_rule(const ProcessMatrix& w, const std::vector<Instrument>& instruments, double tol) {
  if (!w.future.empty()) throw LabelError("born_rule: process matrix has untraced future legs");
  std::vector<const Instrument*> ordered;
  OutcomeTable table;
  for (const auto& p : w.parties) {
    auto it = std::find_if(instruments.begin(), instruments.end(), [&](const Instrument& i) { return i.party == p.name; });
    if (it == instruments.end()) throw LabelError("born_rule: no instrument for party '" + p.name + "'");
    if (instrument_defect(*it, p) > tol) throw ShapeError("born_rule: invalid instrument for party '" + p.name + "'");
    for (const auto& m : it->outcomes) {
      if (m.labels().size() != 2 || find_label(m.labels(), p.in.name) < 0 || find_label(m.labels(), p.out.name) < 0)
        throw LabelError("born_rule: instrument labels do not match party '" + p.name + "'");
    }
    ordered.push_back(&*it);
    table.parties.push_back(p.name);
    table.cards.push_back(static_cast<Index>(it->outcomes.size()));
  }
  Index n = 1;
  for (auto c : table.cards) n *= c;
  table.probs.assign(static_cast<std::size_t>(n), 0.0);
  std::vector<Index> digit(ordered.size(), 0);
  for (Index idx = 0; idx < n; ++idx) {
    Index rest = idx;
    for (std::size_t k = ordered.size(); k-- > 0;) {
      digit[k] = rest % table.cards[k];
      rest /= table.cards[k];
    }
    LabeledOperator m;
    for (std::size_t k = 0; k < ordered.size(); ++k) m = kron(m, ordered[k]->outcomes[static_cast<std::size_t>(digit[k])]);
    table.probs[static_cast<std::size_t>(idx)] = link_mixed(w.op, m).matrix()(0, 0).real();
  }
  return table;
}

namespace {

LabelList party_io_labels(const std::vector<PartySpec>& parties) {
  LabelList ls;
  for (const auto& p : parties) {
    ls.push_back(p.in);
    ls.push_back(p.out);
  }
  return ls;
}

LabeledOperator random_channel_choi(Rng& rng, const PartySpec& p, Index kraus_rank) {
  Eigen::MatrixXcd v = random_isometry(rng, p.out.dim * kraus_rank, p.in.dim);
  std::vector<UnitaryBlock> ks;
  for (Index k = 0; k < kraus_rank; ++k) {
    Eigen::MatrixXcd kk(p.out.dim, p.in.dim);
    for (Index r = 0; r < p.out.dim; ++r) kk.row(r) = v.row(r * kraus_rank + k);
    ks.emplace_back(LabelList{p.in}, LabelList{p.out}, std::move(kk));
  }
  return mixed_choi(ks);
}

}  // namespace

Instrument random_instrument(Rng& rng, const PartySpec& p, int n_outcomes) {
  const Index rank = std::max<Index>(n_outcomes, 1 + static_cast<Index>(rng() % static_cast<std::uint64_t>(p.in.dim * p.out.dim)));
  Eigen::MatrixXcd v = random_isometry(rng, p.out.dim * rank, p.in.dim);
  Instrument inst{p.name, {}};
  for (int o = 0; o < n_outcomes; ++o) {
    std::vector<UnitaryBlock> ks;
    for (Index k = o; k < rank; k += n_outcomes) {
      Eigen::MatrixXcd kk(p.out.dim, p.in.dim);
      for (Index r = 0; r < p.out.dim; ++r) kk.row(r) = v.row(r * rank + k);
      ks.emplace_back(LabelList{p.in}, LabelList{p.out}, std::move(kk));
    }
    inst.outcomes.push_back(mixed_choi(ks));
  }
  return inst;
}

ValidationReport validate_process_matrix(const ProcessMatrix& w, int n_samples, Rng& rng, double tol) {
  ValidationReport r;
  const auto& m = w.op.matrix();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
  r.min_eigenvalue = es.eigenvalues().minCoeff();
  r.positive = r.min_eigenvalue >= -tol && is_hermitian(w.op, tol);
  r.trace = m.trace().real();
  r.expected_trace = 1;
  for (const auto& p : w.parties) r.expected_trace *= static_cast<double>(p.out.dim);
  r.trace_ok = std::abs(r.trace - r.expected_trace) <= tol * std::max(1.0, r.expected_trace);
  r.samples = n_samples;
  for (int s = 0; s < n_samples; ++s) {
    LabeledOperator chan;
    for (const auto& p : w.parties) {
      const Index rank = 1 + static_cast<Index>(rng() % static_cast<std::uint64_t>(p.in.dim * p.out.dim));
      chan = kron(chan, random_channel_choi(rng, p, rank));
    }
    LabeledOperator wop = w.op;
    if (!w.future.empty()) wop = partial_trace(wop, names_of(w.future));
    const cd total = link_mixed(wop, chan).matrix()(0, 0);
    r.max_normalization_error = std::max(r.max_normalization_error, std::abs(total - cd(1.0)));
  }
  r.normalization_ok = r.max_normalization_error <= std::max(tol, 1e-9);
  return r;
}

ProcessMatrix reduce_unitary_extension(const ProcessVector& u, const LabeledOperator& past_state, bool trace_future) {
  const auto past_names = names_of(u.past());
  if (past_state.labels().size() != u.past().size()) throw LabelError("reduce: past_state must cover the past legs");
  const auto rho = permute(past_state, past_names).matrix();
  const LabelList xs = party_io_labels(u.parties());
  const Index dp = total_dim(u.past()), dx = total_dim(xs), df = total_dim(u.future());

  using RM = Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  auto order = past_names;
  if (trace_future) {
    for (const auto& n : names_of(u.future())) order.push_back(n);
    for (const auto& n : names_of(xs)) order.push_back(n);
  } else {
    for (const auto& n : names_of(xs)) order.push_back(n);
    for (const auto& n : names_of(u.future())) order.push_back(n);
  }
  const auto g = permute(u.tensor(), order);
  Eigen::Map<const RM> M(g.amps().data(), dp, dx * df);
  // W[x, x'] = Σ_{i i'} M[i, x] ρ[i, i'] conj(M[i', x']), summed over traced future blocks.
  RM T = rho * M.conjugate();
  ProcessMatrix w;
  w.parties = u.parties();
  if (trace_future) {
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(dx, dx);
    for (Index f = 0; f < df; ++f) acc += M.middleCols(f * dx, dx).transpose() * T.middleCols(f * dx, dx);
    w.op = LabeledOperator(xs, std::move(acc));
  } else {
    Eigen::MatrixXcd acc = M.transpose() * T;
    w.op = LabeledOperator(concat(xs, u.future()), std::move(acc));
    w.future = u.future();
  }
  return w;
}

ProcessMatrix reduce_unitary_extension(const ProcessVector& u, const LabeledTensor& past_state, bool trace_future) {
  return reduce_unitary_extension(u, outer(past_state), trace_future);
}

namespace {

void check_local(const PartySpec& p, const UnitaryBlock& loc) {
  if (find_label(loc.in_labels(), p.in.name) < 0 || find_label(loc.out_labels(), p.out.name) < 0)
    throw LabelError("local operation for '" + p.name + "' must act on " + p.in.name + " -> " + p.out.name);
  if (loc.in_labels()[static_cast<std::size_t>(find_label(loc.in_labels(), p.in.name))].dim != p.in.dim ||
      loc.out_labels()[static_cast<std::size_t>(find_label(loc.out_labels(), p.out.name))].dim != p.out.dim)
    throw DimensionError("local operation for '" + p.name + "' has wrong party dims");
}

}  // namespace

LabeledTensor global_unitary(const ProcessVector& u, const std::map<std::string, UnitaryBlock>& locals) {
  LabeledTensor acc = u.tensor();
  std::set<std::string> seen;
  for (const auto& l : u.tensor().labels()) seen.insert(l.name);
  for (const auto& p : u.parties()) {
    auto it = locals.find(p.name);
    if (it == locals.end()) throw LabelError("global_unitary: no local operation for '" + p.name + "'");
    check_local(p, it->second);
    for (const auto& l : concat(it->second.in_labels(), it->second.out_labels())) {
      if (l.name == p.in.name || l.name == p.out.name) continue;
      if (!seen.insert(l.name).second) throw LabelError("global_unitary: ancilla label '" + l.name + "' collides");
    }
    acc = link(acc, pure_choi(it->second));
  }
  return acc;
}

double global_unitarity_residual(const ProcessVector& u, const std::map<std::string, UnitaryBlock>& locals,
                                 const LabeledTensor& global) {
  LabelList in = u.past(), out = u.future();
  for (const auto& p : u.parties()) {
    const auto& loc = locals.at(p.name);
    for (const auto& l : loc.in_labels())
      if (l.name != p.in.name) in.push_back(l);
    for (const auto& l : loc.out_labels())
      if (l.name != p.out.name) out.push_back(l);
  }
  auto b = choi_to_matrix(global, names_of(in), names_of(out));
  if (b.matrix().rows() != b.matrix().cols()) return std::numeric_limits<double>::infinity();
  return unitarity_residual(b);
}

ProcessVector pad_to_equal_dims(const ProcessVector& u) {
  LabeledTensor t = u.tensor();
  LabelList past = u.past(), future = u.future();
  std::vector<PartySpec> parties = u.parties();
  for (auto& p : parties) {
    if (p.in.dim == p.out.dim) continue;
    const Index d = std::lcm(p.in.dim, p.out.dim);
    const Index xi = d / p.in.dim, xo = d / p.out.dim;
    if (xi > 1) {
      SystemLabel src{"P~" + p.name, xi}, pad{p.in.name + "~", xi};
      t = tensor(t, identity_dket(src, pad));
      t = merge_labels(t, {p.in.name, pad.name}, SystemLabel{p.in.name, d});
      past.push_back(src);
      p.in.dim = d;
    }
    if (xo > 1) {
      SystemLabel pad{p.out.name + "~", xo}, dst{"F~" + p.name, xo};
      t = tensor(t, identity_dket(pad, dst));
      t = merge_labels(t, {p.out.name, pad.name}, SystemLabel{p.out.name, d});
      future.push_back(dst);
      p.out.dim = d;
    }
  }
  return ProcessVector(std::move(t), std::move(parties), std::move(past), std::move(future));
}

Instrument instrument_from_dilation(const UnitaryBlock& u, const PartySpec& p, const Eigen::VectorXcd& anc_state) {
  if (!p.anc_in || !p.anc_out) throw LabelError("instrument_from_dilation: party has no ancillas");
  LabeledTensor choi = link(pure_choi(u), LabeledTensor({*p.anc_in}, anc_state));
  Instrument inst{p.name, {}};
  for (Index k = 0; k < p.anc_out->dim; ++k) {
    auto kk = link(choi, basis_ket(*p.anc_out, k));
    inst.outcomes.push_back(outer(permute(kk, {p.in.name, p.out.name})));
  }
  return inst;
}

Instrument measure_prepare_instrument(const PartySpec& p, Index i) {
  Instrument inst{p.name, {}};
  for (Index o = 0; o < p.in.dim; ++o) {
    auto v = tensor(basis_ket(p.in, o), basis_ket(p.out, i));
    inst.outcomes.push_back(outer(v));
  }
  return inst;
}

namespace catalog {

namespace {
inline int bit(Index v, int k) { return static_cast<int>((v >> k) & 1); }
}  // namespace

ProcessMatrix make_W_AF() {
  const std::vector<PartySpec> ps{party("A", 2, 2), party("B", 2, 2), party("C", 2, 2)};
  LabelList ls = party_io_labels(ps);  // A_I A_O B_I B_O C_I C_O
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(64, 64);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c) {
        const int ai = (!b) && c, bi = (!c) && a, ci = (!a) && b;
        const Index idx = ((((ai * 2 + a) * 2 + bi) * 2 + b) * 2 + ci) * 2 + c;
        m(idx, idx) = 1.0;
      }
  return ProcessMatrix{LabeledOperator(ls, std::move(m)), ps, {}};
}

ProcessVector make_U_BW() {
  const std::vector<PartySpec> ps{party("A", 2, 2), party("B", 2, 2), party("C", 2, 2)};
  const LabelList past{qubit("P1"), qubit("P2"), qubit("P3")};
  const LabelList future{qubit("F1"), qubit("F2"), qubit("F3")};
  const LabelList in{past[0], past[1], past[2], ps[0].out, ps[1].out, ps[2].out};
  const LabelList out{ps[0].in, ps[1].in, ps[2].in, future[0], future[1], future[2]};
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(64, 64);
  for (Index col = 0; col < 64; ++col) {
    const int p1 = bit(col, 5), p2 = bit(col, 4), p3 = bit(col, 3), a = bit(col, 2), b = bit(col, 1), c = bit(col, 0);
    const int ai = p1 ^ ((!b) && c), bi = p2 ^ ((!c) && a), ci = p3 ^ ((!a) && b);
    const Index row = (((((ai * 2 + bi) * 2 + ci) * 2 + a) * 2 + b) * 2) + c;
    m(row, col) = 1.0;
  }
  LabeledTensor t = pure_choi(UnitaryBlock(in, out, std::move(m)));
  LabelList layout = concat(past, party_io_labels(ps));
  layout = concat(layout, future);
  return ProcessVector(permute_like(t, layout), ps, past, future);
}

ProcessVector make_switch() {
  const std::vector<PartySpec> ps{party("A", 2, 2), party("B", 2, 2)};
  const SystemLabel pc = qubit("P_c"), pt = qubit("P_t"), fc = qubit("F_c"), ft = qubit("F_t");
  const auto& A = ps[0];
  const auto& B = ps[1];
  LabeledTensor ab = link_chain<cd>({basis_ket(pc, 0), basis_ket(fc, 0), identity_dket(pt, A.in), identity_dket(A.out, B.in),
                                     identity_dket(B.out, ft)});
  LabeledTensor ba = link_chain<cd>({basis_ket(pc, 1), basis_ket(fc, 1), identity_dket(pt, B.in), identity_dket(B.out, A.in),
                                     identity_dket(A.out, ft)});
  LabelList layout{pc, pt, A.in, A.out, B.in, B.out, fc, ft};
  return ProcessVector(permute_like(ab + ba, layout), ps, {pc, pt}, {fc, ft});
}

UnitaryBlock ci_strategy(const std::string& p, int i) {
  const LabelList in{qubit(in_name(p)), qubit(anc_in_name(p))};
  const LabelList out{qubit(out_name(p)), qubit(anc_out_name(p))};
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(4, 4);
  for (int xi = 0; xi < 2; ++xi)
    for (int xa = 0; xa < 2; ++xa) {
      const int xo = xa ^ (i & 1);
      m(xo * 2 + xi, xi * 2 + xa) = 1.0;
    }
  return UnitaryBlock(in, out, std::move(m));
}

UnitaryBlock identity_local(const std::string& p, Index d, Index d_anc) {
  const LabelList in{{in_name(p), d}, {anc_in_name(p), d_anc}};
  const LabelList out{{out_name(p), d}, {anc_out_name(p), d_anc}};
  return identity_block(in, out);
}

}  // namespace catalog

}  // namespace tds
