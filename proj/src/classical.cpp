#include "tds/classical.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace tds {

namespace {

Index card_product(const VarList& vs) {
  Index p = 1;
  for (const auto& v : vs) p *= v.card;
  return p;
}

int find_var(const VarList& vs, const std::string& name) {
  for (std::size_t i = 0; i < vs.size(); ++i)
    if (vs[i].name == name) return static_cast<int>(i);
  return -1;
}

std::vector<Index> strides_of(const VarList& vs) {
  std::vector<Index> s(vs.size(), 1);
  for (std::size_t i = vs.size(); i-- > 1;) s[i - 1] = s[i] * vs[i].card;
  return s;
}

void decode(Index idx, const VarList& vs, std::vector<Index>& out) {
  out.resize(vs.size());
  for (std::size_t i = vs.size(); i-- > 0;) {
    out[i] = idx % vs[i].card;
    idx /= vs[i].card;
  }
}

void check_vars(const VarList& in, const VarList& out) {
  std::set<std::string> seen;
  for (const auto& v : in)
    if (v.card < 1 || !seen.insert(v.name).second) throw LabelError("instrument: bad or duplicate variable '" + v.name + "'");
  for (const auto& v : out)
    if (v.card < 1 || !seen.insert(v.name).second) throw LabelError("instrument: bad or duplicate variable '" + v.name + "'");
}

}  // namespace

VarList vars_of(const LabelList& ls) {
  VarList v;
  for (const auto& l : ls) v.push_back({l.name, l.dim});
  return v;
}

ClassicalInstrument::ClassicalInstrument() : table_{mpq_class(1)} {}

ClassicalInstrument::ClassicalInstrument(VarList in, VarList out, std::vector<mpq_class> table)
    : in_(std::move(in)), out_(std::move(out)), table_(std::move(table)) {
  check_vars(in_, out_);
  if (static_cast<Index>(table_.size()) != n_in() * n_out()) throw DimensionError("instrument table size mismatch");
}

ClassicalInstrument ClassicalInstrument::deterministic(VarList in, VarList out, const std::function<Index(Index)>& f) {
  const Index ni = card_product(in), no = card_product(out);
  std::vector<mpq_class> t(static_cast<std::size_t>(ni * no), mpq_class(0));
  for (Index i = 0; i < ni; ++i) {
    const Index o = f(i);
    if (o < 0 || o >= no) throw DimensionError("deterministic instrument: output index out of range");
    t[static_cast<std::size_t>(i * no + o)] = 1;
  }
  return ClassicalInstrument(std::move(in), std::move(out), std::move(t));
}

Index ClassicalInstrument::n_in() const { return card_product(in_); }
Index ClassicalInstrument::n_out() const { return card_product(out_); }

const mpq_class& ClassicalInstrument::at(Index i, Index o) const {
  return table_[static_cast<std::size_t>(i * n_out() + o)];
}

mpq_class ClassicalInstrument::prob(const std::map<std::string, Index>& a) const {
  auto index = [&](const VarList& vs) {
    Index k = 0;
    for (const auto& v : vs) {
      auto it = a.find(v.name);
      if (it == a.end()) throw LabelError("prob: no value for '" + v.name + "'");
      k = k * v.card + it->second;
    }
    return k;
  };
  return at(index(in_), index(out_));
}

bool ClassicalInstrument::is_normalized() const {
  const Index no = n_out();
  for (Index i = 0; i < n_in(); ++i) {
    mpq_class s = 0;
    for (Index o = 0; o < no; ++o) s += table_[static_cast<std::size_t>(i * no + o)];
    if (s != 1) return false;
  }
  return true;
}

bool ClassicalInstrument::is_deterministic() const {
  for (const auto& x : table_)
    if (x != 0 && x != 1) return false;
  return is_normalized();
}

ClassicalInstrument classical_link(const ClassicalInstrument& a, const ClassicalInstrument& b) {
  VarList shared;
  std::vector<int> a_in_sh(a.in_vars().size(), -1), a_out_sh(a.out_vars().size(), -1);
  std::vector<int> b_in_sh(b.in_vars().size(), -1), b_out_sh(b.out_vars().size(), -1);
  auto share = [&](const RandomVar& x, const RandomVar& y) {
    if (x.card != y.card) throw DimensionError("classical_link: cardinality mismatch on '" + x.name + "'");
    shared.push_back(x);
    return static_cast<int>(shared.size() - 1);
  };
  for (std::size_t i = 0; i < a.in_vars().size(); ++i) {
    const auto& v = a.in_vars()[i];
    if (find_var(b.in_vars(), v.name) >= 0) throw LabelError("classical_link: '" + v.name + "' is an input of both");
    int j = find_var(b.out_vars(), v.name);
    if (j >= 0) a_in_sh[i] = b_out_sh[static_cast<std::size_t>(j)] = share(v, b.out_vars()[static_cast<std::size_t>(j)]);
  }
  for (std::size_t i = 0; i < a.out_vars().size(); ++i) {
    const auto& v = a.out_vars()[i];
    if (find_var(b.out_vars(), v.name) >= 0) throw LabelError("classical_link: '" + v.name + "' is an output of both");
    int j = find_var(b.in_vars(), v.name);
    if (j >= 0) a_out_sh[i] = b_in_sh[static_cast<std::size_t>(j)] = share(v, b.in_vars()[static_cast<std::size_t>(j)]);
  }

  VarList rin, rout;
  std::vector<int> a_in_pos(a.in_vars().size(), -1), a_out_pos(a.out_vars().size(), -1);
  std::vector<int> b_in_pos(b.in_vars().size(), -1), b_out_pos(b.out_vars().size(), -1);
  for (std::size_t i = 0; i < a.in_vars().size(); ++i)
    if (a_in_sh[i] < 0) {
      a_in_pos[i] = static_cast<int>(rin.size());
      rin.push_back(a.in_vars()[i]);
    }
  for (std::size_t i = 0; i < b.in_vars().size(); ++i)
    if (b_in_sh[i] < 0) {
      b_in_pos[i] = static_cast<int>(rin.size());
      rin.push_back(b.in_vars()[i]);
    }
  for (std::size_t i = 0; i < a.out_vars().size(); ++i)
    if (a_out_sh[i] < 0) {
      a_out_pos[i] = static_cast<int>(rout.size());
      rout.push_back(a.out_vars()[i]);
    }
  for (std::size_t i = 0; i < b.out_vars().size(); ++i)
    if (b_out_sh[i] < 0) {
      b_out_pos[i] = static_cast<int>(rout.size());
      rout.push_back(b.out_vars()[i]);
    }

  const auto sin = strides_of(rin), sout = strides_of(rout), ssh = strides_of(shared);
  struct Entry {
    Index key, in_part, out_part;
    const mpq_class* p;
  };
  auto entries = [&](const ClassicalInstrument& x, const std::vector<int>& in_sh, const std::vector<int>& out_sh,
                     const std::vector<int>& in_pos, const std::vector<int>& out_pos) {
    std::vector<Entry> es;
    std::vector<Index> iv, ov;
    const Index no = x.n_out();
    for (Index i = 0; i < x.n_in(); ++i) {
      decode(i, x.in_vars(), iv);
      for (Index o = 0; o < no; ++o) {
        const auto& p = x.table()[static_cast<std::size_t>(i * no + o)];
        if (sgn(p) == 0) continue;
        decode(o, x.out_vars(), ov);
        Entry e{0, 0, 0, &p};
        for (std::size_t k = 0; k < iv.size(); ++k) {
          if (in_sh[k] >= 0)
            e.key += iv[k] * ssh[static_cast<std::size_t>(in_sh[k])];
          else
            e.in_part += iv[k] * sin[static_cast<std::size_t>(in_pos[k])];
        }
        for (std::size_t k = 0; k < ov.size(); ++k) {
          if (out_sh[k] >= 0)
            e.key += ov[k] * ssh[static_cast<std::size_t>(out_sh[k])];
          else
            e.out_part += ov[k] * sout[static_cast<std::size_t>(out_pos[k])];
        }
        es.push_back(e);
      }
    }
    return es;
  };
  const auto ea = entries(a, a_in_sh, a_out_sh, a_in_pos, a_out_pos);
  const auto eb = entries(b, b_in_sh, b_out_sh, b_in_pos, b_out_pos);
  std::vector<std::vector<const Entry*>> bucket(static_cast<std::size_t>(card_product(shared)));
  for (const auto& e : eb) bucket[static_cast<std::size_t>(e.key)].push_back(&e);

  const Index nout = card_product(rout);
  std::vector<mpq_class> t(static_cast<std::size_t>(card_product(rin) * nout), mpq_class(0));
  for (const auto& x : ea)
    for (const Entry* y : bucket[static_cast<std::size_t>(x.key)])
      t[static_cast<std::size_t>((x.in_part + y->in_part) * nout + x.out_part + y->out_part)] += *x.p * *y->p;
  return ClassicalInstrument(std::move(rin), std::move(rout), std::move(t));
}

ClassicalInstrument reorder(const ClassicalInstrument& p, const std::vector<std::string>& in,
                            const std::vector<std::string>& out) {
  if (in.size() != p.in_vars().size() || out.size() != p.out_vars().size())
    throw LabelError("reorder: variable lists do not match");
  VarList nin, nout;
  std::vector<std::size_t> pin, pout;
  for (const auto& n : in) {
    int k = find_var(p.in_vars(), n);
    if (k < 0) throw LabelError("reorder: no input '" + n + "'");
    pin.push_back(static_cast<std::size_t>(k));
    nin.push_back(p.in_vars()[static_cast<std::size_t>(k)]);
  }
  for (const auto& n : out) {
    int k = find_var(p.out_vars(), n);
    if (k < 0) throw LabelError("reorder: no output '" + n + "'");
    pout.push_back(static_cast<std::size_t>(k));
    nout.push_back(p.out_vars()[static_cast<std::size_t>(k)]);
  }
  const auto si = strides_of(nin), so = strides_of(nout);
  std::vector<mpq_class> t(p.table().size());
  std::vector<Index> iv, ov;
  const Index no = p.n_out();
  for (Index i = 0; i < p.n_in(); ++i) {
    decode(i, p.in_vars(), iv);
    Index ni = 0;
    for (std::size_t k = 0; k < pin.size(); ++k) ni += iv[pin[k]] * si[k];
    for (Index o = 0; o < no; ++o) {
      decode(o, p.out_vars(), ov);
      Index nn = 0;
      for (std::size_t k = 0; k < pout.size(); ++k) nn += ov[pout[k]] * so[k];
      t[static_cast<std::size_t>(ni * no + nn)] = p.table()[static_cast<std::size_t>(i * no + o)];
    }
  }
  return ClassicalInstrument(std::move(nin), std::move(nout), std::move(t));
}

ClassicalInstrument marginalize(const ClassicalInstrument& p, const std::vector<std::string>& drop) {
  VarList keep_in;
  for (const auto& n : drop)
    if (find_var(p.out_vars(), n) < 0) throw LabelError("marginalize: no output '" + n + "'");
  // linking with a unit table over the dropped variables sums them out
  VarList dv;
  for (const auto& n : drop) dv.push_back(p.out_vars()[static_cast<std::size_t>(find_var(p.out_vars(), n))]);
  ClassicalInstrument ones(dv, {}, std::vector<mpq_class>(static_cast<std::size_t>(card_product(dv)), mpq_class(1)));
  return classical_link(p, ones);
}

LabeledOperator diagonal_choi(const ClassicalInstrument& p) {
  LabelList ls;
  for (const auto& v : p.in_vars()) ls.push_back({v.name, v.card});
  for (const auto& v : p.out_vars()) ls.push_back({v.name, v.card});
  const Index d = total_dim(ls);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
  for (Index k = 0; k < d; ++k) m(k, k) = p.table()[static_cast<std::size_t>(k)].get_d();
  return LabeledOperator(std::move(ls), std::move(m));
}

Bijection make_bijection(VarList domain, VarList codomain, std::vector<Index> forward) {
  const Index n = card_product(domain);
  if (n != card_product(codomain)) throw DimensionError("bijection: cardinality products differ");
  if (static_cast<Index>(forward.size()) != n) throw DimensionError("bijection: table size mismatch");
  std::vector<char> hit(static_cast<std::size_t>(n), 0);
  for (Index f : forward) {
    if (f < 0 || f >= n || hit[static_cast<std::size_t>(f)]) throw DimensionError("bijection: not a permutation");
    hit[static_cast<std::size_t>(f)] = 1;
  }
  check_vars(domain, codomain);
  return Bijection{std::move(domain), std::move(codomain), std::move(forward)};
}

Bijection inverse(const Bijection& b) {
  std::vector<Index> inv(b.forward.size());
  for (std::size_t i = 0; i < b.forward.size(); ++i) inv[static_cast<std::size_t>(b.forward[i])] = static_cast<Index>(i);
  return Bijection{b.codomain, b.domain, std::move(inv)};
}

ClassicalInstrument as_instrument(const Bijection& b) {
  return ClassicalInstrument::deterministic(b.domain, b.codomain,
                                            [&](Index i) { return b.forward[static_cast<std::size_t>(i)]; });
}

std::optional<std::vector<Index>> is_basis_preserving(const UnitaryBlock& u, double tol) {
  const auto& m = u.matrix();
  if (m.rows() != m.cols()) return std::nullopt;
  std::vector<Index> perm(static_cast<std::size_t>(m.cols()));
  std::vector<char> used(static_cast<std::size_t>(m.rows()), 0);
  for (Index c = 0; c < m.cols(); ++c) {
    Index hit = -1;
    for (Index r = 0; r < m.rows(); ++r) {
      const double a = std::abs(m(r, c));
      if (a <= tol) continue;
      if (hit >= 0 || std::abs(a - 1.0) > tol) return std::nullopt;
      hit = r;
    }
    if (hit < 0 || used[static_cast<std::size_t>(hit)]) return std::nullopt;
    used[static_cast<std::size_t>(hit)] = 1;
    perm[static_cast<std::size_t>(c)] = hit;
  }
  return perm;
}

std::optional<Bijection> bijection_of(const UnitaryBlock& u, double tol) {
  auto p = is_basis_preserving(u, tol);
  if (!p) return std::nullopt;
  return make_bijection(vars_of(u.in_labels()), vars_of(u.out_labels()), std::move(*p));
}

namespace {

std::optional<Index> basis_index(const Eigen::VectorXcd& s, double tol) {
  Index hit = -1;
  for (Index k = 0; k < s.size(); ++k) {
    const double a = std::abs(s(k));
    if (a <= tol) continue;
    if (hit >= 0 || std::abs(a - 1.0) > tol) return std::nullopt;
    hit = k;
  }
  if (hit < 0) return std::nullopt;
  return hit;
}

}  // namespace

ClassicalCircuit classicalize(const TemporalCircuit& c, double tol) {
  ClassicalCircuit out;
  for (const auto& g : c.gates()) {
    auto fail = [&]() -> NotClassical { return NotClassical("gate '" + g.name + "' is not basis-preserving"); };
    ClassicalInstrument inst = std::visit(
        [&](const auto& op) -> ClassicalInstrument {
          using T = std::decay_t<decltype(op)>;
          if constexpr (std::is_same_v<T, UnitaryGate>) {
            auto b = bijection_of(op.u, tol);
            if (!b) throw fail();
            return as_instrument(*b);
          } else if constexpr (std::is_same_v<T, ControlledPairGate>) {
            auto p0 = is_basis_preserving(op.u0, tol), p1 = is_basis_preserving(op.u1, tol);
            if (!p0 || !p1) throw fail();
            VarList in = vars_of(op.u0.in_labels()), outv = vars_of(op.u0.out_labels());
            in.push_back({op.control_in.name, 2});
            outv.push_back({op.control_out.name, 2});
            return ClassicalInstrument::deterministic(in, outv, [&](Index i) {
              const Index ctrl = i % 2, base = i / 2;
              return (ctrl ? *p1 : *p0)[static_cast<std::size_t>(base)] * 2 + ctrl;
            });
          } else if constexpr (std::is_same_v<T, PrepareGate>) {
            auto k = basis_index(op.state, tol);
            if (!k) throw fail();
            return ClassicalInstrument::deterministic({}, {{op.wire.name, op.wire.dim}}, [&](Index) { return *k; });
          } else if constexpr (std::is_same_v<T, ProjectGate>) {
            auto k = basis_index(op.state, tol);
            if (!k) throw fail();
            std::vector<mpq_class> t(static_cast<std::size_t>(op.wire.dim), mpq_class(0));
            t[static_cast<std::size_t>(*k)] = 1;
            return ClassicalInstrument({{op.wire.name, op.wire.dim}}, {}, std::move(t));
          } else {
            return ClassicalInstrument({{op.wire.name, op.wire.dim}}, {},
                                       std::vector<mpq_class>(static_cast<std::size_t>(op.wire.dim), mpq_class(1)));
          }
        },
        g.op);
    out.gates.push_back({g.name, std::move(inst)});
  }
  return out;
}

ClassicalInstrument simulate_classical(const ClassicalCircuit& c) {
  ClassicalInstrument acc;
  for (const auto& g : c.gates) acc = classical_link(acc, g.inst);
  return acc;
}

ClassicalInstrument delocalized_rewrite_classical(const ClassicalInstrument& red, const Bijection& j_in,
                                                  const Bijection& j_out) {
  for (const auto& v : j_in.codomain)
    if (find_var(red.in_vars(), v.name) < 0) throw LabelError("rewrite: red has no input '" + v.name + "'");
  for (const auto& v : j_out.domain)
    if (find_var(red.out_vars(), v.name) < 0) throw LabelError("rewrite: red has no output '" + v.name + "'");
  return classical_link(classical_link(as_instrument(j_in), red), as_instrument(j_out));
}

Correlation to_correlation(const ClassicalInstrument& p, const std::vector<std::string>& settings,
                           const std::vector<std::string>& outcomes) {
  const auto r = reorder(p, settings, outcomes);
  std::vector<Index> sc, oc;
  for (const auto& v : r.in_vars()) sc.push_back(v.card);
  for (const auto& v : r.out_vars()) oc.push_back(v.card);
  Correlation c = Correlation::zeros(sc, oc);
  c.p = r.table();
  return c;
}

ClassicalInstrument bw_classical_process() {
  return ClassicalInstrument::deterministic({{"A_O", 2}, {"B_O", 2}, {"C_O", 2}}, {{"A_I", 2}, {"B_I", 2}, {"C_I", 2}},
                                            [](Index i) {
                                              const Index a = (i >> 2) & 1, b = (i >> 1) & 1, c = i & 1;
                                              const Index ai = (!b) && c, bi = (!c) && a, ci = (!a) && b;
                                              return (ai << 2) | (bi << 1) | ci;
                                            });
}

ClassicalInstrument bw_strategy(const std::string& party) {
  return ClassicalInstrument::deterministic({{party + "_I", 2}, {"i_" + party, 2}}, {{party + "_O", 2}, {"o_" + party, 2}},
                                            [](Index k) {
                                              const Index xi = k / 2, i = k % 2;
                                              return i * 2 + xi;
                                            });
}

Correlation bw_classical_correlation(const std::map<std::string, ClassicalInstrument>& strategies) {
  ClassicalInstrument acc = bw_classical_process();
  for (const std::string p : {"A", "B", "C"}) {
    auto it = strategies.find(p);
    if (it == strategies.end()) throw LabelError("bw_classical_correlation: no strategy for '" + p + "'");
    acc = classical_link(acc, it->second);
  }
  return to_correlation(acc, {"i_A", "i_B", "i_C"}, {"o_A", "o_B", "o_C"});
}

}  // namespace tds
