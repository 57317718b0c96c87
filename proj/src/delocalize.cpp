#include "tds/delocalize.hpp"

#include <algorithm>
#include <set>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace tds {

namespace {

std::vector<std::string> without(const LabelList& ls, const std::string& name) {
  std::vector<std::string> out;
  for (const auto& l : ls)
    if (l.name != name) out.push_back(l.name);
  return out;
}

const SystemLabel& label_of(const LabelList& ls, const std::string& name) {
  int i = find_label(ls, name);
  if (i < 0) throw LabelError("missing label '" + name + "'");
  return ls[static_cast<std::size_t>(i)];
}

LabelList pick(const LabelList& ls, const std::vector<std::string>& names) {
  LabelList out;
  for (const auto& n : names) out.push_back(label_of(ls, n));
  return out;
}

// Orthonormal eigenvectors sorted by descending eigenvalue; inside a degenerate
// cluster the basis is Gram-Schmidt of the projected unit vectors in index order.
void canonical_eigenbasis(const Eigen::MatrixXcd& j, Eigen::VectorXd& vals, Eigen::MatrixXcd& vecs) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(j);
  const Index n = j.rows();
  vals.resize(n);
  vecs.resize(n, n);
  for (Index k = 0; k < n; ++k) {
    vals(k) = es.eigenvalues()(n - 1 - k);
    vecs.col(k) = es.eigenvectors().col(n - 1 - k);
  }
  const double scale = std::max(1.0, vals.size() ? std::abs(vals(0)) : 0.0);
  Index start = 0;
  while (start < n) {
    Index end = start + 1;
    while (end < n && std::abs(vals(end) - vals(start)) <= 1e-8 * scale) ++end;
    const Index m = end - start;
    if (m > 1) {
      Eigen::MatrixXcd v = vecs.middleCols(start, m);
      Eigen::MatrixXcd proj = v * v.adjoint();
      Eigen::MatrixXcd basis(n, m);
      Index got = 0;
      for (Index i = 0; i < n && got < m; ++i) {
        Eigen::VectorXcd w = proj.col(i);
        for (Index q = 0; q < got; ++q) w -= basis.col(q) * basis.col(q).dot(w);
        const double nw = w.norm();
        if (nw > 1e-6) basis.col(got++) = w / nw;
      }
      if (got == m) vecs.middleCols(start, m) = basis;
    }
    start = end;
  }
}

}  // namespace

Factorization factor_block(const UnitaryBlock& u, const std::string& x_in, const std::string& c_out,
                           const std::string& z, const std::string& zbar, double tol) {
  const SystemLabel xl = label_of(u.out_labels(), x_in);
  const SystemLabel cl = label_of(u.in_labels(), c_out);
  const auto k_names = without(u.in_labels(), c_out);
  const auto r_names = without(u.out_labels(), x_in);
  auto in_order = k_names;
  in_order.push_back(c_out);
  std::vector<std::string> out_order{x_in};
  out_order.insert(out_order.end(), r_names.begin(), r_names.end());
  const UnitaryBlock ur = reorder(u, in_order, out_order);
  const Eigen::MatrixXcd& M = ur.matrix();

  const Index dc = cl.dim, dxi = xl.dim;
  const Index dK = M.cols() / dc, dr = M.rows() / dxi;
  if (M.rows() != M.cols()) throw NotAProcess("factorization needs a square (unitary) operator");
  if (dK % dxi != 0) throw NotAProcess("input dimension is not a multiple of d(" + x_in + ")");

  // X_c[(k, xi), r] = M[(xi, r), (k, c)]
  std::vector<Eigen::MatrixXcd> X(static_cast<std::size_t>(dc), Eigen::MatrixXcd(dK * dxi, dr));
  for (Index c = 0; c < dc; ++c)
    for (Index k = 0; k < dK; ++k)
      for (Index xi = 0; xi < dxi; ++xi)
        for (Index r = 0; r < dr; ++r) X[static_cast<std::size_t>(c)](k * dxi + xi, r) = M(xi * dr + r, k * dc + c);

  const Eigen::MatrixXcd J = X[0] * X[0].adjoint();
  for (Index c = 0; c < dc; ++c)
    for (Index c2 = 0; c2 < dc; ++c2) {
      Eigen::MatrixXcd jc = X[static_cast<std::size_t>(c)] * X[static_cast<std::size_t>(c2)].adjoint();
      if (c == c2) jc -= J;
      if (jc.size() && jc.cwiseAbs().maxCoeff() > tol)
        throw NotAProcess("'" + x_in + "' depends on '" + c_out + "'");
    }

  Eigen::VectorXd vals;
  Eigen::MatrixXcd vecs;
  canonical_eigenbasis(J, vals, vecs);
  const double top = vals.size() ? std::max(vals(0), 0.0) : 0.0;
  Index rank = 0;
  for (Index k = 0; k < vals.size(); ++k)
    if (vals(k) > 1e-9 * std::max(1.0, top)) ++rank;
  const Index dz = dK / dxi;
  if (rank != dz)
    throw NotAProcess("memory rank " + std::to_string(rank) + " differs from " + std::to_string(dz) +
                      "; the operator is not a valid unitary process");

  // U1[(xi, j), k] = sqrt(λ_j) e_j[(k, xi)]
  Eigen::MatrixXcd U1(dxi * dz, dK);
  for (Index xi = 0; xi < dxi; ++xi)
    for (Index j = 0; j < dz; ++j)
      for (Index k = 0; k < dK; ++k) U1(xi * dz + j, k) = std::sqrt(vals(j)) * vecs(k * dxi + xi, j);
  // U2[r, (c, z)] = Σ_k M[(0, r), (k, c)] conj(U1[(0, z), k])
  Eigen::MatrixXcd U2(dr, dc * dz);
  for (Index r = 0; r < dr; ++r)
    for (Index c = 0; c < dc; ++c)
      for (Index j = 0; j < dz; ++j) {
        cd s = 0;
        for (Index k = 0; k < dK; ++k) s += M(r, k * dc + c) * std::conj(U1(j, k));
        U2(r, c * dz + j) = s;
      }

  const SystemLabel zl{"Z~", dz}, zbl{"Zbar~", dz};
  UnitaryBlock b1(pick(u.in_labels(), k_names), {xl, zl}, std::move(U1));
  UnitaryBlock b2({cl, zbl}, pick(u.out_labels(), r_names), std::move(U2));
  if (unitarity_residual(b1) > std::max(tol, 1e-9) || unitarity_residual(b2) > std::max(tol, 1e-9))
    throw ReconstructionFailed("extracted factors are not unitary");

  const auto rebuilt = link_chain<cd>({pure_choi(b1), identity_dket(zl, zbl), pure_choi(b2)});
  const auto target = pure_choi(u);
  const double res = max_abs_diff(permute_like(rebuilt, target.labels()), target);
  if (res > std::max(tol, 1e-9)) throw ReconstructionFailed("reconstruction residual " + std::to_string(res));

  Factorization f;
  f.u1 = relabel(b1, {{zl.name, z}});
  f.u2 = relabel(b2, {{zbl.name, zbar}});
  f.z = {z, dz};
  f.zbar = {zbar, dz};
  return f;
}

Factorization factor_no_influence(const ProcessVector& u, const std::string& party, double tol) {
  const PartySpec& p = u.party(party);
  Factorization f = factor_block(u.as_unitary(), p.in.name, p.out.name, kZ, kZbar, tol);
  f.party = party;
  return f;
}

LabeledTensor reconstruct(const Factorization& f) {
  if (f.z.name == f.zbar.name) return link(pure_choi(f.u1), pure_choi(f.u2));
  return link_chain<cd>({pure_choi(f.u1), identity_dket(f.z, f.zbar), pure_choi(f.u2)});
}

double reconstruction_residual(const Factorization& f, const LabeledTensor& target) {
  return max_abs_diff(permute_like(reconstruct(f), target.labels()), target);
}

CombFactorization comb_factorize(const LabeledTensor& g, const std::vector<std::string>& inputs,
                                 const std::vector<std::string>& outputs, const PartySpec& a, double tol) {
  const UnitaryBlock u = choi_to_matrix(g, inputs, outputs);
  Factorization f;
  try {
    f = factor_block(u, a.in.name, a.out.name, "E", "E", tol);
  } catch (const NotAProcess& e) {
    throw NotAComb(e.what());
  }
  return CombFactorization{f.u1, f.u2, f.z.dim};
}

SubsystemDecomposition make_bipartite_decomposition(const Factorization& f) {
  return SubsystemDecomposition{adjoint(f.u1), adjoint(f.u2), {f.z, f.zbar}};
}

SubsystemDecomposition make_tripartite_decomposition(const Factorization& f, const PartySpec& A, const PartySpec& B,
                                                     const LabelList& past, const LabelList& future) {
  using namespace wire;
  if (A.in.dim != B.in.dim || A.out.dim != B.out.dim)
    throw DimensionError("tripartite decomposition: A and B wires must have equal dims");
  const Index di = A.in.dim, dout = A.out.dim;
  const SystemLabel t1{T1, di}, t2{T2, di}, t1pb{T1pbar, dout}, t2pb{T2pbar, dout};
  const SystemLabel t1p{T1p, dout}, t2p{T2p, dout}, t1b{T1bar, di}, t2b{T2bar, di};
  const SystemLabel y{kY, 2}, yb{kYbar, 2}, q1{Q1, 2}, q2p{Q2p, 2};
  const UnitaryBlock u1d = adjoint(f.u1), u2d = adjoint(f.u2);
  const SystemLabel c_in = f.u1.out_labels()[0], c_out = f.u2.in_labels()[0];

  auto jin_branch = [&](int b) {
    const bool sw = b == 1;
    return link_chain<cd>({identity_dket(A.in, sw ? t2 : t1), identity_dket(B.in, sw ? t1 : t2),
                           pure_choi(relabel(u1d, {{A.out.name, sw ? T2pbar : T1pbar}, {B.out.name, sw ? T1pbar : T2pbar}})),
                           basis_ket(y, b), basis_ket(q1, b)});
  };
  auto jout_branch = [&](int b) {
    const bool sw = b == 1;
    return link_chain<cd>({identity_dket(sw ? t2p : t1p, A.out), identity_dket(sw ? t1p : t2p, B.out),
                           pure_choi(relabel(u2d, {{A.in.name, sw ? T2bar : T1bar}, {B.in.name, sw ? T1bar : T2bar}})),
                           basis_ket(q2p, b), basis_ket(yb, b)});
  };

  LabelList jin_in{A.in, B.in, c_in, y, f.z};
  LabelList jin_out = concat(LabelList{t1, t2, t1pb, t2pb, q1}, past);
  LabelList jout_in = concat(LabelList{t1p, t2p, t1b, t2b, q2p}, future);
  LabelList jout_out{A.out, B.out, c_out, f.zbar, yb};

  auto jin0 = jin_branch(0);
  auto jin = jin0 + permute_like(jin_branch(1), jin0.labels());
  auto jout0 = jout_branch(0);
  auto jout = jout0 + permute_like(jout_branch(1), jout0.labels());

  SubsystemDecomposition d;
  d.j_in = choi_to_matrix(jin, names_of(jin_in), names_of(jin_out));
  d.j_out = choi_to_matrix(jout, names_of(jout_in), names_of(jout_out));
  d.complement = {y, yb, f.z, f.zbar, {Q1bar, 2}, {Q2pbar, 2}};
  return d;
}

LabeledTensor rewrite_red_fragment(const LabeledTensor& red, const SubsystemDecomposition& d) {
  for (const auto& l : concat(d.j_in.out_labels(), d.j_out.in_labels()))
    if (!red.has(l.name)) throw LabelError("rewrite: red fragment has no wire '" + l.name + "'");
  return link(link(pure_choi(d.j_in), red), pure_choi(d.j_out));
}

TemporalCircuit red_fragment(const TemporalCircuit& c) {
  std::vector<Gate> g;
  for (const auto& x : c.gates())
    if (x.name.rfind("id_", 0) != 0) g.push_back(x);
  return TemporalCircuit(std::move(g));
}

TemporalCircuit blue_fragment(const TemporalCircuit& c) {
  std::vector<Gate> g;
  for (const auto& x : c.gates())
    if (x.name.rfind("id_", 0) == 0) g.push_back(x);
  return TemporalCircuit(std::move(g));
}

LabeledTensor extract_R(const LabeledTensor& rewritten, const UnitaryBlock& u_A, const UnitaryBlock& u_B,
                        double* factor_residual) {
  const auto ca = pure_choi(u_A), cb = pure_choi(u_B);
  const double na = ca.amps().squaredNorm(), nb = cb.amps().squaredNorm();
  auto r = link(link(rewritten, conj(ca)), conj(cb));
  r = scale(r, cd(1.0 / (na * nb), 0));
  if (factor_residual) {
    auto rebuilt = tensor(tensor(ca, cb), r);
    *factor_residual = max_abs_diff(permute_like(rebuilt, rewritten.labels()), rewritten);
  }
  return r;
}

LabeledTensor compute_R_prime(const SubsystemDecomposition& d) {
  using namespace wire;
  const auto& jo = d.j_out;
  const auto& ji = d.j_in;
  auto lab = [&](const LabelList& ls, const std::string& n) { return label_of(ls, n); };
  const SystemLabel t1b = lab(jo.in_labels(), T1bar), t2b = lab(jo.in_labels(), T2bar);
  const SystemLabel t1p = lab(jo.in_labels(), T1p), t2p = lab(jo.in_labels(), T2p), q2p = lab(jo.in_labels(), Q2p);
  const SystemLabel t1 = lab(ji.out_labels(), T1), t2 = lab(ji.out_labels(), T2), q1 = lab(ji.out_labels(), Q1);
  const SystemLabel t1pb = lab(ji.out_labels(), T1pbar), t2pb = lab(ji.out_labels(), T2pbar);

  auto out_side = link_chain<cd>({dagger_choi(pure_choi(jo), names_of(jo.in_labels()), names_of(jo.out_labels())),
                                  identity_dket(t1b, t1), identity_dket(t1p, t1pb), identity_dket(t2b, t2),
                                  identity_dket(t2p, t2pb), identity_dket(q2p, {Q2pbar, 2})});
  auto in_side = link(dagger_choi(pure_choi(ji), names_of(ji.in_labels()), names_of(ji.out_labels())),
                      identity_dket({Q1bar, 2}, q1));
  return link(out_side, in_side);
}

double verify_cyclic_reconstruction(const LabeledTensor& r_uc, const LabeledTensor& r_prime, const ProcessVector& u,
                                    const UnitaryBlock& u_C) {
  using namespace wire;
  const PartySpec* c = nullptr;
  for (const auto& p : u.parties())
    if (find_label(u_C.in_labels(), p.in.name) >= 0) c = &p;
  if (!c) throw LabelError("verify_cyclic_reconstruction: U_C acts on no party input");
  std::set<std::string> expected{kY, kYbar, kZ, kZbar, Q1bar, Q2pbar, c->in.name, c->out.name};
  std::set<std::string> shared;
  for (const auto& l : r_uc.labels())
    if (r_prime.has(l.name)) shared.insert(l.name);
  if (shared != expected) {
    std::string got;
    for (const auto& s : shared) got += " " + s;
    throw LabelError("verify_cyclic_reconstruction: unexpected shared labels:" + got);
  }
  const auto lhs = link(r_uc, r_prime);
  const auto rhs = link(u.tensor(), pure_choi(u_C));
  if (lhs.rank() != rhs.rank()) throw LabelError("verify_cyclic_reconstruction: open legs differ");
  return max_abs_diff(permute_like(lhs, rhs.labels()), rhs);
}

bool is_product_across(const LabeledTensor& t, const std::vector<std::string>& left, double tol) {
  std::vector<std::string> order = left;
  for (const auto& l : t.labels())
    if (std::find(left.begin(), left.end(), l.name) == left.end()) order.push_back(l.name);
  const auto p = permute(t, order);
  Index dl = 1;
  for (const auto& n : left) dl *= p.label(n).dim;
  using RM = Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::MatrixXcd m = Eigen::Map<const RM>(p.amps().data(), dl, p.size() / dl);
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() < 2) return true;
  return s(1) <= tol * std::max(s(0), 1e-300);
}

}  // namespace tds
