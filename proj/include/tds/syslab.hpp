// Named-index tensors, Choi vectors/operators and link products.
//
// Amplitudes are stored row-major over the declared label order; every
// operation that combines tensors matches legs by label name.
#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <algorithm>
#include <complex>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tds/errors.hpp"

namespace tds {

using Index = Eigen::Index;
using cd = std::complex<double>;

inline constexpr double kDefaultTol = 1e-10;

struct SystemLabel {
  std::string name;
  Index dim = 1;

  friend bool operator==(const SystemLabel&, const SystemLabel&) = default;
};

using LabelList = std::vector<SystemLabel>;

inline Index total_dim(const LabelList& ls) {
  Index d = 1;
  for (const auto& l : ls) d *= l.dim;
  return d;
}

inline std::vector<std::string> names_of(const LabelList& ls) {
  std::vector<std::string> out;
  out.reserve(ls.size());
  for (const auto& l : ls) out.push_back(l.name);
  return out;
}

inline int find_label(const LabelList& ls, std::string_view name) {
  for (std::size_t i = 0; i < ls.size(); ++i)
    if (ls[i].name == name) return static_cast<int>(i);
  return -1;
}

inline void check_labels(const LabelList& ls) {
  for (std::size_t i = 0; i < ls.size(); ++i) {
    if (ls[i].dim < 1) throw DimensionError("label '" + ls[i].name + "' has dim < 1");
    for (std::size_t j = i + 1; j < ls.size(); ++j)
      if (ls[i].name == ls[j].name) throw LabelError("duplicate label '" + ls[i].name + "'");
  }
}

inline LabelList concat(LabelList a, const LabelList& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

inline SystemLabel qubit(std::string name) { return {std::move(name), 2}; }

template <typename Scalar>
class BasicLabeledTensor {
 public:
  using scalar_type = Scalar;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  // Rank-0 tensor holding 1.
  BasicLabeledTensor() : amps_(Vector::Ones(1)) {}

  BasicLabeledTensor(LabelList labels, Vector amps) : labels_(std::move(labels)), amps_(std::move(amps)) {
    check_labels(labels_);
    if (amps_.size() != total_dim(labels_))
      throw DimensionError("amplitude count " + std::to_string(amps_.size()) + " != product of dims " +
                           std::to_string(total_dim(labels_)));
  }

  static BasicLabeledTensor scalar(Scalar s) {
    Vector v(1);
    v(0) = s;
    return BasicLabeledTensor({}, std::move(v));
  }

  const LabelList& labels() const { return labels_; }
  const Vector& amps() const { return amps_; }
  Index size() const { return amps_.size(); }
  std::size_t rank() const { return labels_.size(); }
  int index_of(std::string_view name) const { return find_label(labels_, name); }
  bool has(std::string_view name) const { return index_of(name) >= 0; }

  const SystemLabel& label(std::string_view name) const {
    int i = index_of(name);
    if (i < 0) throw LabelError("no label '" + std::string(name) + "'");
    return labels_[static_cast<std::size_t>(i)];
  }

  Scalar value() const {
    if (!labels_.empty()) throw ShapeError("value() on a tensor of rank " + std::to_string(rank()));
    return amps_(0);
  }

 private:
  LabelList labels_;
  Vector amps_;
};

// Linear map between labelled spaces; rows follow out_labels, columns in_labels.
// Unitarity is a property checked by is_unitary, not enforced here.
template <typename Scalar>
class BasicUnitaryBlock {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  BasicUnitaryBlock() = default;
  BasicUnitaryBlock(LabelList in, LabelList out, Matrix m)
      : in_(std::move(in)), out_(std::move(out)), m_(std::move(m)) {
    check_labels(concat(in_, out_));
    if (m_.rows() != total_dim(out_) || m_.cols() != total_dim(in_))
      throw DimensionError("block matrix shape does not match label dims");
  }

  const LabelList& in_labels() const { return in_; }
  const LabelList& out_labels() const { return out_; }
  const Matrix& matrix() const { return m_; }

 private:
  LabelList in_, out_;
  Matrix m_;
};

// Square operator on one label list (rows and columns share the labels).
template <typename Scalar>
class BasicLabeledOperator {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  BasicLabeledOperator() : m_(Matrix::Ones(1, 1)) {}
  BasicLabeledOperator(LabelList labels, Matrix m) : labels_(std::move(labels)), m_(std::move(m)) {
    check_labels(labels_);
    Index d = total_dim(labels_);
    if (m_.rows() != d || m_.cols() != d) throw DimensionError("operator shape does not match label dims");
  }

  const LabelList& labels() const { return labels_; }
  const Matrix& matrix() const { return m_; }
  int index_of(std::string_view name) const { return find_label(labels_, name); }

 private:
  LabelList labels_;
  Matrix m_;
};

using LabeledTensor = BasicLabeledTensor<cd>;
using UnitaryBlock = BasicUnitaryBlock<cd>;
using LabeledOperator = BasicLabeledOperator<cd>;

namespace detail {

inline std::vector<Index> dims_of(const LabelList& ls) {
  std::vector<Index> d;
  d.reserve(ls.size());
  for (const auto& l : ls) d.push_back(l.dim);
  return d;
}

inline std::vector<Index> row_major_strides(const std::vector<Index>& dims) {
  std::vector<Index> s(dims.size(), 1);
  for (std::size_t k = dims.size(); k-- > 1;) s[k - 1] = s[k] * dims[k];
  return s;
}

// New axis i is old axis perm[i].
template <typename Vec>
Vec permute_amps(const Vec& in, const std::vector<Index>& dims, const std::vector<std::size_t>& perm) {
  const std::size_t r = dims.size();
  bool trivial = true;
  for (std::size_t i = 0; i < r; ++i) trivial = trivial && perm[i] == i;
  if (trivial || r < 2) return in;

  const auto ostr = row_major_strides(dims);
  std::vector<Index> nd(r), ns(r);
  for (std::size_t i = 0; i < r; ++i) {
    nd[i] = dims[perm[i]];
    ns[i] = ostr[perm[i]];
  }
  Vec out(in.size());
  if (in.size() == 0) return out;
  std::vector<Index> digit(r, 0);
  const Index inner = nd[r - 1], istr = ns[r - 1];
  Index off = 0;
  for (Index o = 0; o < in.size(); o += inner) {
    for (Index k = 0; k < inner; ++k) out[o + k] = in[off + k * istr];
    for (std::size_t a = r - 1; a-- > 0;) {
      ++digit[a];
      off += ns[a];
      if (digit[a] < nd[a]) break;
      off -= ns[a] * nd[a];
      digit[a] = 0;
    }
  }
  return out;
}

template <typename Vec>
Index count_nonzeros(const Vec& v) {
  Index n = 0;
  for (Index i = 0; i < v.size(); ++i) n += (v[i] != typename Vec::Scalar(0));
  return n;
}

inline bool worth_sparse(Index nnz, Index size) { return size >= 256 && nnz * 8 <= size; }

// Views the tensor as a matrix whose rows run over `row_axes` and columns over
// `col_axes` (each row-major) and collects its nonzeros.
template <typename Scalar>
Eigen::SparseMatrix<Scalar, Eigen::RowMajor> to_sparse(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& amps,
                                                       const std::vector<Index>& dims,
                                                       const std::vector<std::size_t>& row_axes,
                                                       const std::vector<std::size_t>& col_axes, Index rows,
                                                       Index cols, Index nnz) {
  const std::size_t r = dims.size();
  std::vector<Index> rw(r, 0), cw(r, 0);
  {
    Index s = 1;
    for (std::size_t k = row_axes.size(); k-- > 0;) {
      rw[row_axes[k]] = s;
      s *= dims[row_axes[k]];
    }
    s = 1;
    for (std::size_t k = col_axes.size(); k-- > 0;) {
      cw[col_axes[k]] = s;
      s *= dims[col_axes[k]];
    }
  }
  std::vector<Eigen::Triplet<Scalar>> trips;
  trips.reserve(static_cast<std::size_t>(nnz));
  for (Index idx = 0; idx < amps.size(); ++idx) {
    const Scalar v = amps[idx];
    if (v == Scalar(0)) continue;
    Index rest = idx, row = 0, col = 0;
    for (std::size_t k = r; k-- > 0;) {
      const Index dgt = rest % dims[k];
      rest /= dims[k];
      row += dgt * rw[k];
      col += dgt * cw[k];
    }
    trips.emplace_back(static_cast<int>(row), static_cast<int>(col), v);
  }
  Eigen::SparseMatrix<Scalar, Eigen::RowMajor> m(rows, cols);
  m.setFromTriplets(trips.begin(), trips.end());
  return m;
}

template <typename Scalar>
std::vector<std::size_t> axes_for(const BasicLabeledTensor<Scalar>& t, const std::vector<std::string>& names) {
  std::vector<std::size_t> perm;
  perm.reserve(names.size());
  for (const auto& n : names) {
    int i = t.index_of(n);
    if (i < 0) throw LabelError("no label '" + n + "'");
    perm.push_back(static_cast<std::size_t>(i));
  }
  return perm;
}

}  // namespace detail

template <typename Scalar>
BasicLabeledTensor<Scalar> permute(const BasicLabeledTensor<Scalar>& t, const std::vector<std::string>& order) {
  if (order.size() != t.rank()) throw LabelError("permutation order has wrong length");
  auto perm = detail::axes_for(t, order);
  LabelList nl;
  for (auto p : perm) nl.push_back(t.labels()[p]);
  check_labels(nl);
  return BasicLabeledTensor<Scalar>(std::move(nl), detail::permute_amps(t.amps(), detail::dims_of(t.labels()), perm));
}

template <typename Scalar>
BasicLabeledTensor<Scalar> permute_like(const BasicLabeledTensor<Scalar>& t, const LabelList& like) {
  return permute(t, names_of(like));
}

template <typename Scalar>
BasicLabeledTensor<Scalar> relabel(const BasicLabeledTensor<Scalar>& t, const std::map<std::string, std::string>& mapping) {
  LabelList nl = t.labels();
  for (const auto& [from, to] : mapping) {
    int i = find_label(t.labels(), from);
    if (i < 0) throw LabelError("relabel: no label '" + from + "'");
    nl[static_cast<std::size_t>(i)].name = to;
  }
  return BasicLabeledTensor<Scalar>(std::move(nl), t.amps());
}

// Contracts every label name the operands share; open legs of `a` come first.
template <typename Scalar>
BasicLabeledTensor<Scalar> link(const BasicLabeledTensor<Scalar>& a, const BasicLabeledTensor<Scalar>& b) {
  using Vec = typename BasicLabeledTensor<Scalar>::Vector;
  using RM = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  std::vector<std::size_t> a_open, a_sh, b_sh, b_open;
  for (std::size_t i = 0; i < a.rank(); ++i) {
    int j = b.index_of(a.labels()[i].name);
    if (j < 0) {
      a_open.push_back(i);
      continue;
    }
    if (b.labels()[static_cast<std::size_t>(j)].dim != a.labels()[i].dim)
      throw DimensionError("link: dim mismatch on '" + a.labels()[i].name + "'");
    a_sh.push_back(i);
    b_sh.push_back(static_cast<std::size_t>(j));
  }
  for (std::size_t j = 0; j < b.rank(); ++j)
    if (!a.has(b.labels()[j].name)) b_open.push_back(j);

  LabelList out;
  Index oa = 1, s = 1, ob = 1;
  for (auto i : a_open) {
    out.push_back(a.labels()[i]);
    oa *= a.labels()[i].dim;
  }
  for (auto i : a_sh) s *= a.labels()[i].dim;
  for (auto j : b_open) {
    out.push_back(b.labels()[j]);
    ob *= b.labels()[j].dim;
  }

  const auto da = detail::dims_of(a.labels());
  const auto db = detail::dims_of(b.labels());
  const Index nza = detail::count_nonzeros(a.amps());
  const Index nzb = detail::count_nonzeros(b.amps());
  const bool sa = detail::worth_sparse(nza, a.size());
  const bool sb = detail::worth_sparse(nzb, b.size());

  Vec res = Vec::Zero(oa * ob);
  Eigen::Map<RM> C(res.data(), oa, ob);
  if (nza == 0 || nzb == 0) return BasicLabeledTensor<Scalar>(std::move(out), std::move(res));

  auto dense_a = [&] {
    std::vector<std::size_t> perm = a_open;
    perm.insert(perm.end(), a_sh.begin(), a_sh.end());
    return detail::permute_amps(a.amps(), da, perm);
  };
  auto dense_b = [&] {
    std::vector<std::size_t> perm = b_sh;
    perm.insert(perm.end(), b_open.begin(), b_open.end());
    return detail::permute_amps(b.amps(), db, perm);
  };

  if (sa && sb) {
    auto As = detail::to_sparse(a.amps(), da, a_open, a_sh, oa, s, nza);
    auto Bs = detail::to_sparse(b.amps(), db, b_sh, b_open, s, ob, nzb);
    Eigen::SparseMatrix<Scalar, Eigen::RowMajor> Cs = As * Bs;
    for (Index r = 0; r < Cs.outerSize(); ++r)
      for (typename decltype(Cs)::InnerIterator it(Cs, r); it; ++it) C(it.row(), it.col()) = it.value();
  } else if (sa) {
    auto As = detail::to_sparse(a.amps(), da, a_open, a_sh, oa, s, nza);
    Vec pb = dense_b();
    Eigen::Map<const RM> B(pb.data(), s, ob);
    C.noalias() = As * B;
  } else if (sb) {
    Vec pa = dense_a();
    auto Bs = detail::to_sparse(b.amps(), db, b_sh, b_open, s, ob, nzb);
    Eigen::Map<const RM> A(pa.data(), oa, s);
    C.noalias() = A * Bs;
  } else {
    Vec pa = dense_a();
    Vec pb = dense_b();
    Eigen::Map<const RM> A(pa.data(), oa, s);
    Eigen::Map<const RM> B(pb.data(), s, ob);
    C.noalias() = A * B;
  }
  return BasicLabeledTensor<Scalar>(std::move(out), std::move(res));
}

template <typename Scalar>
BasicLabeledTensor<Scalar> link_pure(const BasicLabeledTensor<Scalar>& a, const BasicLabeledTensor<Scalar>& b) {
  return link(a, b);
}

template <typename Scalar>
BasicLabeledTensor<Scalar> tensor(const BasicLabeledTensor<Scalar>& a, const BasicLabeledTensor<Scalar>& b) {
  for (const auto& l : a.labels())
    if (b.has(l.name)) throw LabelError("tensor: label '" + l.name + "' present in both operands");
  return link(a, b);
}

// Left-to-right link of a chain, or pairwise merges in the order given by `plan`
// (each step links items i and j of the current list and appends the result).
template <typename Scalar>
BasicLabeledTensor<Scalar> link_chain(std::vector<BasicLabeledTensor<Scalar>> items,
                                      const std::vector<std::pair<std::size_t, std::size_t>>& plan = {}) {
  if (items.empty()) return {};
  if (plan.empty()) {
    BasicLabeledTensor<Scalar> acc = items.front();
    for (std::size_t i = 1; i < items.size(); ++i) acc = link(acc, items[i]);
    return acc;
  }
  std::vector<std::optional<BasicLabeledTensor<Scalar>>> pool(items.begin(), items.end());
  for (auto [i, j] : plan) {
    if (i >= pool.size() || j >= pool.size() || i == j || !pool[i] || !pool[j])
      throw ShapeError("link_chain: invalid plan step");
    auto merged = link(*pool[i], *pool[j]);
    pool[i].reset();
    pool[j].reset();
    pool.emplace_back(std::move(merged));
  }
  std::optional<BasicLabeledTensor<Scalar>> acc;
  for (auto& p : pool)
    if (p) acc = acc ? link(*acc, *p) : *p;
  return *acc;
}

template <typename Scalar>
BasicLabeledTensor<Scalar> identity_dket(const SystemLabel& y, const SystemLabel& z) {
  if (y.dim != z.dim) throw DimensionError("identity_dket: dims differ");
  typename BasicLabeledTensor<Scalar>::Vector v = BasicLabeledTensor<Scalar>::Vector::Zero(y.dim * z.dim);
  for (Index i = 0; i < y.dim; ++i) v(i * y.dim + i) = Scalar(1);
  return BasicLabeledTensor<Scalar>({y, z}, std::move(v));
}

inline LabeledTensor identity_dket(const SystemLabel& y, const SystemLabel& z) { return identity_dket<cd>(y, z); }

template <typename Scalar = cd>
BasicLabeledTensor<Scalar> basis_ket(const SystemLabel& l, Index k) {
  if (k < 0 || k >= l.dim) throw DimensionError("basis_ket: index out of range");
  typename BasicLabeledTensor<Scalar>::Vector v = BasicLabeledTensor<Scalar>::Vector::Zero(l.dim);
  v(k) = Scalar(1);
  return BasicLabeledTensor<Scalar>({l}, std::move(v));
}

template <typename Scalar>
BasicLabeledTensor<Scalar> conj(const BasicLabeledTensor<Scalar>& t) {
  return BasicLabeledTensor<Scalar>(t.labels(), t.amps().conjugate());
}

template <typename Scalar>
BasicLabeledTensor<Scalar> scale(const BasicLabeledTensor<Scalar>& t, Scalar s) {
  return BasicLabeledTensor<Scalar>(t.labels(), t.amps() * s);
}

template <typename Scalar>
void require_same_labels(const BasicLabeledTensor<Scalar>& a, const BasicLabeledTensor<Scalar>& b) {
  if (a.rank() != b.rank()) throw LabelError("label sets differ");
  for (const auto& l : a.labels()) {
    int j = b.index_of(l.name);
    if (j < 0 || b.labels()[static_cast<std::size_t>(j)].dim != l.dim)
      throw LabelError("label sets differ at '" + l.name + "'");
  }
}

// Sum of two tensors over the same label set; result uses a's order.
template <typename Scalar>
BasicLabeledTensor<Scalar> operator+(const BasicLabeledTensor<Scalar>& a, const BasicLabeledTensor<Scalar>& b) {
  require_same_labels(a, b);
  return BasicLabeledTensor<Scalar>(a.labels(), a.amps() + permute_like(b, a.labels()).amps());
}

template <typename Scalar>
BasicLabeledTensor<Scalar> operator-(const BasicLabeledTensor<Scalar>& a, const BasicLabeledTensor<Scalar>& b) {
  require_same_labels(a, b);
  return BasicLabeledTensor<Scalar>(a.labels(), a.amps() - permute_like(b, a.labels()).amps());
}

// Max-norm distance; throws LabelError when the label sets differ.
template <typename Scalar>
double max_abs_diff(const BasicLabeledTensor<Scalar>& a, const BasicLabeledTensor<Scalar>& b) {
  require_same_labels(a, b);
  const auto pb = permute_like(b, a.labels());
  double m = 0;
  for (Index i = 0; i < a.size(); ++i) m = std::max(m, static_cast<double>(std::abs(a.amps()[i] - pb.amps()[i])));
  return m;
}

template <typename Scalar>
double max_abs(const BasicLabeledTensor<Scalar>& a) {
  return a.size() ? static_cast<double>(a.amps().cwiseAbs().maxCoeff()) : 0.0;
}

// Fuses adjacent-after-permutation legs `names` into one leg (first name is most significant).
template <typename Scalar>
BasicLabeledTensor<Scalar> merge_labels(const BasicLabeledTensor<Scalar>& t, const std::vector<std::string>& names,
                                        SystemLabel merged) {
  if (names.empty()) throw LabelError("merge_labels: nothing to merge");
  std::vector<std::string> order;
  int first = t.index_of(names.front());
  if (first < 0) throw LabelError("merge_labels: no label '" + names.front() + "'");
  Index d = 1;
  for (const auto& n : names) d *= t.label(n).dim;
  if (merged.dim != d) throw DimensionError("merge_labels: merged dim mismatch");
  for (const auto& l : t.labels()) {
    if (l.name == names.front()) {
      order.insert(order.end(), names.begin(), names.end());
    } else if (std::find(names.begin(), names.end(), l.name) == names.end()) {
      order.push_back(l.name);
    }
  }
  auto p = permute(t, order);
  LabelList nl;
  for (const auto& l : p.labels()) {
    if (l.name == names.front())
      nl.push_back(merged);
    else if (std::find(names.begin(), names.end(), l.name) == names.end())
      nl.push_back(l);
  }
  return BasicLabeledTensor<Scalar>(std::move(nl), p.amps());
}

template <typename Scalar>
BasicLabeledTensor<Scalar> split_label(const BasicLabeledTensor<Scalar>& t, const std::string& name, const LabelList& parts) {
  if (t.label(name).dim != total_dim(parts)) throw DimensionError("split_label: dims do not multiply out");
  LabelList nl;
  for (const auto& l : t.labels()) {
    if (l.name == name)
      nl.insert(nl.end(), parts.begin(), parts.end());
    else
      nl.push_back(l);
  }
  return BasicLabeledTensor<Scalar>(std::move(nl), t.amps());
}

// ---- blocks and Choi vectors ------------------------------------------------

template <typename Scalar>
BasicLabeledTensor<Scalar> pure_choi(const BasicUnitaryBlock<Scalar>& u) {
  using RM = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  RM m = u.matrix().transpose();
  typename BasicLabeledTensor<Scalar>::Vector v = Eigen::Map<const typename BasicLabeledTensor<Scalar>::Vector>(m.data(), m.size());
  return BasicLabeledTensor<Scalar>(concat(u.in_labels(), u.out_labels()), std::move(v));
}

template <typename Scalar>
BasicUnitaryBlock<Scalar> choi_to_matrix(const BasicLabeledTensor<Scalar>& t, const std::vector<std::string>& in,
                                         const std::vector<std::string>& out) {
  using RM = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  std::vector<std::string> order = in;
  order.insert(order.end(), out.begin(), out.end());
  auto p = permute(t, order);
  LabelList li(p.labels().begin(), p.labels().begin() + static_cast<std::ptrdiff_t>(in.size()));
  LabelList lo(p.labels().begin() + static_cast<std::ptrdiff_t>(in.size()), p.labels().end());
  Eigen::Map<const RM> m(p.amps().data(), total_dim(li), total_dim(lo));
  return BasicUnitaryBlock<Scalar>(std::move(li), std::move(lo), m.transpose());
}

// |U⟩⟩ and |U†⟩⟩ carry the same label set; the amplitudes are conjugated.
template <typename Scalar>
BasicLabeledTensor<Scalar> dagger_choi(const BasicLabeledTensor<Scalar>& t, const std::vector<std::string>& in,
                                       const std::vector<std::string>& out) {
  if (in.size() + out.size() != t.rank()) throw LabelError("dagger_choi: in/out split does not cover the labels");
  for (const auto& n : in)
    if (!t.has(n)) throw LabelError("dagger_choi: no label '" + n + "'");
  for (const auto& n : out)
    if (!t.has(n)) throw LabelError("dagger_choi: no label '" + n + "'");
  return conj(t);
}

template <typename Scalar>
BasicUnitaryBlock<Scalar> adjoint(const BasicUnitaryBlock<Scalar>& u) {
  return BasicUnitaryBlock<Scalar>(u.out_labels(), u.in_labels(), u.matrix().adjoint());
}

template <typename Scalar>
double unitarity_residual(const BasicUnitaryBlock<Scalar>& u) {
  const auto& m = u.matrix();
  using M = typename BasicUnitaryBlock<Scalar>::Matrix;
  M g = m.adjoint() * m;
  return static_cast<double>((g - M::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff());
}

template <typename Scalar>
bool is_isometry(const BasicUnitaryBlock<Scalar>& u, double tol = kDefaultTol) {
  return u.matrix().rows() >= u.matrix().cols() && unitarity_residual(u) <= tol;
}

template <typename Scalar>
bool is_unitary(const BasicUnitaryBlock<Scalar>& u, double tol = kDefaultTol) {
  return u.matrix().rows() == u.matrix().cols() && unitarity_residual(u) <= tol;
}

template <typename Scalar>
BasicUnitaryBlock<Scalar> identity_block(const LabelList& in, const LabelList& out) {
  if (total_dim(in) != total_dim(out)) throw DimensionError("identity_block: dims differ");
  using M = typename BasicUnitaryBlock<Scalar>::Matrix;
  return BasicUnitaryBlock<Scalar>(in, out, M::Identity(total_dim(out), total_dim(in)));
}

inline UnitaryBlock identity_block(const LabelList& in, const LabelList& out) { return identity_block<cd>(in, out); }

template <typename Scalar>
BasicUnitaryBlock<Scalar> relabel(const BasicUnitaryBlock<Scalar>& u, const std::map<std::string, std::string>& mapping) {
  auto rename = [&](LabelList ls) {
    for (auto& l : ls) {
      auto it = mapping.find(l.name);
      if (it != mapping.end()) l.name = it->second;
    }
    return ls;
  };
  for (const auto& [from, to] : mapping)
    if (find_label(u.in_labels(), from) < 0 && find_label(u.out_labels(), from) < 0)
      throw LabelError("relabel: no label '" + from + "'");
  return BasicUnitaryBlock<Scalar>(rename(u.in_labels()), rename(u.out_labels()), u.matrix());
}

template <typename Scalar>
BasicUnitaryBlock<Scalar> reorder(const BasicUnitaryBlock<Scalar>& u, const std::vector<std::string>& in,
                                  const std::vector<std::string>& out) {
  return choi_to_matrix(pure_choi(u), in, out);
}

template <typename Scalar>
BasicUnitaryBlock<Scalar> kron(const BasicUnitaryBlock<Scalar>& a, const BasicUnitaryBlock<Scalar>& b) {
  using M = typename BasicUnitaryBlock<Scalar>::Matrix;
  const M& x = a.matrix();
  const M& y = b.matrix();
  M k(x.rows() * y.rows(), x.cols() * y.cols());
  for (Index i = 0; i < x.rows(); ++i)
    for (Index j = 0; j < x.cols(); ++j) k.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) = x(i, j) * y;
  return BasicUnitaryBlock<Scalar>(concat(a.in_labels(), b.in_labels()), concat(a.out_labels(), b.out_labels()), std::move(k));
}

// Applies `first` then `second`, connecting the wires whose names match.
template <typename Scalar>
BasicUnitaryBlock<Scalar> compose(const BasicUnitaryBlock<Scalar>& first, const BasicUnitaryBlock<Scalar>& second) {
  LabelList in = first.in_labels(), out;
  for (const auto& l : second.in_labels())
    if (find_label(first.out_labels(), l.name) < 0) in.push_back(l);
  for (const auto& l : first.out_labels())
    if (find_label(second.in_labels(), l.name) < 0) out.push_back(l);
  out = concat(out, second.out_labels());
  return choi_to_matrix(link(pure_choi(first), pure_choi(second)), names_of(in), names_of(out));
}

// ---- operators and the mixed link -----------------------------------------

namespace detail {
inline std::string dual_name(const std::string& n) { return n + '\x1f'; }
inline bool is_dual_name(const std::string& n) { return !n.empty() && n.back() == '\x1f'; }
}  // namespace detail

template <typename Scalar>
BasicLabeledTensor<Scalar> vectorize(const BasicLabeledOperator<Scalar>& a) {
  using RM = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  LabelList ls = a.labels();
  for (const auto& l : a.labels()) ls.push_back({detail::dual_name(l.name), l.dim});
  RM m = a.matrix();
  typename BasicLabeledTensor<Scalar>::Vector v = Eigen::Map<const typename BasicLabeledTensor<Scalar>::Vector>(m.data(), m.size());
  return BasicLabeledTensor<Scalar>(std::move(ls), std::move(v));
}

template <typename Scalar>
BasicLabeledOperator<Scalar> devectorize(const BasicLabeledTensor<Scalar>& t) {
  using RM = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  LabelList rows;
  std::vector<std::string> order;
  for (const auto& l : t.labels())
    if (!detail::is_dual_name(l.name)) {
      rows.push_back(l);
      order.push_back(l.name);
    }
  if (2 * rows.size() != t.rank()) throw LabelError("devectorize: unpaired legs");
  for (const auto& l : rows) order.push_back(detail::dual_name(l.name));
  auto p = permute(t, order);
  const Index d = total_dim(rows);
  Eigen::Map<const RM> m(p.amps().data(), d, d);
  return BasicLabeledOperator<Scalar>(std::move(rows), m);
}

// Σ_{ii'} A_{ii'} ⊗ B_{ii'} over the shared labels.
template <typename Scalar>
BasicLabeledOperator<Scalar> link_mixed(const BasicLabeledOperator<Scalar>& a, const BasicLabeledOperator<Scalar>& b) {
  return devectorize(link(vectorize(a), vectorize(b)));
}

template <typename Scalar>
BasicLabeledOperator<Scalar> outer(const BasicLabeledTensor<Scalar>& t) {
  return BasicLabeledOperator<Scalar>(t.labels(), t.amps() * t.amps().adjoint());
}

template <typename Scalar>
BasicLabeledOperator<Scalar> mixed_choi(const std::vector<BasicUnitaryBlock<Scalar>>& kraus) {
  if (kraus.empty()) throw ShapeError("mixed_choi: empty Kraus list");
  const auto& in = kraus.front().in_labels();
  const auto& out = kraus.front().out_labels();
  typename BasicLabeledOperator<Scalar>::Matrix m;
  for (const auto& k : kraus) {
    if (k.in_labels() != in || k.out_labels() != out) throw LabelError("mixed_choi: inconsistent Kraus label sets");
    auto v = pure_choi(k).amps();
    if (m.size() == 0)
      m = v * v.adjoint();
    else
      m += v * v.adjoint();
  }
  return BasicLabeledOperator<Scalar>(concat(in, out), std::move(m));
}

template <typename Scalar>
BasicLabeledOperator<Scalar> permute(const BasicLabeledOperator<Scalar>& a, const std::vector<std::string>& order) {
  return devectorize(permute(vectorize(a), [&] {
    std::vector<std::string> full = order;
    for (const auto& n : order) full.push_back(detail::dual_name(n));
    return full;
  }()));
}

template <typename Scalar>
BasicLabeledOperator<Scalar> relabel(const BasicLabeledOperator<Scalar>& a, const std::map<std::string, std::string>& mapping) {
  LabelList nl = a.labels();
  for (const auto& [from, to] : mapping) {
    int i = find_label(nl, from);
    if (i < 0) throw LabelError("relabel: no label '" + from + "'");
    nl[static_cast<std::size_t>(i)].name = to;
  }
  return BasicLabeledOperator<Scalar>(std::move(nl), a.matrix());
}

template <typename Scalar>
BasicLabeledOperator<Scalar> kron(const BasicLabeledOperator<Scalar>& a, const BasicLabeledOperator<Scalar>& b) {
  for (const auto& l : a.labels())
    if (b.index_of(l.name) >= 0) throw LabelError("kron: label '" + l.name + "' present in both operands");
  return link_mixed(a, b);
}

template <typename Scalar>
BasicLabeledOperator<Scalar> partial_trace(const BasicLabeledOperator<Scalar>& a, const std::vector<std::string>& names) {
  LabelList ls;
  for (const auto& n : names) {
    int i = a.index_of(n);
    if (i < 0) throw LabelError("partial_trace: no label '" + n + "'");
    ls.push_back(a.labels()[static_cast<std::size_t>(i)]);
  }
  using M = typename BasicLabeledOperator<Scalar>::Matrix;
  return link_mixed(a, BasicLabeledOperator<Scalar>(ls, M::Identity(total_dim(ls), total_dim(ls))));
}

template <typename Scalar>
double max_abs_diff(const BasicLabeledOperator<Scalar>& a, const BasicLabeledOperator<Scalar>& b) {
  return max_abs_diff(vectorize(a), vectorize(b));
}

template <typename Scalar>
bool is_hermitian(const BasicLabeledOperator<Scalar>& a, double tol = kDefaultTol) {
  return static_cast<double>((a.matrix() - a.matrix().adjoint()).cwiseAbs().maxCoeff()) <= tol;
}

}  // namespace tds
