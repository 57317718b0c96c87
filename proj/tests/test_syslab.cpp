#include <map>

#include "doctest.h"
#include "tds/random.hpp"
#include "tds/syslab.hpp"

using namespace tds;

namespace {

using Assignment = std::map<std::string, Index>;

// Entry of a tensor at a named multi-index, computed from the row-major layout by hand.
cd entry(const LabeledTensor& t, const Assignment& a) {
  Index flat = 0;
  for (const auto& l : t.labels()) flat = flat * l.dim + a.at(l.name);
  return t.amps()(flat);
}

// Calls f on every assignment of the given labels.
template <typename F>
void for_each_assignment(const LabelList& ls, F&& f) {
  Assignment a;
  for (const auto& l : ls) a[l.name] = 0;
  const Index total = total_dim(ls);
  for (Index n = 0; n < total; ++n) {
    Index rem = n;
    for (std::size_t k = ls.size(); k-- > 0;) {
      a[ls[k].name] = rem % ls[k].dim;
      rem /= ls[k].dim;
    }
    f(a);
  }
}

// Naive link: Σ over shared indices of a·b, no transposition needed for pure vectors.
LabeledTensor naive_link(const LabeledTensor& a, const LabeledTensor& b) {
  LabelList open, shared;
  for (const auto& l : a.labels()) (b.has(l.name) ? shared : open).push_back(l);
  for (const auto& l : b.labels())
    if (!a.has(l.name)) open.push_back(l);
  Eigen::VectorXcd v(total_dim(open));
  Index idx = 0;
  for_each_assignment(open, [&](const Assignment& o) {
    cd s = 0;
    for_each_assignment(shared, [&](const Assignment& sh) {
      Assignment full = o;
      full.insert(sh.begin(), sh.end());
      s += entry(a, full) * entry(b, full);
    });
    v(idx++) = s;
  });
  return LabeledTensor(open, v);
}

// Operator entry ⟨r|M|c⟩ with named row/column assignments.
cd op_entry(const LabeledOperator& m, const Assignment& r, const Assignment& c) {
  Index ri = 0, ci = 0;
  for (const auto& l : m.labels()) {
    ri = ri * l.dim + r.at(l.name);
    ci = ci * l.dim + c.at(l.name);
  }
  return m.matrix()(ri, ci);
}

// Naive mixed link: Tr_S[(A^{T_S} ⊗ 1)(1 ⊗ B)] written out entrywise.
LabeledOperator naive_link_mixed(const LabeledOperator& a, const LabeledOperator& b) {
  LabelList oa, ob, shared;
  for (const auto& l : a.labels()) (b.index_of(l.name) >= 0 ? shared : oa).push_back(l);
  for (const auto& l : b.labels())
    if (a.index_of(l.name) < 0) ob.push_back(l);
  const LabelList open = concat(oa, ob);
  const Index d = total_dim(open);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
  Index ri = 0;
  for_each_assignment(open, [&](const Assignment& r) {
    Index ci = 0;
    for_each_assignment(open, [&](const Assignment& c) {
      cd s = 0;
      for_each_assignment(shared, [&](const Assignment& s1) {
        for_each_assignment(shared, [&](const Assignment& s2) {
          // Σ_{u,t} A[(r,u),(c,t)] B[(u,r),(t,c)]
          Assignment row = r, col = c;
          for (const auto& [k, v] : s1) row[k] = v;
          for (const auto& [k, v] : s2) col[k] = v;
          s += op_entry(a, row, col) * op_entry(b, row, col);
        });
      });
      m(ri, ci) = s;
      ++ci;
    });
    ++ri;
  });
  return LabeledOperator(open, m);
}

LabeledOperator random_op(Rng& rng, const LabelList& ls) {
  const Index d = total_dim(ls);
  return LabeledOperator(ls, random_gaussian(rng, d, d));
}

}  // namespace

TEST_CASE("link matches a naive contraction, dense and sparse paths") {
  Rng rng(11);
  const SystemLabel a{"a", 2}, b{"b", 3}, c{"c", 2}, d{"d", 4};
  const LabeledTensor x = random_tensor(rng, {a, b, c});
  const LabeledTensor y = random_tensor(rng, {d, c, b});
  CHECK(max_abs_diff(link(x, y), naive_link(x, y)) < 1e-12);

  // Sparse operands (≥ 256 entries, mostly zero) take the sparse kernel.
  const SystemLabel e{"e", 8}, f{"f", 8}, g{"g", 8};
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(512), w = Eigen::VectorXcd::Zero(512);
  for (int k = 0; k < 512; k += 37) v(k) = cd(k, 1);
  for (int k = 3; k < 512; k += 29) w(k) = cd(1, -k);
  const LabeledTensor sx({e, f, g}, v), sy({g, f, SystemLabel{"h", 8}}, w);
  CHECK(max_abs_diff(link(sx, sy), naive_link(sx, sy)) < 1e-9);
}

TEST_CASE("link is commutative up to leg order and handles no shared legs") {
  Rng rng(3);
  const LabeledTensor x = random_tensor(rng, {{"a", 2}, {"b", 3}});
  const LabeledTensor y = random_tensor(rng, {{"b", 3}, {"c", 2}});
  CHECK(max_abs_diff(link(x, y), link(y, x)) < 1e-13);
  const LabeledTensor z = random_tensor(rng, {{"q", 3}});
  const LabeledTensor t = link(x, z);
  CHECK(t.rank() == 3);
  CHECK(std::abs(entry(t, {{"a", 1}, {"b", 2}, {"q", 0}}) - entry(x, {{"a", 1}, {"b", 2}}) * entry(z, {{"q", 0}})) < 1e-14);
}

TEST_CASE("link rejects a dimension mismatch on a shared label") {
  Rng rng(1);
  const LabeledTensor x = random_tensor(rng, {{"a", 2}});
  const LabeledTensor y = random_tensor(rng, {{"a", 3}});
  CHECK_THROWS_AS(link(x, y), DimensionError);
}

TEST_CASE("labels are validated") {
  CHECK_THROWS_AS(LabeledTensor({{"a", 2}, {"a", 2}}, Eigen::VectorXcd::Zero(4)), LabelError);
  CHECK_THROWS_AS(LabeledTensor({{"a", 2}}, Eigen::VectorXcd::Zero(3)), DimensionError);
  CHECK_THROWS_AS(LabeledTensor({{"a", 0}}, Eigen::VectorXcd::Zero(0)), DimensionError);
}

TEST_CASE("pure Choi vector of a unitary is Σ|i⟩|U i⟩") {
  Rng rng(5);
  const UnitaryBlock u = random_unitary_block(rng, {{"x", 3}}, {{"y", 3}});
  const LabeledTensor ch = pure_choi(u);
  for (Index i = 0; i < 3; ++i)
    for (Index j = 0; j < 3; ++j) CHECK(std::abs(entry(ch, {{"x", i}, {"y", j}}) - u.matrix()(j, i)) < 1e-15);
  // Round trip through the matrix view.
  const UnitaryBlock back = choi_to_matrix(ch, {"x"}, {"y"});
  CHECK((back.matrix() - u.matrix()).norm() < 1e-14);
}

TEST_CASE("linking Choi vectors composes the maps") {
  Rng rng(6);
  const UnitaryBlock u = random_unitary_block(rng, {{"x", 2}}, {{"y", 2}});
  const UnitaryBlock v = random_unitary_block(rng, {{"y", 2}}, {{"z", 2}});
  const UnitaryBlock vu({{"x", 2}}, {{"z", 2}}, v.matrix() * u.matrix());
  CHECK(max_abs_diff(link(pure_choi(u), pure_choi(v)), pure_choi(vu)) < 1e-13);
  CHECK(max_abs_diff(pure_choi(compose(u, v)), pure_choi(vu)) < 1e-13);
}

TEST_CASE("identity_dket acts as a wire") {
  Rng rng(7);
  const LabeledTensor x = random_tensor(rng, {{"a", 3}, {"b", 2}});
  const LabeledTensor moved = link(x, identity_dket<cd>({"a", 3}, {"c", 3}));
  CHECK(max_abs_diff(moved, relabel(x, {{"a", "c"}})) < 1e-15);
  CHECK_THROWS_AS(identity_dket<cd>({"a", 2}, {"b", 3}), DimensionError);
}

TEST_CASE("permute moves entries with their labels") {
  Rng rng(8);
  const LabeledTensor x = random_tensor(rng, {{"a", 2}, {"b", 3}, {"c", 4}});
  const LabeledTensor p = permute(x, {"c", "a", "b"});
  for_each_assignment(x.labels(), [&](const Assignment& as) { CHECK(entry(p, as) == entry(x, as)); });
  CHECK_THROWS_AS(permute(x, {"a", "b"}), LabelError);
  CHECK_THROWS_AS(permute(x, {"a", "b", "z"}), LabelError);
}

TEST_CASE("dagger_choi is the Choi vector of the adjoint") {
  Rng rng(9);
  const UnitaryBlock u = random_unitary_block(rng, {{"x", 2}, {"w", 2}}, {{"y", 4}});
  const LabeledTensor d = dagger_choi(pure_choi(u), {"x", "w"}, {"y"});
  CHECK(max_abs_diff(d, pure_choi(adjoint(u))) < 1e-14);
  // U followed by U† is the identity wire bundle.
  const LabeledTensor round = link(pure_choi(u), relabel(d, {{"x", "x2"}, {"w", "w2"}}));
  const LabeledTensor wires = tensor(identity_dket<cd>({"x", 2}, {"x2", 2}), identity_dket<cd>({"w", 2}, {"w2", 2}));
  CHECK(max_abs_diff(round, wires) < 1e-13);
}

TEST_CASE("merge_labels and split_label are inverse") {
  Rng rng(10);
  const LabeledTensor x = random_tensor(rng, {{"a", 2}, {"b", 3}, {"c", 2}});
  const LabeledTensor m = merge_labels(x, {"a", "c"}, {"ac", 4});
  CHECK(m.rank() == 2);
  const LabeledTensor s = split_label(m, "ac", {{"a", 2}, {"c", 2}});
  CHECK(max_abs_diff(s, x) < 1e-15);
  CHECK_THROWS_AS(merge_labels(x, {"a", "c"}, {"ac", 5}), DimensionError);
}

TEST_CASE("mixed link matches the naive partial-transpose formula") {
  Rng rng(12);
  const LabeledOperator a = random_op(rng, {{"x", 2}, {"s", 2}});
  const LabeledOperator b = random_op(rng, {{"s", 2}, {"y", 3}});
  CHECK(max_abs_diff(link_mixed(a, b), naive_link_mixed(a, b)) < 1e-12);
}

TEST_CASE("mixed link of pure Choi operators is the outer product of the pure link") {
  Rng rng(13);
  const LabeledTensor x = random_tensor(rng, {{"a", 2}, {"b", 2}});
  const LabeledTensor y = random_tensor(rng, {{"b", 2}, {"c", 3}});
  CHECK(max_abs_diff(link_mixed(outer(x), outer(y)), outer(link(x, y))) < 1e-12);
}

TEST_CASE("partial trace and kron") {
  Rng rng(14);
  const LabeledOperator a = random_op(rng, {{"a", 2}});
  const LabeledOperator b = random_op(rng, {{"b", 3}});
  const LabeledOperator ab = kron(a, b);
  const LabeledOperator tr = partial_trace(ab, {"b"});
  CHECK((tr.matrix() - b.matrix().trace() * a.matrix()).norm() < 1e-12);
}

TEST_CASE("unitarity checks") {
  Rng rng(15);
  const UnitaryBlock u = random_unitary_block(rng, {{"a", 3}}, {{"b", 3}});
  CHECK(is_unitary(u));
  CHECK(unitarity_residual(u) < 1e-13);
  Eigen::MatrixXcd m = u.matrix();
  m(0, 0) += 0.1;
  CHECK_FALSE(is_unitary(UnitaryBlock({{"a", 3}}, {{"b", 3}}, m)));
  const UnitaryBlock iso({{"a", 2}}, {{"b", 4}}, random_isometry(rng, 4, 2));
  CHECK(is_isometry(iso));
  CHECK_FALSE(is_unitary(iso));
}

TEST_CASE("kron of blocks matches the Kronecker product") {
  Rng rng(16);
  const UnitaryBlock u = random_unitary_block(rng, {{"a", 2}}, {{"b", 2}});
  const UnitaryBlock v = random_unitary_block(rng, {{"c", 3}}, {{"d", 3}});
  const UnitaryBlock k = kron(u, v);
  for (Index i = 0; i < 2; ++i)
    for (Index j = 0; j < 2; ++j)
      for (Index p = 0; p < 3; ++p)
        for (Index q = 0; q < 3; ++q)
          CHECK(std::abs(k.matrix()(i * 3 + p, j * 3 + q) - u.matrix()(i, j) * v.matrix()(p, q)) < 1e-15);
}

TEST_CASE("vectorize and devectorize round trip") {
  Rng rng(17);
  const LabeledOperator a = random_op(rng, {{"a", 2}, {"b", 3}});
  CHECK(max_abs_diff(devectorize(vectorize(a)), a) < 1e-15);
}
