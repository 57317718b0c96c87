#include "tds/laws.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

#include "tds/random.hpp"

namespace tds {

namespace {

const char* const kPool[] = {"a", "b", "c", "d", "e", "f", "g"};

Index draw_dim(Rng& rng) { return std::uniform_int_distribution<Index>(1, 3)(rng); }

LabelList draw_labels(Rng& rng, const std::string& prefix, int lo, int hi) {
  const int n = std::uniform_int_distribution<int>(lo, hi)(rng);
  LabelList out;
  for (int k = 0; k < n; ++k) out.push_back({prefix + std::to_string(k), draw_dim(rng)});
  return out;
}

// Hands each pool label to between one and `max_owners` of the operands.
void assign_labels(Rng& rng, const std::vector<SystemLabel>& pool, std::vector<LabelList*> owners, int max_owners) {
  for (const auto& l : pool) {
    std::vector<std::size_t> idx(owners.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::shuffle(idx.begin(), idx.end(), rng);
    const int k = std::uniform_int_distribution<int>(1, max_owners)(rng);
    for (int j = 0; j < k; ++j) owners[idx[static_cast<std::size_t>(j)]]->push_back(l);
  }
}

std::vector<SystemLabel> draw_pool(Rng& rng, int lo, int hi) {
  const int n = std::uniform_int_distribution<int>(lo, hi)(rng);
  std::vector<SystemLabel> out;
  for (int k = 0; k < n; ++k) out.push_back({kPool[k], draw_dim(rng)});
  return out;
}

LabelList primed(const LabelList& ls) {
  LabelList out = ls;
  for (auto& l : out) l.name += "'";
  return out;
}

std::map<std::string, std::string> prime_map(const LabelList& ls) {
  std::map<std::string, std::string> m;
  for (const auto& l : ls) m[l.name] = l.name + "'";
  return m;
}

LabeledTensor identity_on(const LabelList& a, const LabelList& b) {
  LabeledTensor t({}, LabeledTensor::Vector::Ones(1));
  for (std::size_t i = 0; i < a.size(); ++i) t = tensor(t, identity_dket(a[i], b[i]));
  return t;
}

// Kraus operators of a random channel in → out with at least `k` outcomes
// (more when needed for the isometry to exist).
std::vector<UnitaryBlock> random_kraus(Rng& rng, const LabelList& in, const LabelList& out, Index k) {
  const Index di = total_dim(in), dout = total_dim(out);
  k = std::max(k, (di + dout - 1) / dout);
  const Eigen::MatrixXcd v = random_isometry(rng, dout * k, di);
  std::vector<UnitaryBlock> ks;
  for (Index e = 0; e < k; ++e) {
    Eigen::MatrixXcd m(dout, di);
    for (Index r = 0; r < dout; ++r) m.row(r) = v.row(r * k + e);
    ks.emplace_back(in, out, std::move(m));
  }
  return ks;
}

}  // namespace

std::vector<LawResult> run_link_laws(std::uint64_t seed, int trials, double tol) {
  if (trials < 1) throw Error("laws: trials must be at least 1");
  Rng rng(seed);
  std::vector<LawResult> results;
  auto run = [&](const std::string& name, const std::function<double()>& trial) {
    LawResult r{name, trials, 0, 0};
    for (int t = 0; t < trials; ++t) {
      const double res = trial();
      r.max_residual = std::max(r.max_residual, res);
      if (!(res <= tol)) ++r.failures;
    }
    results.push_back(r);
  };

  run("commutativity", [&] {
    LabelList la, lb;
    assign_labels(rng, draw_pool(rng, 1, 5), {&la, &lb}, 2);
    const auto a = random_tensor(rng, la), b = random_tensor(rng, lb);
    return max_abs_diff(link(a, b), link(b, a));
  });

  run("associativity", [&] {
    LabelList la, lb, lc;
    assign_labels(rng, draw_pool(rng, 2, 7), {&la, &lb, &lc}, 2);
    const auto a = random_tensor(rng, la), b = random_tensor(rng, lb), c = random_tensor(rng, lc);
    return max_abs_diff(link(link(a, b), c), link(a, link(b, c)));
  });

  run("unitary_cancellation_pure", [&] {
    const LabelList x = draw_labels(rng, "x", 1, 3), y = draw_labels(rng, "y", 1, 3);
    LabelList yy = y;
    // square blocks: fold the dimension mismatch into one extra y leg
    const Index dx = total_dim(x), dy = total_dim(y);
    const Index l = std::lcm(dx, dy);
    LabelList xs = x;
    if (l / dx > 1) xs.push_back({"xe", l / dx});
    if (l / dy > 1) yy.push_back({"ye", l / dy});
    const auto u = random_unitary_block(rng, xs, yy);
    const auto ud = relabel(adjoint(u), prime_map(xs));
    return max_abs_diff(link(pure_choi(u), pure_choi(ud)), identity_on(xs, primed(xs)));
  });

  run("unitary_cancellation_mixed", [&] {
    const LabelList x = draw_labels(rng, "x", 1, 2);
    const LabelList y{{"y", total_dim(x)}};
    const auto u = random_unitary_block(rng, x, y);
    const auto ud = relabel(adjoint(u), prime_map(x));
    const auto lhs = link_mixed(outer(pure_choi(u)), outer(pure_choi(ud)));
    return max_abs_diff(lhs, outer(identity_on(x, primed(x))));
  });

  run("composition_pure", [&] {
    const LabelList x = draw_labels(rng, "x", 1, 2);
    const Index d = total_dim(x);
    const LabelList y{{"y", d}}, z = primed(x);
    const auto u1 = random_unitary_block(rng, x, y), u2 = random_unitary_block(rng, y, z);
    return max_abs_diff(pure_choi(compose(u1, u2)), link(pure_choi(u1), pure_choi(u2)));
  });

  run("composition_mixed", [&] {
    const LabelList x = draw_labels(rng, "x", 1, 2), y = draw_labels(rng, "y", 1, 2), z = draw_labels(rng, "z", 1, 2);
    const Index k1 = draw_dim(rng), k2 = draw_dim(rng);
    const auto ka = random_kraus(rng, x, y, k1), kb = random_kraus(rng, y, z, k2);
    std::vector<UnitaryBlock> kab;
    for (const auto& b : kb)
      for (const auto& a : ka) kab.emplace_back(x, z, b.matrix() * a.matrix());
    return max_abs_diff(link_mixed(mixed_choi(ka), mixed_choi(kb)), mixed_choi(kab));
  });

  return results;
}

}  // namespace tds
