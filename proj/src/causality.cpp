#include "tds/causality.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>
#include <set>

namespace tds {

// ---- correlations -------------------------------------------------------------

Correlation Correlation::zeros(std::vector<Index> settings, std::vector<Index> outcomes) {
  if (settings.size() != outcomes.size()) throw ShapeError("correlation: settings/outcomes arity differ");
  Correlation c;
  c.settings = std::move(settings);
  c.outcomes = std::move(outcomes);
  c.p.assign(static_cast<std::size_t>(c.n_settings() * c.n_outcomes()), mpq_class(0));
  return c;
}

Index Correlation::n_settings() const {
  return std::accumulate(settings.begin(), settings.end(), Index{1}, std::multiplies<>());
}

Index Correlation::n_outcomes() const {
  return std::accumulate(outcomes.begin(), outcomes.end(), Index{1}, std::multiplies<>());
}

namespace {

Index mixed_index(const std::vector<Index>& radix, const std::vector<Index>& v) {
  if (v.size() != radix.size()) throw ShapeError("tuple arity mismatch");
  Index k = 0;
  for (std::size_t j = 0; j < v.size(); ++j) {
    if (v[j] < 0 || v[j] >= radix[j]) throw ShapeError("tuple entry out of range");
    k = k * radix[j] + v[j];
  }
  return k;
}

}  // namespace

Index Correlation::setting_index(const std::vector<Index>& i) const { return mixed_index(settings, i); }
Index Correlation::outcome_index(const std::vector<Index>& o) const { return mixed_index(outcomes, o); }

mpq_class& Correlation::at(const std::vector<Index>& o, const std::vector<Index>& i) {
  return p[static_cast<std::size_t>(setting_index(i) * n_outcomes() + outcome_index(o))];
}

const mpq_class& Correlation::at(const std::vector<Index>& o, const std::vector<Index>& i) const {
  return p[static_cast<std::size_t>(setting_index(i) * n_outcomes() + outcome_index(o))];
}

bool Correlation::nonnegative() const {
  return std::all_of(p.begin(), p.end(), [](const mpq_class& x) { return sgn(x) >= 0; });
}

bool Correlation::normalized() const {
  const Index no = n_outcomes();
  for (Index s = 0; s < n_settings(); ++s) {
    mpq_class t = 0;
    for (Index o = 0; o < no; ++o) t += p[static_cast<std::size_t>(s * no + o)];
    if (t != 1) return false;
  }
  return true;
}

bool Correlation::operator==(const Correlation& other) const {
  return settings == other.settings && outcomes == other.outcomes && p == other.p;
}

mpq_class eval_inequality(const Correlation& c, const CausalInequality& q) {
  if (c.settings != q.settings || c.outcomes != q.outcomes || c.p.size() != q.coeffs.size())
    throw ShapeError("inequality and correlation shapes differ");
  mpq_class s = 0;
  for (std::size_t k = 0; k < c.p.size(); ++k)
    if (sgn(q.coeffs[k]) != 0) s += q.coeffs[k] * c.p[k];
  return s - q.bound;
}

CausalInequality make_I1() {
  const Correlation shape = Correlation::binary(3);
  CausalInequality q{shape.settings, shape.outcomes, std::vector<mpq_class>(shape.p.size(), mpq_class(0)), 0};
  auto add = [&](std::vector<Index> o, std::vector<Index> i, int c) {
    q.coeffs[static_cast<std::size_t>(shape.setting_index(i) * shape.n_outcomes() + shape.outcome_index(o))] += c;
  };
  add({0, 0, 0}, {0, 0, 1}, 1);
  add({0, 0, 1}, {0, 0, 1}, 1);
  add({0, 0, 0}, {1, 0, 0}, 1);
  add({1, 0, 0}, {1, 0, 0}, 1);
  add({0, 0, 0}, {0, 1, 0}, 1);
  add({0, 1, 0}, {0, 1, 0}, 1);
  add({0, 0, 0}, {0, 0, 0}, -1);
  return q;
}

std::size_t term_count(const CausalInequality& q) {
  return static_cast<std::size_t>(
      std::count_if(q.coeffs.begin(), q.coeffs.end(), [](const mpq_class& x) { return sgn(x) != 0; }));
}

Correlation bw_correlation() {
  Correlation c = Correlation::binary(3);
  for (Index a = 0; a < 2; ++a)
    for (Index b = 0; b < 2; ++b)
      for (Index cc = 0; cc < 2; ++cc) {
        const Index oa = (!b) && cc, ob = (!cc) && a, oc = (!a) && b;
        c.at({oa, ob, oc}, {a, b, cc}) = 1;
      }
  return c;
}

Correlation uniform_correlation(int n) {
  Correlation c = Correlation::binary(n);
  const mpq_class v(1, c.n_outcomes());
  for (auto& x : c.p) x = v;
  return c;
}

// ---- vertices -----------------------------------------------------------------

namespace {

using Table = std::vector<std::uint8_t>;  // local outcome bits per local setting

std::uint64_t encode(const Table& t, int m) {
  std::uint64_t code = 0;
  for (std::size_t s = 0; s < t.size(); ++s) code |= static_cast<std::uint64_t>(t[s]) << (static_cast<std::size_t>(m) * s);
  return code;
}

// Deterministic causal tables for m parties: a first party X answers with
// f(i_X), the rest follow a table of their own chosen per value of i_X.
const std::vector<Table>& local_vertices(int m) {
  static std::map<int, std::vector<Table>> memo;
  auto it = memo.find(m);
  if (it != memo.end()) return it->second;
  std::vector<Table> out;
  if (m == 0) {
    out.push_back(Table{0});
  } else {
    const auto& sub = local_vertices(m - 1);
    const int ns = 1 << m;
    std::set<std::uint64_t> seen;
    for (int xi = 0; xi < m; ++xi)
      for (int f = 0; f < 4; ++f)
        for (const auto& g0 : sub)
          for (const auto& g1 : sub) {
            Table t(static_cast<std::size_t>(ns));
            for (int s = 0; s < ns; ++s) {
              const int shift = m - 1 - xi;
              const int ix = (s >> shift) & 1;
              const int hi = s >> (shift + 1), lo = s & ((1 << shift) - 1);
              const int rest = (hi << shift) | lo;
              const int ox = (f >> ix) & 1;
              const int orest = (ix ? g1 : g0)[static_cast<std::size_t>(rest)];
              const int ohi = orest >> shift, olo = orest & ((1 << shift) - 1);
              t[static_cast<std::size_t>(s)] = static_cast<std::uint8_t>((((ohi << 1) | ox) << shift) | olo);
            }
            if (seen.insert(encode(t, m)).second) out.push_back(std::move(t));
          }
  }
  return memo.emplace(m, std::move(out)).first->second;
}

void require_binary(const Correlation& c) {
  const int n = c.parties();
  if (n < 1 || n > 3) throw ShapeError("causal polytope supports 1 to 3 parties");
  for (int k = 0; k < n; ++k)
    if (c.settings[static_cast<std::size_t>(k)] != 2 || c.outcomes[static_cast<std::size_t>(k)] != 2)
      throw ShapeError("causal polytope supports binary settings and outcomes only");
}

}  // namespace

std::vector<std::uint64_t> causal_vertex_codes(int n) {
  if (n < 1 || n > 3) throw ShapeError("vertex enumeration supports 1 to 3 parties");
  std::vector<std::uint64_t> codes;
  for (const auto& t : local_vertices(n)) codes.push_back(encode(t, n));
  std::sort(codes.begin(), codes.end());
  return codes;
}

Correlation vertex_correlation(int n, std::uint64_t code) {
  Correlation c = Correlation::binary(n);
  const Index no = c.n_outcomes();
  for (Index s = 0; s < c.n_settings(); ++s) {
    const Index o = static_cast<Index>((code >> (static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(s))) &
                                       static_cast<std::uint64_t>(no - 1));
    c.p[static_cast<std::size_t>(s * no + o)] = 1;
  }
  return c;
}

std::vector<Correlation> enumerate_causal_vertices(int n) {
  std::vector<Correlation> out;
  for (auto code : causal_vertex_codes(n)) out.push_back(vertex_correlation(n, code));
  return out;
}

std::optional<std::uint64_t> deterministic_code(const Correlation& c) {
  require_binary(c);
  const int n = c.parties();
  const Index no = c.n_outcomes();
  std::uint64_t code = 0;
  for (Index s = 0; s < c.n_settings(); ++s) {
    Index hit = -1;
    for (Index o = 0; o < no; ++o) {
      const auto& x = c.p[static_cast<std::size_t>(s * no + o)];
      if (x == 1 && hit < 0)
        hit = o;
      else if (x != 0)
        return std::nullopt;
    }
    if (hit < 0) return std::nullopt;
    code |= static_cast<std::uint64_t>(hit) << (static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(s));
  }
  return code;
}

// ---- exact feasibility ----------------------------------------------------------
//
// Phase-one revised simplex over the vertex columns with one artificial per row:
// minimise Σ a_r subject to Σ_v λ_v v + a = c, λ, a ≥ 0. Columns are priced by
// scanning all vertices with integer arithmetic (duals scaled to a common
// denominator), so every decision is exact.

namespace {

struct Polytope {
  int n = 0;
  Index ns = 0, no = 0, m = 0;
  std::vector<std::uint64_t> codes;
  std::vector<std::uint16_t> rows;  // rows[v * ns + s]

  explicit Polytope(int parties) : n(parties), codes(causal_vertex_codes(parties)) {
    ns = Index{1} << n;
    no = ns;
    m = ns * no;
    rows.resize(codes.size() * static_cast<std::size_t>(ns));
    for (std::size_t v = 0; v < codes.size(); ++v)
      for (Index s = 0; s < ns; ++s) {
        const Index o = static_cast<Index>((codes[v] >> (static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(s))) &
                                           static_cast<std::uint64_t>(no - 1));
        rows[v * static_cast<std::size_t>(ns) + static_cast<std::size_t>(s)] = static_cast<std::uint16_t>(s * no + o);
      }
  }

  std::size_t size() const { return codes.size(); }
  const std::uint16_t* col(std::size_t v) const { return rows.data() + v * static_cast<std::size_t>(ns); }
};

const Polytope& polytope(int n) {
  static std::map<int, Polytope> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, Polytope(n)).first;
  return it->second;
}

// Best improving column among `allowed` for duals y: largest y·v. Returns -1
// when no allowed vertex has y·v > 0.
long price(const Polytope& P, const std::vector<std::uint32_t>& allowed, const std::vector<mpq_class>& y) {
  mpz_class L = 1;
  for (const auto& v : y) {
    mpz_class d = v.get_den();
    mpz_lcm(L.get_mpz_t(), L.get_mpz_t(), d.get_mpz_t());
  }
  std::vector<mpz_class> Y(y.size());
  bool fits = true;
  const mpz_class limit = mpz_class(1) << 56;
  for (std::size_t j = 0; j < y.size(); ++j) {
    Y[j] = y[j].get_num() * (L / y[j].get_den());
    if (abs(Y[j]) >= limit) fits = false;
  }
  long best = -1;
  if (fits) {
    std::vector<long long> yi(y.size());
    for (std::size_t j = 0; j < y.size(); ++j) yi[j] = Y[j].get_si();
    long long best_score = 0;
    for (auto v : allowed) {
      const auto* c = P.col(v);
      long long s = 0;
      for (Index k = 0; k < P.ns; ++k) s += yi[c[k]];
      if (s > best_score) {
        best_score = s;
        best = static_cast<long>(v);
      }
    }
    return best;
  }
  mpz_class best_score = 0;
  for (auto v : allowed) {
    const auto* c = P.col(v);
    mpz_class s = 0;
    for (Index k = 0; k < P.ns; ++k) s += Y[c[k]];
    if (s > best_score) {
      best_score = s;
      best = static_cast<long>(v);
    }
  }
  return best;
}

mpq_class vertex_value(const Polytope& P, std::size_t v, const std::vector<mpq_class>& y) {
  mpq_class s = 0;
  const auto* c = P.col(v);
  for (Index k = 0; k < P.ns; ++k) s += y[c[k]];
  return s;
}

}  // namespace

CausalCertificate is_causal(const Correlation& c) {
  require_binary(c);
  const Polytope& P = polytope(c.parties());
  const Index m = P.m;
  const long V = static_cast<long>(P.size());
  const auto um = static_cast<std::size_t>(m);

  CausalCertificate cert;
  for (std::size_t k = 0; k < um; ++k)
    if (sgn(c.p[k]) < 0) {
      // negative probabilities are outside the polytope; the entry itself is a witness
      CausalInequality w{c.settings, c.outcomes, std::vector<mpq_class>(um, mpq_class(0)), 0};
      w.coeffs[k] = 1;
      cert.witness = w;
      return cert;
    }

  // Only vertices supported inside supp(c) can carry weight.
  std::vector<std::uint32_t> allowed;
  for (std::size_t v = 0; v < P.size(); ++v) {
    const auto* col = P.col(v);
    bool ok = true;
    for (Index k = 0; k < P.ns && ok; ++k) ok = sgn(c.p[col[k]]) > 0;
    if (ok) allowed.push_back(static_cast<std::uint32_t>(v));
  }

  std::vector<mpq_class> binv(um * um, mpq_class(0));
  for (std::size_t i = 0; i < um; ++i) binv[i * um + i] = 1;
  std::vector<long> basis(um);
  for (std::size_t i = 0; i < um; ++i) basis[i] = V + static_cast<long>(i);
  std::vector<mpq_class> xb = c.p;

  std::vector<mpq_class> y(um), d(um);
  for (;;) {
    for (std::size_t j = 0; j < um; ++j) y[j] = 0;
    for (std::size_t i = 0; i < um; ++i)
      if (basis[i] >= V)
        for (std::size_t j = 0; j < um; ++j)
          if (sgn(binv[i * um + j]) != 0) y[j] += binv[i * um + j];

    const long enter = price(P, allowed, y);
    if (enter < 0) break;

    const auto* col = P.col(static_cast<std::size_t>(enter));
    for (std::size_t i = 0; i < um; ++i) {
      d[i] = 0;
      for (Index k = 0; k < P.ns; ++k) d[i] += binv[i * um + col[k]];
    }
    // Lexicographic ratio test on the rows (xb | B⁻¹) / d: rows stay
    // lex-positive, so the method cannot cycle.
    long leave = -1;
    mpq_class best_ratio;
    for (std::size_t i = 0; i < um; ++i) {
      if (sgn(d[i]) <= 0) continue;
      mpq_class r = xb[i] / d[i];
      bool take = leave < 0 || r < best_ratio;
      if (!take && r == best_ratio) {
        const auto l = static_cast<std::size_t>(leave);
        for (std::size_t j = 0; j < um; ++j) {
          const mpq_class a = binv[i * um + j] / d[i], b = binv[l * um + j] / d[l];
          if (a != b) {
            take = a < b;
            break;
          }
        }
      }
      if (take) {
        leave = static_cast<long>(i);
        best_ratio = r;
      }
    }
    if (leave < 0) throw Error("is_causal: unbounded phase-one problem");
    const auto r = static_cast<std::size_t>(leave);

    const mpq_class piv = d[r];
    for (std::size_t j = 0; j < um; ++j)
      if (sgn(binv[r * um + j]) != 0) binv[r * um + j] /= piv;
    xb[r] /= piv;
    for (std::size_t i = 0; i < um; ++i) {
      if (i == r || sgn(d[i]) == 0) continue;
      const mpq_class f = d[i];
      for (std::size_t j = 0; j < um; ++j)
        if (sgn(binv[r * um + j]) != 0) binv[i * um + j] -= f * binv[r * um + j];
      xb[i] -= f * xb[r];
    }
    basis[r] = enter;
    ++cert.pivots;
  }

  mpq_class objective = 0;
  for (std::size_t i = 0; i < um; ++i)
    if (basis[i] >= V) objective += xb[i];
  if (sgn(objective) == 0) {
    cert.feasible = true;
    std::map<std::uint64_t, mpq_class> w;
    for (std::size_t i = 0; i < um; ++i)
      if (basis[i] < V && sgn(xb[i]) > 0) w[P.codes[static_cast<std::size_t>(basis[i])]] += xb[i];
    cert.weights.assign(w.begin(), w.end());
  } else {
    // y·v ≤ 0 on the allowed vertices and y·c = objective > 0. Every other
    // vertex touches a zero entry of c, so lowering y there by M separates them
    // too without changing y·c.
    mpq_class M = 0;
    for (std::size_t v = 0; v < P.size(); ++v) {
      const mpq_class s = vertex_value(P, v, y);
      if (s > M) M = s;
    }
    CausalInequality q{c.settings, c.outcomes, std::vector<mpq_class>(um), 0};
    for (std::size_t j = 0; j < um; ++j) q.coeffs[j] = sgn(c.p[j]) == 0 ? mpq_class(M - y[j]) : mpq_class(-y[j]);
    cert.witness = std::move(q);
  }
  return cert;
}

bool check_certificate(const Correlation& c, const CausalCertificate& cert) {
  require_binary(c);
  const int n = c.parties();
  const Polytope& P = polytope(n);
  if (cert.feasible) {
    Correlation sum = Correlation::binary(n);
    mpq_class total = 0;
    for (const auto& [code, w] : cert.weights) {
      if (sgn(w) <= 0 || !std::binary_search(P.codes.begin(), P.codes.end(), code)) return false;
      total += w;
      const auto v = vertex_correlation(n, code);
      for (std::size_t k = 0; k < sum.p.size(); ++k)
        if (sgn(v.p[k]) != 0) sum.p[k] += w;
    }
    return total == 1 && sum.p == c.p;
  }
  if (!cert.witness) return false;
  if (sgn(eval_inequality(c, *cert.witness)) >= 0) return false;
  for (std::size_t v = 0; v < P.size(); ++v) {
    mpq_class s = -cert.witness->bound;
    const auto* col = P.col(v);
    for (Index k = 0; k < P.ns; ++k) s += cert.witness->coeffs[col[k]];
    if (sgn(s) < 0) return false;
  }
  return true;
}

// ---- strict partial orders ------------------------------------------------------

SPO::SPO(std::vector<std::string> elems) : elements(std::move(elems)) {
  std::set<std::string> u(elements.begin(), elements.end());
  if (u.size() != elements.size()) throw LabelError("SPO: duplicate element");
  rel.assign(elements.size(), std::vector<char>(elements.size(), 0));
}

int SPO::index(const std::string& name) const {
  auto it = std::find(elements.begin(), elements.end(), name);
  if (it == elements.end()) throw LabelError("SPO: no element '" + name + "'");
  return static_cast<int>(it - elements.begin());
}

bool SPO::precedes(const std::string& a, const std::string& b) const {
  return rel[static_cast<std::size_t>(index(a))][static_cast<std::size_t>(index(b))] != 0;
}

void SPO::add(const std::string& a, const std::string& b) {
  rel[static_cast<std::size_t>(index(a))][static_cast<std::size_t>(index(b))] = 1;
}

SPO transitive_closure(SPO s) {
  const std::size_t n = s.elements.size();
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (s.rel[i][k])
        for (std::size_t j = 0; j < n; ++j)
          if (s.rel[k][j]) s.rel[i][j] = 1;
  return s;
}

SpoReport spo_validate(const SPO& s) {
  SpoReport r;
  const std::size_t n = s.elements.size();
  for (std::size_t i = 0; i < n; ++i)
    if (s.rel[i][i]) {
      r.irreflexive = false;
      r.violations.push_back(s.elements[i] + " < " + s.elements[i]);
    }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k)
      if (s.rel[i][k])
        for (std::size_t j = 0; j < n; ++j)
          if (s.rel[k][j] && !s.rel[i][j]) {
            r.transitive = false;
            r.violations.push_back(s.elements[i] + " < " + s.elements[k] + " < " + s.elements[j]);
          }
  return r;
}

CausalSets causal_sets(const SPO& s, const std::string& x) {
  const auto xi = static_cast<std::size_t>(s.index(x));
  CausalSets c;
  for (std::size_t j = 0; j < s.elements.size(); ++j) {
    if (j == xi) continue;
    if (s.rel[j][xi])
      c.past.push_back(s.elements[j]);
    else if (s.rel[xi][j])
      c.future.push_back(s.elements[j]);
    else
      c.elsewhere.push_back(s.elements[j]);
  }
  return c;
}

bool CoarseRelation::related(const std::string& x, const std::string& y) const {
  auto fx = std::find(parties.begin(), parties.end(), x), fy = std::find(parties.begin(), parties.end(), y);
  if (fx == parties.end() || fy == parties.end()) throw LabelError("coarse relation: unknown party");
  return rel[static_cast<std::size_t>(fx - parties.begin())][static_cast<std::size_t>(fy - parties.begin())] != 0;
}

CoarseRelation coarse_grain(const SPO& s) {
  CoarseRelation c;
  std::set<std::string> names(s.elements.begin(), s.elements.end());
  for (const auto& e : s.elements) {
    if (e.size() > 2 && e.compare(e.size() - 2, 2, "_I") == 0) {
      const std::string p = e.substr(0, e.size() - 2);
      if (names.count(p + "_O")) c.parties.push_back(p);
    }
  }
  const std::size_t n = c.parties.size();
  c.rel.assign(n, std::vector<char>(n, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (s.precedes(c.parties[i] + "_O", c.parties[j] + "_I")) c.rel[i][j] = 1;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (c.rel[i][k])
        for (std::size_t j = 0; j < n; ++j)
          if (c.rel[k][j]) c.rel[i][j] = 1;
  for (std::size_t i = 0; i < n; ++i)
    if (c.rel[i][i]) c.is_spo = false;
  return c;
}

bool check_closed_lab(const SPO& s, const std::string& party) {
  const std::string xi = party + "_I", xo = party + "_O", ix = "I_" + party, ox = "O_" + party;
  for (const auto& n : {xi, xo, ix, ox}) s.index(n);
  for (const auto& y : s.elements) {
    const bool lhs1 = s.precedes(ix, y);
    const bool rhs1 = y == ox || y == xo || s.precedes(xo, y);
    if (lhs1 != rhs1) return false;
    const bool lhs2 = s.precedes(y, ox);
    const bool rhs2 = y == ix || y == xi || s.precedes(y, xi);
    if (lhs2 != rhs2) return false;
  }
  return true;
}

}  // namespace tds
