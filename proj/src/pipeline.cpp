#include "tds/pipeline.hpp"

#include <algorithm>
#include <limits>

namespace tds {

bool ChainReport::passed() const {
  return std::all_of(stages.begin(), stages.end(), [](const Stage& s) { return s.passed(); });
}

const Stage& ChainReport::stage(const std::string& name) const {
  for (const auto& s : stages)
    if (s.name == name) return s;
  throw Error("no stage '" + name + "' in report");
}

UnitaryBlock random_local(Rng& rng, const std::string& party, Index d, Index d_anc) {
  return random_unitary_block(rng, {{in_name(party), d}, {anc_in_name(party), d_anc}},
                              {{out_name(party), d}, {anc_out_name(party), d_anc}});
}

ProcessVector random_comb_process(Rng& rng, Index d, Index mem) {
  const PartySpec A = party("A", d, d), B = party("B", d, d);
  const SystemLabel past{"P_O", d * mem}, future{"F_I", d * mem};
  const SystemLabel m1{"mem1", mem}, m2{"mem2", mem};
  auto t = link_chain<cd>({pure_choi(random_unitary_block(rng, {past}, {A.in, m1})),
                           pure_choi(random_unitary_block(rng, {A.out, m1}, {B.in, m2})),
                           pure_choi(random_unitary_block(rng, {B.out, m2}, {future}))});
  return ProcessVector(std::move(t), {A, B}, {past}, {future});
}

QcqcComponents random_qcqc_components(Rng& rng, Index lambda, Index rho, bool random_tildes) {
  QcqcComponents c = switch_components();
  const Index d = c.A.in.dim;
  c.lambda1 = c.lambda2 = lambda;
  c.rho1 = c.rho2 = rho;
  c.past = {{"P_O", d * (lambda + rho)}};
  c.future = {{"F_I", d * (lambda + rho)}};
  c.nu1_ab = random_unitary(rng, d * lambda);
  c.nu2_ab = random_unitary(rng, d * lambda);
  c.nu3_ab = random_unitary(rng, d * lambda);
  c.nu1_ba = random_unitary(rng, d * rho);
  c.nu2_ba = random_unitary(rng, d * rho);
  c.nu3_ba = random_unitary(rng, d * rho);
  if (random_tildes) {
    c.tnu1_ab = random_unitary(rng, d * rho);
    c.tnu2_ab = random_unitary(rng, d * rho);
    c.tnu3_ab = random_unitary(rng, d * rho);
    c.tnu1_ba = random_unitary(rng, d * lambda);
    c.tnu2_ba = random_unitary(rng, d * lambda);
    c.tnu3_ba = random_unitary(rng, d * lambda);
  }
  return c;
}

namespace {

const PartySpec& party_acted_on(const ProcessVector& u, const UnitaryBlock& local) {
  for (const auto& p : u.parties())
    if (find_label(local.in_labels(), p.in.name) >= 0) return p;
  throw LabelError("local operation does not act on any party of the process");
}

std::vector<std::string> others(const LabelList& ls, const std::string& skip) {
  std::vector<std::string> out;
  for (const auto& l : ls)
    if (l.name != skip) out.push_back(l.name);
  return out;
}

}  // namespace

ChainReport verify_bipartite_chain(const ProcessVector& u, const UnitaryBlock& u_A, const UnitaryBlock& u_B,
                                   double tol, std::string* progress) {
  std::string scratch;
  std::string& at = progress ? *progress : scratch;
  at = "setup";
  if (u.parties().size() != 2) throw ShapeError("bipartite chain: process must have two parties");
  const PartySpec& A = party_acted_on(u, u_A);
  const PartySpec& B = party_acted_on(u, u_B);
  ChainReport r;
  r.mode = "bipartite";
  auto add = [&](std::string name, double res) { r.stages.push_back({std::move(name), res, tol}); };

  add("process_unitarity", unitarity_residual(u));

  at = "comb_factorize";
  const LabeledTensor g = link(u.tensor(), pure_choi(u_B));
  std::vector<std::string> ins = names_of(u.past()), outs{A.in.name};
  for (const auto& n : others(u_B.in_labels(), B.in.name)) ins.push_back(n);
  ins.push_back(A.out.name);
  for (const auto& n : others(u_B.out_labels(), B.out.name)) outs.push_back(n);
  for (const auto& l : u.future()) outs.push_back(l.name);
  const CombFactorization cf = comb_factorize(g, ins, outs, A);

  at = "build";
  const TemporalCircuit circ = build_bipartite_comb(cf.omega1, cf.omega2, u_A);
  const TemporalCircuit red({circ.gate("omega1"), circ.gate("omega2")});
  const LabeledTensor red_choi = simulate_choi(red);
  add("comb_factorize", max_abs_diff(red_choi, g));

  at = "circuit_vs_global";
  const LabeledTensor expected = global_unitary(u, {{A.name, u_A}, {B.name, u_B}});
  add("circuit_vs_global", max_abs_diff(simulate_choi(circ), expected));

  at = "factor_no_influence";
  const Factorization f = factor_no_influence(u, B.name);
  add("factor_no_influence", reconstruction_residual(f, u.tensor()));
  const SubsystemDecomposition d = make_bipartite_decomposition(f);
  add("j_unitarity", std::max(unitarity_residual(d.j_in), unitarity_residual(d.j_out)));

  at = "rewrite";
  const LabeledTensor rw = rewrite_red_fragment(red_choi, d);
  add("rewrite", max_abs_diff(rw, tensor(pure_choi(u_B), identity_dket(f.z, f.zbar))));
  add("schmidt_split", is_product_across(rw, names_of(concat(u_B.in_labels(), u_B.out_labels())))
                           ? 0.0
                           : std::numeric_limits<double>::infinity());
  at = "done";
  return r;
}

ChainReport verify_tripartite_chain(const ProcessVector& u, const SwitchDecomposer& decomposer,
                                    const UnitaryBlock& u_A, const UnitaryBlock& u_B, const UnitaryBlock& u_C,
                                    double tol, std::string* progress) {
  std::string scratch;
  std::string& at = progress ? *progress : scratch;
  at = "setup";
  if (u.parties().size() != 3) throw ShapeError("tripartite chain: process must have three parties");
  const PartySpec& A = party_acted_on(u, u_A);
  const PartySpec& B = party_acted_on(u, u_B);
  const PartySpec& C = party_acted_on(u, u_C);
  ChainReport r;
  r.mode = "tripartite";
  auto add = [&](std::string name, double res) { r.stages.push_back({std::move(name), res, tol}); };

  add("process_unitarity", unitarity_residual(u));
  at = "factor_no_influence";
  const Factorization f = factor_no_influence(u, C.name);
  add("factor_no_influence", reconstruction_residual(f, u.tensor()));
  at = "decomposition";
  const SubsystemDecomposition d = make_tripartite_decomposition(f, A, B, u.past(), u.future());
  add("j_unitarity", std::max(unitarity_residual(d.j_in), unitarity_residual(d.j_out)));

  at = "build";
  const TemporalCircuit circ = tripartite_circuit(u, u_A, u_B, u_C, decomposer);
  const LabeledTensor full = simulate_choi(circ);
  add("circuit_vs_global", max_abs_diff(full, global_unitary(u, {{A.name, u_A}, {B.name, u_B}, {C.name, u_C}})));

  at = "fragment_split";
  const LabeledTensor red = simulate_choi(red_fragment(circ));
  add("fragment_split", max_abs_diff(link(red, simulate_choi(blue_fragment(circ))), full));

  at = "rewrite";
  double factor_res = 0;
  const LabeledTensor R = extract_R(rewrite_red_fragment(red, d), u_A, u_B, &factor_res);
  add("red_factorization", factor_res);
  at = "cyclic_reconstruction";
  add("cyclic_reconstruction", verify_cyclic_reconstruction(R, compute_R_prime(d), u, u_C));
  at = "done";
  return r;
}

}  // namespace tds
