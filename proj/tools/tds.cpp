// Command-line entry point: demos, property suites and verification reports.
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "tds/bw_catalog.hpp"
#include "tds/classical.hpp"
#include "tds/io.hpp"
#include "tds/laws.hpp"
#include "tds/pipeline.hpp"

using namespace tds;
using io::json;

namespace {

struct Options {
  std::string format = "json";
  std::string report_path;
  std::uint64_t seed = 1;
  double tol = -1;  // < 0: TDS_TOL or the command default
};

double tolerance(const Options& o, double fallback) {
  if (o.tol >= 0) return o.tol;
  if (const char* env = std::getenv("TDS_TOL")) {
    try {
      return std::stod(env);
    } catch (const std::exception&) {
      throw Error(std::string("TDS_TOL is not a number: '") + env + "'");
    }
  }
  return fallback;
}

std::string error_type(const std::exception& e) {
  if (dynamic_cast<const NotAProcess*>(&e)) return "NotAProcess";
  if (dynamic_cast<const NotAComb*>(&e)) return "NotAComb";
  if (dynamic_cast<const ReconstructionFailed*>(&e)) return "ReconstructionFailed";
  if (dynamic_cast<const NotClassical*>(&e)) return "NotClassical";
  if (dynamic_cast<const LabelError*>(&e)) return "LabelError";
  if (dynamic_cast<const DimensionError*>(&e)) return "DimensionError";
  if (dynamic_cast<const CircuitError*>(&e)) return "CircuitError";
  if (dynamic_cast<const ShapeError*>(&e)) return "ShapeError";
  if (dynamic_cast<const json::exception*>(&e)) return "ParseError";
  return "Error";
}

void render_table(std::ostream& os, const json& j, const std::string& prefix) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) render_table(os, v, prefix.empty() ? k : prefix + "." + k);
  } else if (j.is_array() && !j.empty() && j.front().is_object()) {
    os << prefix << ":\n";
    std::vector<std::string> cols;
    for (const auto& [k, v] : j.front().items()) cols.push_back(k);
    os << " ";
    for (const auto& c : cols) os << ' ' << std::setw(22) << std::left << c;
    os << '\n';
    for (const auto& row : j) {
      os << " ";
      for (const auto& c : cols) {
        const auto& cell = row.contains(c) ? row.at(c) : json();
        os << ' ' << std::setw(22) << std::left << (cell.is_string() ? cell.get<std::string>() : cell.dump());
      }
      os << '\n';
    }
  } else {
    os << std::setw(32) << std::left << prefix << ' ' << (j.is_string() ? j.get<std::string>() : j.dump()) << '\n';
  }
}

int emit(const Options& o, json report) {
  const bool passed = report.value("passed", false);
  if (!o.report_path.empty()) io::write_file(o.report_path, report.dump(2) + "\n");
  if (o.format == "table")
    render_table(std::cout, report, "");
  else
    std::cout << report.dump(2) << '\n';
  return passed ? 0 : 1;
}

json header(const Options& o, const std::string& command) {
  return {{"schema_version", io::kSchemaVersion}, {"command", command}, {"seed", o.seed}};
}

const std::vector<std::string> kABC{"A", "B", "C"};

// ---- demo bw -------------------------------------------------------------------

json demo_bw(const Options& o, const std::string& csv_path) {
  json r = header(o, "demo bw");
  const bw::DemoReport d = bw::bw_inequality_demo();
  const CausalCertificate cert = is_causal(d.born);
  const bool cert_ok = check_certificate(d.born, cert);
  const bool delta = d.born == bw_correlation();
  if (!csv_path.empty()) io::write_file(csv_path, io::correlation_csv(d.born, kABC));

  r["I1"] = io::rational(d.i1);
  r["I1_bound"] = "0";
  r["routes_agree"] = d.routes_agree;
  r["matches_delta_correlation"] = delta;
  r["causal"] = cert.feasible;
  r["certificate_valid"] = cert_ok;
  if (cert.witness) r["witness_value"] = io::rational(eval_inequality(d.born, *cert.witness));
  r["correlation"] = io::to_json(d.born, kABC);
  json checks = json::array();
  auto check = [&](const std::string& name, bool ok) { checks.push_back({{"check", name}, {"passed", ok}}); };
  check("I1 == -1", d.i1 == -1);
  check("routes agree", d.routes_agree);
  check("delta correlation", delta);
  check("not causal", !cert.feasible);
  check("certificate verified", cert_ok);
  r["checks"] = checks;
  bool all = true;
  for (const auto& c : checks) all = all && c["passed"].get<bool>();
  r["passed"] = all;
  return r;
}

// ---- laws ------------------------------------------------------------------------

json laws(const Options& o, int trials) {
  const double tol = tolerance(o, kDefaultTol);
  json r = header(o, "laws");
  r["tol"] = tol;
  r["trials"] = trials;
  json laws = json::array();
  int failures = 0;
  for (const auto& l : run_link_laws(o.seed, trials, tol)) {
    laws.push_back(io::to_json(l));
    failures += l.failures;
  }
  r["laws"] = laws;
  r["failures"] = failures;
  r["passed"] = failures == 0;
  return r;
}

// ---- verify-tdl ----------------------------------------------------------------------

json verify_tdl(const Options& o, const std::string& mode, const std::string& process_path,
                const std::string& locals_path, int samples) {
  const double tol = tolerance(o, 1e-9);
  json r = header(o, "verify-tdl");
  r["mode"] = mode;
  r["tol"] = tol;
  std::string stage = "load";
  try {
    ProcessVector u = !process_path.empty()          ? io::process_from_json(io::read_file(process_path))
                      : mode == "tripartite" ? catalog::make_U_BW()
                                             : catalog::make_switch();
    stage = "process_unitarity";
    const double ures = unitarity_residual(u);
    if (!(ures <= tol)) {
      std::ostringstream msg;
      msg << "process tensor is not unitary (residual " << ures << ")";
      throw NotAProcess(msg.str());
    }
    stage = "load";
    std::vector<std::map<std::string, UnitaryBlock>> local_sets;
    if (!locals_path.empty()) {
      local_sets.push_back(io::locals_from_json(io::read_file(locals_path)));
    } else {
      Rng rng(o.seed);
      for (int s = 0; s < samples; ++s) {
        std::map<std::string, UnitaryBlock> l;
        for (const auto& p : u.parties()) l.emplace(p.name, random_local(rng, p.name, p.in.dim, 2));
        local_sets.push_back(std::move(l));
      }
    }
    const auto local = [](const std::map<std::string, UnitaryBlock>& l, const std::string& party) -> const UnitaryBlock& {
      const auto it = l.find(party);
      if (it == l.end()) throw LabelError("no local operation for party '" + party + "'");
      return it->second;
    };
    json runs = json::array();
    bool all = true;
    for (const auto& l : local_sets) {
      ChainReport rep;
      if (mode == "bipartite") {
        if (u.parties().size() != 2) throw ShapeError("bipartite mode needs a two-party process");
        rep = verify_bipartite_chain(u, local(l, u.parties()[0].name), local(l, u.parties()[1].name), tol, &stage);
      } else {
        // The circuit decomposition is only known for the BW process: C acts first.
        rep = verify_tripartite_chain(u, bw::decomposer(), local(l, "A"), local(l, "B"), local(l, "C"), tol, &stage);
      }
      all = all && rep.passed();
      runs.push_back(io::to_json(rep));
    }
    r["runs"] = runs;
    r["passed"] = all;
  } catch (const std::exception& e) {
    r["passed"] = false;
    r["error"] = {{"type", error_type(e)}, {"message", e.what()}, {"stage", stage}};
  }
  return r;
}

// ---- factor ------------------------------------------------------------------------

json factor(const Options& o, const std::string& process_path, const std::string& party_name,
            const std::string& out_path) {
  const double tol = tolerance(o, kDefaultTol);
  json r = header(o, "factor");
  r["party"] = party_name;
  r["tol"] = tol;
  try {
    const ProcessVector u = process_path.empty() ? catalog::make_U_BW() : io::process_from_json(io::read_file(process_path));
    const Factorization f = factor_no_influence(u, party_name, tol);
    const double res = reconstruction_residual(f, u.tensor());
    r["z_dim"] = f.z.dim;
    r["residual"] = res;
    r["passed"] = res <= tol;
    if (!out_path.empty()) io::write_file(out_path, io::to_json(f).dump(2) + "\n");
  } catch (const std::exception& e) {
    r["passed"] = false;
    r["error"] = {{"type", error_type(e)}, {"message", e.what()}};
  }
  return r;
}

// ---- simulate ----------------------------------------------------------------------

json simulate(const Options& o, const std::string& circuit_path, bool mixed, const std::string& out_path,
              const std::string& bw_settings) {
  json r = header(o, "simulate");
  try {
    if (!bw_settings.empty()) {
      if (bw_settings.size() != 3 || bw_settings.find_first_not_of("01") != std::string::npos)
        throw Error("--bw-settings needs three binary digits, e.g. 011");
      const std::vector<Index> i{bw_settings[0] - '0', bw_settings[1] - '0', bw_settings[2] - '0'};
      const Correlation c = bw::circuit_correlation(tolerance(o, 1e-12));
      json rows = json::array();
      for (Index k = 0; k < 8; ++k) {
        const std::vector<Index> out{(k >> 2) & 1, (k >> 1) & 1, k & 1};
        rows.push_back({{"o", out}, {"p", io::rational(c.at(out, i))}});
      }
      r["settings"] = i;
      r["outcomes"] = rows;
      r["passed"] = c.normalized();
      return r;
    }
    if (circuit_path.empty()) throw Error("simulate needs --circuit or --bw-settings");
    const TemporalCircuit c = io::circuit_from_json(io::read_file(circuit_path));
    r["inputs"] = io::to_json(c.external_inputs());
    r["outputs"] = io::to_json(c.external_outputs());
    r["discarded"] = io::to_json(c.discarded());
    if (mixed) {
      const LabeledOperator m = simulate_mixed(c);
      r["labels"] = io::to_json(m.labels());
      r["trace"] = m.matrix().trace().real();
      // written as its vectorisation: dual legs carry a trailing \x1f
      if (!out_path.empty()) io::write_file(out_path, io::to_json(vectorize(m)).dump() + "\n");
    } else {
      const LabeledTensor t = simulate_choi(c);
      r["labels"] = io::to_json(t.labels());
      r["norm_squared"] = t.amps().squaredNorm();
      if (!out_path.empty()) io::write_file(out_path, io::to_json(t).dump() + "\n");
    }
    r["passed"] = true;
  } catch (const std::exception& e) {
    r["passed"] = false;
    r["error"] = {{"type", error_type(e)}, {"message", e.what()}};
  }
  return r;
}

// ---- polytope ----------------------------------------------------------------------

json polytope_vertices(const Options& o, int n, const std::string& codes_path) {
  json r = header(o, "polytope vertices");
  r["parties"] = n;
  const auto codes = causal_vertex_codes(n);
  r["count"] = codes.size();
  bool ok = true;
  if (n == 3) {
    const CausalInequality i1 = make_I1();
    mpq_class lo = 0;
    bool first = true;
    for (auto code : codes) {
      const mpq_class v = eval_inequality(vertex_correlation(3, code), i1);
      if (first || v < lo) lo = v;
      first = false;
    }
    r["min_I1"] = io::rational(lo);
    ok = sgn(lo) >= 0;
  }
  if (!codes_path.empty()) {
    std::ostringstream os;
    for (auto c : codes) os << c << '\n';
    io::write_file(codes_path, os.str());
  }
  r["passed"] = ok;
  return r;
}

json polytope_check(const Options& o, const std::string& csv_path, const std::string& catalog_name) {
  json r = header(o, "polytope check");
  try {
    Correlation c;
    std::vector<std::string> parties = kABC;
    if (!csv_path.empty()) {
      std::ifstream in(csv_path);
      if (!in) throw Error("cannot open '" + csv_path + "'");
      std::stringstream ss;
      ss << in.rdbuf();
      c = io::correlation_from_csv(ss.str(), &parties);
    } else if (catalog_name == "bw") {
      c = bw_correlation();
    } else if (catalog_name == "uniform") {
      c = uniform_correlation(3);
    } else {
      throw Error("polytope check needs --csv or --catalog bw|uniform");
    }
    if (!c.normalized() || !c.nonnegative()) throw ShapeError("input is not a conditional probability table");
    const CausalCertificate cert = is_causal(c);
    r["causal"] = cert.feasible;
    r["pivots"] = cert.pivots;
    if (cert.feasible) {
      json w = json::array();
      for (const auto& [code, x] : cert.weights) w.push_back({{"vertex", code}, {"weight", io::rational(x)}});
      r["decomposition"] = w;
    } else if (cert.witness) {
      json coeffs = json::array();
      for (const auto& x : cert.witness->coeffs) coeffs.push_back(io::rational(x));
      r["witness"] = {{"coeffs", coeffs}, {"bound", io::rational(cert.witness->bound)},
                      {"value", io::rational(eval_inequality(c, *cert.witness))}};
    }
    r["certificate_valid"] = check_certificate(c, cert);
    r["passed"] = r["certificate_valid"];
  } catch (const std::exception& e) {
    r["passed"] = false;
    r["error"] = {{"type", error_type(e)}, {"message", e.what()}};
  }
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-delocalised subsystems: process matrices, cyclic circuits and causal inequalities"};
  app.require_subcommand(1);
  app.fallthrough();  // global options may follow the subcommand
  Options o;
  app.add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json", "table"}));
  app.add_option("--report", o.report_path, "Also write the JSON report to this file");
  app.add_option("--seed", o.seed, "Seed of the single random generator");
  app.add_option("--tol", o.tol, "Tolerance (default: $TDS_TOL, then the command default)");

  auto* demo = app.add_subcommand("demo", "Reproducible demonstrations");
  demo->require_subcommand(1);
  std::string csv_path;
  auto* demo_bw_cmd = demo->add_subcommand("bw", "BW correlation, I1 and causal-polytope membership");
  demo_bw_cmd->add_option("--csv", csv_path, "Write the correlation as CSV");

  int trials = 100;
  auto* laws_cmd = app.add_subcommand("laws", "Randomised link-product law suite");
  laws_cmd->add_option("--trials", trials, "Trials per law")->check(CLI::PositiveNumber);

  std::string mode = "tripartite", process_path, locals_path;
  int samples = 1;
  auto* tdl = app.add_subcommand("verify-tdl", "Factor, build, split, rewrite and reconstruct");
  tdl->add_option("--mode", mode, "bipartite or tripartite")->check(CLI::IsMember({"bipartite", "tripartite"}));
  tdl->add_option("--process", process_path, "Process JSON (default: U_BW / quantum switch)");
  tdl->add_option("--locals", locals_path, "Local operations JSON (default: random from --seed)");
  tdl->add_option("--samples", samples, "Random local sets when --locals is absent")->check(CLI::PositiveNumber);

  std::string party_name = "C", fact_out;
  std::string fprocess;
  auto* fac = app.add_subcommand("factor", "No-influence factorization through one party");
  fac->add_option("--process", fprocess, "Process JSON (default: U_BW)");
  fac->add_option("--party", party_name, "Party to factor through");
  fac->add_option("--out", fact_out, "Write the factorization JSON");

  std::string circuit_path, sim_out, bw_settings;
  bool mixed = false;
  auto* sim = app.add_subcommand("simulate", "Choi simulation of a circuit");
  sim->add_option("--circuit", circuit_path, "Circuit JSON");
  sim->add_flag("--mixed", mixed, "Trace out discarded wires");
  sim->add_option("--out", sim_out, "Write the Choi tensor JSON");
  sim->add_option("--bw-settings", bw_settings, "Run the BW circuit for settings i_A i_B i_C, e.g. 011");

  auto* poly = app.add_subcommand("polytope", "Causal polytope of binary scenarios");
  poly->require_subcommand(1);
  int parties = 3;
  std::string codes_path, check_csv, check_catalog;
  auto* verts = poly->add_subcommand("vertices", "Enumerate deterministic causal vertices");
  verts->add_option("--parties", parties, "Number of parties (1 to 3)")->check(CLI::Range(1, 3));
  verts->add_option("--codes-out", codes_path, "Write vertex codes, one per line");
  auto* chk = poly->add_subcommand("check", "Exact membership test with certificate");
  chk->add_option("--csv", check_csv, "Correlation CSV");
  chk->add_option("--catalog", check_catalog, "bw or uniform");

  CLI11_PARSE(app, argc, argv);

  try {
    if (demo_bw_cmd->parsed()) return emit(o, demo_bw(o, csv_path));
    if (laws_cmd->parsed()) return emit(o, laws(o, trials));
    if (tdl->parsed()) return emit(o, verify_tdl(o, mode, process_path, locals_path, samples));
    if (fac->parsed()) return emit(o, factor(o, fprocess, party_name, fact_out));
    if (sim->parsed()) return emit(o, simulate(o, circuit_path, mixed, sim_out, bw_settings));
    if (verts->parsed()) return emit(o, polytope_vertices(o, parties, codes_path));
    if (chk->parsed()) return emit(o, polytope_check(o, check_csv, check_catalog));
  } catch (const std::exception& e) {
    json r = header(o, "error");
    r["passed"] = false;
    r["error"] = {{"type", error_type(e)}, {"message", e.what()}};
    return emit(o, r);
  }
  return 1;
}
