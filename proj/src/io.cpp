#include "tds/io.hpp"

#include <fstream>
#include <sstream>

namespace tds::io {

namespace {

json vec_to_json(const Eigen::VectorXcd& v) {
  json re = json::array(), im = json::array();
  for (Index i = 0; i < v.size(); ++i) {
    re.push_back(v[i].real());
    im.push_back(v[i].imag());
  }
  return {{"re", re}, {"im", im}};
}

Eigen::VectorXcd vec_from_json(const json& j) {
  const auto& re = j.at("re");
  const json im = j.contains("im") ? j.at("im") : json::array();
  if (!im.empty() && im.size() != re.size()) throw ShapeError("json: re/im length mismatch");
  Eigen::VectorXcd v(static_cast<Index>(re.size()));
  for (std::size_t i = 0; i < re.size(); ++i)
    v[static_cast<Index>(i)] = cd(re[i].get<double>(), im.empty() ? 0.0 : im[i].get<double>());
  return v;
}

json mat_to_json(const Eigen::MatrixXcd& m) {
  json re = json::array(), im = json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    json rr = json::array(), ri = json::array();
    for (Index c = 0; c < m.cols(); ++c) {
      rr.push_back(m(r, c).real());
      ri.push_back(m(r, c).imag());
    }
    re.push_back(rr);
    im.push_back(ri);
  }
  return {{"re", re}, {"im", im}};
}

Eigen::MatrixXcd mat_from_json(const json& j) {
  const auto& re = j.at("re");
  const json im = j.contains("im") ? j.at("im") : json::array();
  const std::size_t rows = re.size(), cols = rows ? re[0].size() : 0;
  if (!im.empty() && im.size() != rows) throw ShapeError("json: re/im row count mismatch");
  Eigen::MatrixXcd m(static_cast<Index>(rows), static_cast<Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    if (re[r].size() != cols || (!im.empty() && im[r].size() != cols)) throw ShapeError("json: ragged matrix");
    for (std::size_t c = 0; c < cols; ++c)
      m(static_cast<Index>(r), static_cast<Index>(c)) = cd(re[r][c].get<double>(), im.empty() ? 0.0 : im[r][c].get<double>());
  }
  return m;
}

json party_to_json(const PartySpec& p) {
  json j{{"name", p.name}, {"in", to_json(LabelList{p.in})[0]}, {"out", to_json(LabelList{p.out})[0]}};
  if (p.anc_in) j["anc_in"] = to_json(LabelList{*p.anc_in})[0];
  if (p.anc_out) j["anc_out"] = to_json(LabelList{*p.anc_out})[0];
  return j;
}

SystemLabel label_from_json(const json& j) { return {j.at("name").get<std::string>(), j.at("dim").get<Index>()}; }

PartySpec party_from_json(const json& j) {
  PartySpec p;
  p.name = j.at("name").get<std::string>();
  p.in = label_from_json(j.at("in"));
  p.out = label_from_json(j.at("out"));
  if (j.contains("anc_in")) p.anc_in = label_from_json(j.at("anc_in"));
  if (j.contains("anc_out")) p.anc_out = label_from_json(j.at("anc_out"));
  return p;
}

}  // namespace

json to_json(const LabelList& ls) {
  json a = json::array();
  for (const auto& l : ls) a.push_back({{"name", l.name}, {"dim", l.dim}});
  return a;
}

LabelList labels_from_json(const json& j) {
  LabelList ls;
  for (const auto& e : j) ls.push_back(label_from_json(e));
  return ls;
}

json to_json(const LabeledTensor& t) {
  json j = vec_to_json(t.amps());
  j["labels"] = to_json(t.labels());
  return j;
}

LabeledTensor tensor_from_json(const json& j) { return LabeledTensor(labels_from_json(j.at("labels")), vec_from_json(j)); }

json to_json(const UnitaryBlock& u) {
  json j = mat_to_json(u.matrix());
  j["in"] = to_json(u.in_labels());
  j["out"] = to_json(u.out_labels());
  return j;
}

UnitaryBlock unitary_from_json(const json& j) {
  return UnitaryBlock(labels_from_json(j.at("in")), labels_from_json(j.at("out")), mat_from_json(j));
}

json to_json(const ProcessVector& u) {
  json parties = json::array();
  for (const auto& p : u.parties()) parties.push_back(party_to_json(p));
  return {{"parties", parties}, {"past", to_json(u.past())}, {"future", to_json(u.future())}, {"tensor", to_json(u.tensor())}};
}

ProcessVector process_from_json(const json& j) {
  if (j.contains("catalog")) {
    const auto name = j.at("catalog").get<std::string>();
    if (name == "U_BW") return catalog::make_U_BW();
    if (name == "switch") return catalog::make_switch();
    throw Error("unknown catalog process '" + name + "'");
  }
  std::vector<PartySpec> parties;
  for (const auto& p : j.at("parties")) parties.push_back(party_from_json(p));
  return ProcessVector(tensor_from_json(j.at("tensor")), std::move(parties), labels_from_json(j.at("past")),
                       labels_from_json(j.at("future")));
}

std::map<std::string, UnitaryBlock> locals_from_json(const json& j) {
  std::map<std::string, UnitaryBlock> out;
  for (const auto& [name, u] : j.items()) out.emplace(name, unitary_from_json(u));
  return out;
}

json to_json(const TemporalCircuit& c) {
  json gates = json::array();
  for (const auto& g : c.gates()) {
    json e{{"name", g.name}};
    std::visit(
        [&](const auto& op) {
          using T = std::decay_t<decltype(op)>;
          if constexpr (std::is_same_v<T, UnitaryGate>) {
            e["type"] = "unitary";
            e["u"] = to_json(op.u);
          } else if constexpr (std::is_same_v<T, ControlledPairGate>) {
            e["type"] = "controlled";
            e["u0"] = to_json(op.u0);
            e["u1"] = to_json(op.u1);
            e["control_in"] = to_json(LabelList{op.control_in})[0];
            e["control_out"] = to_json(LabelList{op.control_out})[0];
          } else if constexpr (std::is_same_v<T, PrepareGate>) {
            e["type"] = "prepare";
            e["wire"] = to_json(LabelList{op.wire})[0];
            e["state"] = vec_to_json(op.state);
          } else if constexpr (std::is_same_v<T, ProjectGate>) {
            e["type"] = "project";
            e["wire"] = to_json(LabelList{op.wire})[0];
            e["state"] = vec_to_json(op.state);
          } else {
            e["type"] = "trace";
            e["wire"] = to_json(LabelList{op.wire})[0];
          }
        },
        g.op);
    gates.push_back(e);
  }
  return {{"gates", gates}};
}

TemporalCircuit circuit_from_json(const json& j) {
  std::vector<Gate> gates;
  for (const auto& e : j.at("gates")) {
    const auto name = e.at("name").get<std::string>();
    const auto type = e.at("type").get<std::string>();
    if (type == "unitary")
      gates.push_back(unitary_gate(name, unitary_from_json(e.at("u"))));
    else if (type == "controlled")
      gates.push_back(controlled_gate(name, unitary_from_json(e.at("u0")), unitary_from_json(e.at("u1")),
                                      label_from_json(e.at("control_in")), label_from_json(e.at("control_out"))));
    else if (type == "prepare")
      gates.push_back(prepare_gate(name, label_from_json(e.at("wire")), vec_from_json(e.at("state"))));
    else if (type == "project")
      gates.push_back(project_gate(name, label_from_json(e.at("wire")), vec_from_json(e.at("state"))));
    else if (type == "trace")
      gates.push_back(trace_gate(name, label_from_json(e.at("wire"))));
    else
      throw CircuitError("unknown gate type '" + type + "'");
  }
  return TemporalCircuit(std::move(gates));
}

json to_json(const Factorization& f) {
  return {{"party", f.party},
          {"z", to_json(LabelList{f.z})[0]},
          {"zbar", to_json(LabelList{f.zbar})[0]},
          {"u1", to_json(f.u1)},
          {"u2", to_json(f.u2)}};
}

json to_json(const ChainReport& r) {
  json stages = json::array();
  for (const auto& s : r.stages)
    stages.push_back({{"stage", s.name}, {"residual", s.residual}, {"tol", s.tol}, {"passed", s.passed()}});
  return {{"mode", r.mode}, {"stages", stages}, {"passed", r.passed()}};
}

json to_json(const LawResult& r) {
  return {{"law", r.law}, {"trials", r.trials}, {"failures", r.failures}, {"max_residual", r.max_residual}};
}

std::string rational(const mpq_class& q) {
  mpq_class c = q;
  c.canonicalize();
  return c.get_str();
}

namespace {

std::string num_den(const mpq_class& q) {
  mpq_class c = q;
  c.canonicalize();
  return c.get_num().get_str() + "/" + c.get_den().get_str();
}

}  // namespace

std::string correlation_csv(const Correlation& c, const std::vector<std::string>& parties) {
  if (static_cast<int>(parties.size()) != c.parties()) throw ShapeError("csv: party names do not match correlation");
  std::ostringstream os;
  for (const auto& p : parties) os << "i_" << p << ',';
  for (const auto& p : parties) os << "o_" << p << ',';
  os << "p\n";
  const auto n = parties.size();
  for (Index s = 0; s < c.n_settings(); ++s)
    for (Index o = 0; o < c.n_outcomes(); ++o) {
      std::vector<Index> iv(n), ov(n);
      Index rs = s, ro = o;
      for (std::size_t k = n; k-- > 0;) {
        iv[k] = rs % c.settings[k];
        rs /= c.settings[k];
        ov[k] = ro % c.outcomes[k];
        ro /= c.outcomes[k];
      }
      for (auto x : iv) os << x << ',';
      for (auto x : ov) os << x << ',';
      os << num_den(c.p[static_cast<std::size_t>(s * c.n_outcomes() + o)]) << '\n';
    }
  return os.str();
}

json to_json(const Correlation& c, const std::vector<std::string>& parties) {
  json rows = json::array();
  const auto n = parties.size();
  for (Index s = 0; s < c.n_settings(); ++s)
    for (Index o = 0; o < c.n_outcomes(); ++o) {
      const auto& p = c.p[static_cast<std::size_t>(s * c.n_outcomes() + o)];
      if (sgn(p) == 0) continue;
      json i = json::array(), out = json::array();
      Index rs = s, ro = o;
      std::vector<Index> iv(n), ov(n);
      for (std::size_t k = n; k-- > 0;) {
        iv[k] = rs % c.settings[k];
        rs /= c.settings[k];
        ov[k] = ro % c.outcomes[k];
        ro /= c.outcomes[k];
      }
      for (auto x : iv) i.push_back(x);
      for (auto x : ov) out.push_back(x);
      rows.push_back({{"i", i}, {"o", out}, {"p", rational(p)}});
    }
  return {{"parties", parties}, {"nonzero", rows}};
}

Correlation correlation_from_csv(const std::string& text, std::vector<std::string>* parties) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw ShapeError("csv: empty input");
  auto split = [](const std::string& l) {
    std::vector<std::string> out;
    std::stringstream ss(l);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
      out.push_back(cell);
    }
    return out;
  };
  const auto head = split(line);
  if (head.size() < 3 || head.size() % 2 == 0 || head.back() != "p") throw ShapeError("csv: bad header");
  const std::size_t n = (head.size() - 1) / 2;
  std::vector<std::string> names;
  for (std::size_t k = 0; k < n; ++k) {
    if (head[k].rfind("i_", 0) != 0 || head[n + k] != "o_" + head[k].substr(2)) throw ShapeError("csv: bad header");
    names.push_back(head[k].substr(2));
  }
  Correlation c = Correlation::binary(static_cast<int>(n));
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \r") == std::string::npos) continue;
    const auto cells = split(line);
    if (cells.size() != head.size()) throw ShapeError("csv: row has wrong arity");
    std::vector<Index> i(n), o(n);
    for (std::size_t k = 0; k < n; ++k) {
      i[k] = std::stol(cells[k]);
      o[k] = std::stol(cells[n + k]);
      if (i[k] < 0 || i[k] > 1 || o[k] < 0 || o[k] > 1) throw ShapeError("csv: values must be binary");
    }
    mpq_class p(cells.back());
    p.canonicalize();
    c.at(o, i) = p;
  }
  if (parties) *parties = names;
  return c;
}

json read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  return json::parse(in);
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  out << text;
}

}  // namespace tds::io
