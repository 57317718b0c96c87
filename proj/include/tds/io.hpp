// JSON and CSV formats used by the command-line tool.
//
// Complex arrays are {"re": [...], "im": [...]}; matrices nest rows. Labels
// are {"name": ..., "dim": ...}.
#pragma once

#include <map>
#include <string>

#include "json.hpp"

#include "tds/causality.hpp"
#include "tds/circuits.hpp"
#include "tds/delocalize.hpp"
#include "tds/laws.hpp"
#include "tds/pipeline.hpp"

namespace tds::io {

using nlohmann::json;

inline constexpr int kSchemaVersion = 1;

json to_json(const LabelList& ls);
LabelList labels_from_json(const json& j);

json to_json(const LabeledTensor& t);
LabeledTensor tensor_from_json(const json& j);

json to_json(const UnitaryBlock& u);
UnitaryBlock unitary_from_json(const json& j);

// {"catalog": "U_BW" | "switch"} or an explicit tensor with parties, past and
// future.
json to_json(const ProcessVector& u);
ProcessVector process_from_json(const json& j);

std::map<std::string, UnitaryBlock> locals_from_json(const json& j);

// {"gates": [{"name", "type": unitary|prepare|project|trace|controlled, ...}]}
json to_json(const TemporalCircuit& c);
TemporalCircuit circuit_from_json(const json& j);

json to_json(const Factorization& f);
json to_json(const ChainReport& r);
json to_json(const LawResult& r);

// Canonical "n" or "n/d".
std::string rational(const mpq_class& q);
// Header i_A,i_B,…,o_A,o_B,…,p with exact num/den probabilities.
std::string correlation_csv(const Correlation& c, const std::vector<std::string>& parties);
json to_json(const Correlation& c, const std::vector<std::string>& parties);
// Parses the CSV above; settings and outcomes are binary, rows may be missing
// (zero). Returns the parties named in the header.
Correlation correlation_from_csv(const std::string& text, std::vector<std::string>* parties = nullptr);

json read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

}  // namespace tds::io
