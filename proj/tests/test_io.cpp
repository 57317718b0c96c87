#include "doctest.h"
#include "tds/bw_catalog.hpp"
#include "tds/io.hpp"
#include "tds/random.hpp"

using namespace tds;

TEST_CASE("tensor, unitary and label round trips") {
  Rng rng(71);
  const LabeledTensor t = random_tensor(rng, {{"a", 2}, {"b", 3}});
  CHECK(max_abs_diff(io::tensor_from_json(io::to_json(t)), t) == 0.0);
  const UnitaryBlock u = random_unitary_block(rng, {{"x", 3}}, {{"y", 3}});
  const UnitaryBlock back = io::unitary_from_json(io::to_json(u));
  CHECK(back.in_labels() == u.in_labels());
  CHECK(back.out_labels() == u.out_labels());
  CHECK((back.matrix() - u.matrix()).norm() == 0.0);
  // Through text as well.
  const io::json j = io::json::parse(io::to_json(u).dump());
  CHECK((io::unitary_from_json(j).matrix() - u.matrix()).norm() == 0.0);
}

TEST_CASE("process round trips and catalog references") {
  const ProcessVector sw = catalog::make_switch();
  const ProcessVector back = io::process_from_json(io::to_json(sw));
  CHECK(max_abs_diff(back.tensor(), sw.tensor()) == 0.0);
  CHECK(back.parties().size() == 2);
  CHECK(back.past() == sw.past());
  const ProcessVector bw = io::process_from_json(io::json{{"catalog", "U_BW"}});
  CHECK(max_abs_diff(bw.tensor(), catalog::make_U_BW().tensor()) == 0.0);
  CHECK_THROWS_AS(io::process_from_json(io::json{{"catalog", "nope"}}), Error);
}

TEST_CASE("circuit round trip preserves the simulated Choi") {
  Rng rng(72);
  const TemporalCircuit c = bw::build_bw_circuit(random_local(rng, "A", 2, 2), random_local(rng, "B", 2, 2),
                                                 random_local(rng, "C", 2, 2));
  const TemporalCircuit back = io::circuit_from_json(io::json::parse(io::to_json(c).dump()));
  CHECK(back.gates().size() == c.gates().size());
  CHECK(max_abs_diff(simulate_choi(back), simulate_choi(c)) == 0.0);
  CHECK_THROWS_AS(io::circuit_from_json(io::json{{"gates", {{{"name", "g"}, {"type", "teleport"}}}}}), CircuitError);
}

TEST_CASE("malformed matrices are rejected") {
  io::json j{{"in", {{{"name", "a"}, {"dim", 2}}}}, {"out", {{{"name", "b"}, {"dim", 2}}}},
             {"re", {{1, 0}, {0}}}, {"im", io::json::array()}};
  CHECK_THROWS_AS(io::unitary_from_json(j), ShapeError);
}

TEST_CASE("rationals print canonically") {
  CHECK(io::rational(mpq_class(-1)) == "-1");
  CHECK(io::rational(mpq_class(10, 16)) == "5/8");
  CHECK(io::rational(mpq_class(0)) == "0");
}

TEST_CASE("correlation CSV round trip is exact") {
  const std::vector<std::string> parties{"A", "B", "C"};
  for (const Correlation& c : {bw_correlation(), uniform_correlation(3)}) {
    const std::string csv = io::correlation_csv(c, parties);
    CHECK(csv.rfind("i_A,i_B,i_C,o_A,o_B,o_C,p", 0) == 0);
    std::vector<std::string> names;
    CHECK(io::correlation_from_csv(csv, &names) == c);
    CHECK(names == parties);
  }
  // Missing rows are zeros; probabilities are num/den.
  const Correlation one = io::correlation_from_csv("i_X,o_X,p\n0,1,1/1\n1,0,1/2\n1,1,1/2\n");
  CHECK(one.at({1}, {0}) == 1);
  CHECK(one.at({0}, {0}) == 0);
  CHECK(one.at({1}, {1}) == mpq_class(1, 2));
  CHECK_THROWS_AS(io::correlation_from_csv("i_X,o_Y,p\n"), ShapeError);
  CHECK_THROWS_AS(io::correlation_from_csv("i_X,o_X,p\n0,2,1\n"), ShapeError);
  CHECK_THROWS_AS(io::correlation_from_csv(""), ShapeError);
}

TEST_CASE("report JSON carries the stage residuals") {
  ChainReport r{"bipartite", {{"rewrite", 1e-12, 1e-9}, {"schmidt_split", 0.5, 1e-9}}};
  const io::json j = io::to_json(r);
  CHECK(j.at("mode") == "bipartite");
  CHECK(j.at("passed") == false);
  CHECK(j.at("stages").size() == 2);
}

// Writes the corrupted-process fixture used by the command-line tests.
TEST_CASE("corrupted process fixture") {
  Rng rng(73);
  const ProcessVector u = random_comb_process(rng, 2, 1);
  Eigen::VectorXcd amps = u.tensor().amps();
  amps(0) += 0.75;
  const ProcessVector bad(LabeledTensor(u.tensor().labels(), amps), u.parties(), u.past(), u.future());
  CHECK(unitarity_residual(bad) > 0.1);
  const std::string path = std::string(TDS_TEST_OUT_DIR) + "/corrupted_process.json";
  io::write_file(path, io::to_json(bad).dump());
  const ProcessVector read = io::process_from_json(io::read_file(path));
  CHECK(max_abs_diff(read.tensor(), bad.tensor()) == 0.0);
  CHECK_THROWS_AS(io::read_file(path + ".missing"), Error);
}
