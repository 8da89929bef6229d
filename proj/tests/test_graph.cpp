#include "doctest.h"

#include "causal/error.hpp"
#include "causal/graph.hpp"

using namespace causal;

TEST_CASE("topological order breaks ties by declaration index") {
  Dag dag({"C", "A", "B"}, {{"A", "B"}});
  CHECK(dag.topological_order() == std::vector<std::string>{"C", "A", "B"});

  Dag chain({"Z", "Y", "X"}, {{"X", "Y"}, {"Y", "Z"}});
  CHECK(chain.topological_order() == std::vector<std::string>{"X", "Y", "Z"});
  CHECK(chain.topological_position(chain.index_of("Z")) == 2);
}

TEST_CASE("construction rejects malformed graphs") {
  CHECK_THROWS_AS(Dag({"A", "A"}, {}), GraphError);
  CHECK_THROWS_AS(Dag({"A"}, {{"A", "A"}}), GraphError);
  CHECK_THROWS_AS(Dag({"A", "B"}, {{"A", "C"}}), GraphError);
  CHECK_THROWS_AS(Dag({"A", "B"}, {{"A", "B"}, {"A", "B"}}), GraphError);
  CHECK_THROWS_AS(Dag({"A", "B", "C"}, {{"A", "B"}, {"B", "C"}, {"C", "A"}}), GraphError);
  CHECK_THROWS_AS(Dag({""}, {}), GraphError);
}

TEST_CASE("parents, children and descendants") {
  Dag dag({"X", "Y", "Z", "W"}, {{"X", "Y"}, {"Y", "Z"}, {"X", "Z"}, {"W", "Z"}});
  CHECK(dag.parents("Z") == std::vector<std::string>{"X", "Y", "W"});
  CHECK(dag.children("X") == std::vector<std::string>{"Y", "Z"});
  CHECK(dag.descendants("X") == std::vector<std::string>{"Y", "Z"});
  CHECK(dag.descendants("Z").empty());
  CHECK(dag.edge_count() == 4);
  CHECK_THROWS_AS(dag.parents("Q"), UsageError);
}

TEST_CASE("edge removal and validation") {
  Dag dag({"X", "Y", "Z"}, {{"X", "Y"}, {"Y", "Z"}});
  const Dag cut = remove_edges(dag, {{"X", "Y"}});
  CHECK(cut.nodes() == dag.nodes());
  CHECK_FALSE(cut.has_edge("X", "Y"));
  CHECK(cut.has_edge("Y", "Z"));
  CHECK(remove_edges(dag, {}) == dag);
  CHECK_THROWS_AS(remove_edges(dag, {{"X", "Z"}}), InvalidEdgeError);
  CHECK_THROWS_AS(validate_edges(dag, {{"Y", "X"}}), InvalidEdgeError);
}

TEST_CASE("parent split and grouping") {
  Dag dag({"A", "B", "C", "D"}, {{"A", "D"}, {"B", "D"}, {"C", "D"}, {"A", "B"}});
  const auto split = split_parents(dag, "D", {{"C", "D"}, {"A", "D"}});
  CHECK(split.cut == std::vector<std::string>{"A", "C"});
  CHECK(split.kept == std::vector<std::string>{"B"});

  const auto groups = group_by_target({{"A", "D"}, {"A", "B"}, {"C", "D"}});
  REQUIRE(groups.size() == 2);
  CHECK(groups.at("D").size() == 2);
  CHECK(groups.at("B").size() == 1);

  CHECK(all_single_arrows(dag).size() == 4);
  CHECK(all_into(dag, "D").size() == 3);
  CHECK(all_into(dag, "A").empty());
}

TEST_CASE("edge list parsing") {
  const EdgeSet s = parse_edge_list(" X->Y, Z -> Y ;W->Y");
  CHECK(s.size() == 3);
  CHECK(s.contains("Z", "Y"));
  CHECK(parse_edge_list("").empty());
  CHECK(parse_edge_list("{}").empty());
  CHECK(parse_edge_list("none").empty());
  CHECK_THROWS_AS(parse_edge_list("XY"), UsageError);
  CHECK_THROWS_AS(parse_edge_list("->Y"), UsageError);
  CHECK(to_string(s) == "W->Y;X->Y;Z->Y");
  CHECK(to_string(EdgeSet{}) == "{}");
}

TEST_CASE("induced subgraph keeps declaration order") {
  Dag dag({"A", "B", "C"}, {{"A", "B"}, {"B", "C"}, {"A", "C"}});
  const Dag sub = dag.induced({"C", "A"});
  CHECK(sub.nodes() == std::vector<std::string>{"A", "C"});
  CHECK(sub.has_edge("A", "C"));
  CHECK(sub.edge_count() == 1);
}
