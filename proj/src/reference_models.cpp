#include "causal/reference_models.hpp"

#include <random>
#include <string>
#include <vector>

#include "causal/error.hpp"

namespace causal::reference {

namespace {

using Rows = std::vector<std::vector<double>>;

void require_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) throw UsageError(std::string(what) + " must lie in [0,1]");
}

Cpt root(const std::string& node, double p0) { return Cpt(node, 2, {}, {}, Rows{{p0, 1.0 - p0}}); }

Cpt copy_of(const std::string& node, const std::string& parent, double flip = 0.0) {
  return Cpt(node, 2, {parent}, {2}, Rows{{1.0 - flip, flip}, {flip, 1.0 - flip}});
}

Cpt xor_of(const std::string& node, const std::string& a, const std::string& b) {
  return Cpt(node, 2, {a, b}, {2, 2}, Rows{{1, 0}, {0, 1}, {0, 1}, {1, 0}});
}

std::map<std::string, std::size_t> binary(const std::vector<std::string>& nodes) {
  std::map<std::string, std::size_t> out;
  for (const auto& n : nodes) out[n] = 2;
  return out;
}

}  // namespace

DiscreteModel xor_confounded(double a) {
  require_probability(a, "a");
  const std::vector<std::string> nodes{"Z", "X", "Y"};
  Dag dag(nodes, {{"Z", "X"}, {"Z", "Y"}, {"X", "Y"}});
  return DiscreteModel(dag, binary(nodes), {root("Z", a), copy_of("X", "Z"), xor_of("Y", "X", "Z")});
}

DiscreteModel independent_xor() {
  const std::vector<std::string> nodes{"X", "Z", "Y"};
  Dag dag(nodes, {{"X", "Y"}, {"Z", "Y"}});
  return DiscreteModel(dag, binary(nodes), {root("X", 0.5), root("Z", 0.5), xor_of("Y", "X", "Z")});
}

DiscreteModel noisy_copy_xor(double q) {
  require_probability(q, "flip probability");
  const std::vector<std::string> nodes{"Z", "X", "Y"};
  Dag dag(nodes, {{"Z", "X"}, {"Z", "Y"}, {"X", "Y"}});
  return DiscreteModel(dag, binary(nodes),
                       {root("Z", 0.5), copy_of("X", "Z", q), xor_of("Y", "X", "Z")});
}

DiscreteModel repetition_code(std::size_t k) {
  const std::size_t m = 2 * k + 1;
  std::vector<std::string> nodes{"E"};
  std::vector<Edge> edges;
  std::vector<Cpt> cpts{root("E", 0.5)};
  std::vector<std::string> bits;
  for (std::size_t j = 1; j <= m; ++j) {
    bits.push_back("B" + std::to_string(j));
    nodes.push_back(bits.back());
    edges.push_back({"E", bits.back()});
    cpts.push_back(copy_of(bits.back(), "E"));
  }
  nodes.push_back("D");
  Rows rows;
  for (std::size_t cfg = 0; cfg < (std::size_t{1} << m); ++cfg) {
    const auto ones = static_cast<std::size_t>(__builtin_popcountll(cfg));
    rows.push_back(ones > k ? std::vector<double>{0, 1} : std::vector<double>{1, 0});
  }
  for (const auto& b : bits) edges.push_back({b, "D"});
  cpts.emplace_back("D", 2, bits, std::vector<std::size_t>(m, 2), rows);
  return DiscreteModel(Dag(nodes, edges), binary(nodes), std::move(cpts));
}

DiscreteModel broadcast(std::size_t n) {
  std::vector<std::string> nodes{"X"};
  std::vector<Edge> edges;
  std::vector<Cpt> cpts{root("X", 0.5)};
  for (std::size_t j = 1; j <= n; ++j) {
    nodes.push_back("Y" + std::to_string(j));
    edges.push_back({"X", nodes.back()});
    cpts.push_back(copy_of(nodes.back(), "X"));
  }
  return DiscreteModel(Dag(nodes, edges), binary(nodes), std::move(cpts));
}

DiscreteModel copy_pair() { return binary_channel(0.5, 0.0); }

DiscreteModel not_pair() { return binary_channel(0.5, 1.0); }

DiscreteModel binary_channel(double px, double flip) {
  require_probability(px, "P(X=1)");
  require_probability(flip, "flip probability");
  const std::vector<std::string> nodes{"X", "Y"};
  return DiscreteModel(Dag(nodes, {{"X", "Y"}}), binary(nodes), {root("X", 1.0 - px), copy_of("Y", "X", flip)});
}

ChainDefinition perturbed_copy_chain(double eps, std::size_t steps) {
  require_probability(eps, "eps");
  ChainDefinition def;
  def.steps = steps;
  // Rows indexed by (x_prev, y_prev), y fastest.
  const std::vector<double> keep0{1.0 - eps, eps};
  const std::vector<double> keep1{eps, 1.0 - eps};
  def.x_transition = {keep0, keep1, keep0, keep1};  // follows y_prev
  def.y_transition = {keep0, keep0, keep1, keep1};  // follows x_prev
  def.initial = {{0.25, 0.25}, {0.25, 0.25}};
  return def;
}

LinearSem random_complete_sem(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<std::string> nodes;
  std::map<std::string, double> noise;
  for (std::size_t j = 1; j <= n; ++j) {
    nodes.push_back("X" + std::to_string(j));
    noise[nodes.back()] = 1.0;
  }
  std::vector<Edge> edges;
  std::map<Edge, double> coef;
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < j; ++i) {
      edges.push_back({nodes[i], nodes[j]});
      coef[edges.back()] = normal(rng);
    }
  }
  return LinearSem(Dag(nodes, edges), coef, noise);
}

}  // namespace causal::reference
