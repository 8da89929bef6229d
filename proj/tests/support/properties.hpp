#pragma once

// Randomized structural identities of the discrete engine. Shared by the
// unit tests and the acceptance runner.

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "causal/discrete.hpp"
#include "causal/reference_models.hpp"
#include "support/oracles.hpp"

namespace props {

using namespace causal;

struct Report {
  std::size_t models = 0;
  std::size_t checks = 0;
  double decomposition = 0.0;   // |C - (E + gap)| per target
  double single_arrow = 0.0;    // |C - (CMI + second term)| per arrow
  double cmi_bound = 0.0;       // max(0, CMI - C)
  double independent_gap = 0.0; // second term under independent parents
  double additivity = 0.0;      // |C(S) - sum_i C(S_i)|
  double monotonicity = 0.0;    // max(0, C(S1) - C(S2))
  double pythagoras = 0.0;
  double markov = 0.0;          // largest ordered-Markov CMI under P_S
  double negativity = 0.0;      // most negative measure seen

  double worst() const {
    return std::max({decomposition, single_arrow, cmi_bound, independent_gap, additivity, monotonicity,
                     pythagoras, markov, negativity});
  }
};

inline void track(double& slot, double v) { slot = std::max(slot, std::abs(v)); }

inline EdgeSet random_subset(std::mt19937_64& rng, const std::vector<Edge>& edges) {
  EdgeSet s;
  for (const auto& e : edges) {
    if (rng() % 2) s.insert(e);
  }
  if (s.empty() && !edges.empty()) s.insert(edges[rng() % edges.size()]);
  return s;
}

// Second term of the single-arrow decomposition, from brute-force sums:
// sum_z P(z) D[P(Y|z) || sum_x P(x) P(Y|x,z)], z = remaining parents.
inline double second_term_bits(const DiscreteModel& m, const Edge& e) {
  const auto jt = oracle::joint(m);
  const std::size_t yi = oracle::index_of(m, e.target);
  const auto& cpt = m.cpts()[yi];
  std::vector<std::string> z;
  std::vector<std::size_t> zc;
  for (std::size_t k = 0; k < cpt.parents().size(); ++k) {
    if (cpt.parents()[k] != e.source) {
      z.push_back(cpt.parents()[k]);
      zc.push_back(cpt.parent_cardinalities()[k]);
    }
  }
  const std::size_t xc = m.cardinality(e.source);
  double total = 0.0;
  for (const auto& zv : oracle::all_states(zc)) {
    const double pz = oracle::mass(m, jt, z, zv);
    if (pz <= 0.0) continue;
    for (std::size_t y = 0; y < cpt.cardinality(); ++y) {
      auto vars = z;
      vars.push_back(e.target);
      auto vals = zv;
      vals.push_back(y);
      const double p_yz = oracle::mass(m, jt, vars, vals) / pz;
      if (p_yz <= 0.0) continue;
      double ps = 0.0;
      for (std::size_t x = 0; x < xc; ++x) {
        std::vector<std::size_t> pa;
        std::size_t zi = 0;
        for (const auto& p : cpt.parents()) pa.push_back(p == e.source ? x : zv[zi++]);
        ps += oracle::mass(m, jt, {e.source}, {x}) * cpt.probability(y, cpt.config_index(pa));
      }
      total += pz * p_yz * std::log2(p_yz / ps);
    }
  }
  return total;
}

// Largest I(X_j; earlier non-parents | parents) of `joint` along the
// topological order of `dag`.
inline double ordered_markov_defect(const JointTable& joint, const Dag& dag) {
  double worst = 0.0;
  const auto& order = dag.topological_order();
  for (std::size_t j = 0; j < order.size(); ++j) {
    const auto pa = dag.parents(order[j]);
    Selection rest;
    for (std::size_t i = 0; i < j; ++i) {
      if (std::find(pa.begin(), pa.end(), order[i]) == pa.end()) rest.push_back(order[i]);
    }
    if (rest.empty()) continue;
    worst = std::max(worst, conditional_mutual_information(joint, {order[j]}, rest, pa));
  }
  return worst;
}

inline Report run(std::size_t models, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Report r;
  std::uniform_int_distribution<std::size_t> size_dist(3, 5);

  for (std::size_t rep = 0; rep < models; ++rep) {
    const auto m = oracle::random_model(rng, size_dist(rng), 3);
    const auto edges = m.dag().edges();
    if (edges.empty()) continue;
    ++r.models;
    const auto p = joint_from_model(m);

    // Decomposition into observed influence plus gap, target by target, and
    // additivity over targets.
    const EdgeSet s = random_subset(rng, edges);
    double sum = 0.0;
    for (const auto& [target, part] : group_by_target(s)) {
      const double c = causal_strength(m, part);
      const double ei = observed_influence(m, part);
      const double gap = ignoring_gap(m, part);
      track(r.decomposition, c - (ei + gap));
      r.negativity = std::max({r.negativity, -c, -ei, -gap});
      sum += c;
      r.checks += 3;
    }
    track(r.additivity, causal_strength(m, s) - sum);
    track(r.decomposition, causal_strength(m, s) - (observed_influence(m, s) + ignoring_gap(m, s)));

    // Single-arrow decomposition and the conditional-MI lower bound.
    for (const auto& e : edges) {
      auto rest = m.dag().parents(e.target);
      rest.erase(std::find(rest.begin(), rest.end(), e.source));
      const double c = causal_strength(m, {e});
      const double cmi = conditional_mutual_information(p, {e.source}, {e.target}, rest);
      const double second = second_term_bits(m, e);
      track(r.single_arrow, c - (cmi + second));
      r.cmi_bound = std::max(r.cmi_bound, cmi - c);
      r.negativity = std::max(r.negativity, -second);
      r.checks += 2;
    }

    // Markovianity of the cut distribution with respect to the cut graph.
    const DiscreteModel cut = cut_edges(m, s);
    r.markov = std::max(r.markov, ordered_markov_defect(joint_from_model(cut), cut.dag()));
    ++r.checks;

    // Models whose sink has independent cut sources.
    const std::size_t independent = 1 + rng() % 3;
    const std::size_t dependent = rng() % 2;
    const auto sink = oracle::random_sink_model(rng, independent, dependent, 3);
    std::vector<Edge> from_roots;
    for (std::size_t i = 0; i < independent; ++i) from_roots.push_back({"R" + std::to_string(i), "Z"});
    if (dependent == 0) {
      for (const auto& e : from_roots) track(r.independent_gap, ignoring_gap(sink, {e}));
    }
    // S1: a prefix of the root arrows; S2 adds the rest of the arrows into Z.
    const std::size_t k1 = 1 + rng() % independent;
    const EdgeSet s1(from_roots.begin(), from_roots.begin() + static_cast<long>(k1));
    const EdgeSet s2 = all_into(sink.dag(), "Z");
    const double c1 = causal_strength(sink, s1);
    const double c2 = causal_strength(sink, s2);
    r.monotonicity = std::max(r.monotonicity, c1 - c2);
    const auto family = sink.dag().parents("Z");
    Selection fam = family;
    fam.push_back("Z");
    const auto pf = joint_from_model(sink).marginal(fam);
    const auto p1 = joint_from_model(cut_edges(sink, s1)).marginal(fam);
    const auto p2 = joint_from_model(cut_edges(sink, s2)).marginal(fam);
    track(r.pythagoras, kl(pf, p2) - (kl(pf, p1) + kl(p1, p2)));
    track(r.pythagoras, kl(pf, p2) - c2);
    track(r.pythagoras, kl(pf, p1) - c1);
    r.checks += 5;
  }
  return r;
}

}  // namespace props
