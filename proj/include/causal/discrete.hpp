#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "causal/graph.hpp"
#include "causal/units.hpp"

namespace causal {

/// Conditional probability table P(node | parents).
///
/// Rows are parent configurations in mixed-radix order over `parents()`
/// with the last parent varying fastest; each row holds one probability per
/// node state. Every configuration has a row, including ones that never
/// occur under the observational distribution.
class Cpt {
 public:
  Cpt() = default;
  /// Throws UsageError if a row has the wrong width, an entry outside [0,1],
  /// or a row sum off by more than 1e-12; or if the row count does not match
  /// the parent cardinalities.
  Cpt(std::string node, std::size_t cardinality, std::vector<std::string> parents,
      std::vector<std::size_t> parent_cardinalities, const std::vector<std::vector<double>>& rows);

  const std::string& node() const { return node_; }
  std::size_t cardinality() const { return cardinality_; }
  const std::vector<std::string>& parents() const { return parents_; }
  const std::vector<std::size_t>& parent_cardinalities() const { return parent_cards_; }
  std::size_t row_count() const { return rows_; }

  std::span<const double> row(std::size_t config) const {
    return {table_.data() + config * cardinality_, cardinality_};
  }
  double probability(std::size_t state, std::size_t config) const {
    return table_[config * cardinality_ + state];
  }
  /// Mixed-radix index of a parent assignment (ordered like `parents()`).
  std::size_t config_index(std::span<const std::size_t> parent_states) const;

 private:
  std::string node_;
  std::size_t cardinality_ = 0;
  std::vector<std::string> parents_;
  std::vector<std::size_t> parent_cards_;
  std::size_t rows_ = 0;
  std::vector<double> table_;
};

/// A causal Bayesian network over categorical variables.
class DiscreteModel {
 public:
  DiscreteModel() = default;
  /// `cpts` may come in any order but must contain one table per node whose
  /// parent set equals the node's parents in `dag`.
  DiscreteModel(Dag dag, const std::map<std::string, std::size_t>& cardinalities,
                std::vector<Cpt> cpts);

  const Dag& dag() const { return dag_; }
  std::size_t cardinality(std::string_view node) const { return cards_[dag_.index_of(node)]; }
  const std::vector<std::size_t>& cardinalities() const { return cards_; }
  const Cpt& cpt(std::string_view node) const { return cpts_[dag_.index_of(node)]; }
  const std::vector<Cpt>& cpts() const { return cpts_; }

 private:
  Dag dag_;
  std::vector<std::size_t> cards_;  // by declaration index
  std::vector<Cpt> cpts_;           // by declaration index
};

/// Dense joint distribution; entries are laid out with the last variable
/// varying fastest.
class JointTable {
 public:
  JointTable() = default;
  /// Throws UsageError on shape mismatch, negative entries, or a total mass
  /// off by more than 1e-9.
  JointTable(std::vector<std::string> variables, std::vector<std::size_t> cardinalities,
             std::vector<double> probabilities);

  const std::vector<std::string>& variables() const { return vars_; }
  const std::vector<std::size_t>& cardinalities() const { return cards_; }
  const std::vector<double>& probabilities() const { return probs_; }
  std::size_t size() const { return probs_.size(); }

  std::size_t position(std::string_view variable) const;
  std::size_t flat_index(std::span<const std::size_t> states) const;
  double probability(std::span<const std::size_t> states) const { return probs_[flat_index(states)]; }

  /// Marginal over `keep`, with variables in the order given.
  JointTable marginal(const std::vector<std::string>& keep) const;

 private:
  std::vector<std::string> vars_;
  std::vector<std::size_t> cards_;
  std::vector<double> probs_;
};

/// How the open ends of cut arrows into one node are fed.
enum class Feeding {
  product,  ///< product of the single marginals of the cut parents
  joint,    ///< joint marginal of the cut parents (source exclusion)
};

/// Maximum number of joint states enumerated: `CS_STATE_CAP` if set to a
/// positive integer, otherwise 10^7.
std::size_t state_cap();

/// P(x_1..x_n) = prod_j P(x_j | pa_j), variables in topological order.
/// Throws ResourceError when the state space exceeds `cap`.
JointTable joint_from_model(const DiscreteModel& model, std::size_t cap = state_cap());

/// The model on G_S in which each target of `s` is fed through its cut
/// arrows by independent inputs distributed as the source marginals.
DiscreteModel cut_edges(const DiscreteModel& model, const EdgeSet& s,
                        Feeding feeding = Feeding::product);

/// Joint of the model obtained by ignoring the arrows in `s`: each target
/// keeps its observational conditional given the remaining parents. Rows for
/// remaining-parent configurations of probability zero fall back to product
/// feeding.
JointTable ignore_edges(const DiscreteModel& model, const EdgeSet& s);

/// Kullback-Leibler divergence D(p || q). Returns +inf when p is not
/// absolutely continuous with respect to q.
double kl(const JointTable& p, const JointTable& q, LogBase base = LogBase::bits);

/// Strength of the arrows in `s`: D(P || P_S), evaluated target by target.
double causal_strength(const DiscreteModel& model, const EdgeSet& s, LogBase base = LogBase::bits);

/// D(P || P~_S) where P~_S ignores rather than cuts the arrows.
double observed_influence(const DiscreteModel& model, const EdgeSet& s,
                          LogBase base = LogBase::bits);

/// sum_j sum_{pa_j kept} P(pa_j kept) D(P~_S(X_j | .) || P_S(X_j | .)), the
/// nonnegative gap between causal strength and observed influence.
double ignoring_gap(const DiscreteModel& model, const EdgeSet& s, LogBase base = LogBase::bits);

/// D(P || P_S) with joint feeding of the open ends (Ay-Krakauer source
/// exclusion). Coincides with causal_strength for single arrows.
double source_exclusion_flow(const DiscreteModel& model, const EdgeSet& s,
                             LogBase base = LogBase::bits);

using Selection = std::vector<std::string>;

double entropy(const JointTable& joint, const Selection& vars, LogBase base = LogBase::bits);
double conditional_entropy(const JointTable& joint, const Selection& vars, const Selection& given,
                           LogBase base = LogBase::bits);
double mutual_information(const JointTable& joint, const Selection& a, const Selection& b,
                          LogBase base = LogBase::bits);
/// I(A;B|C). Selections must be pairwise disjoint (UsageError otherwise).
double conditional_mutual_information(const JointTable& joint, const Selection& a,
                                      const Selection& b, const Selection& given,
                                      LogBase base = LogBase::bits);

/// Truncated factorization P(x | do(assignment)).
JointTable intervene(const DiscreteModel& model, const std::map<std::string, std::size_t>& assignment);

/// P(effect=1 | do(cause=1)) - P(effect=1 | do(cause=0)); both binary.
double ace(const DiscreteModel& model, std::string_view cause, std::string_view effect);

/// Ay-Polani information flow I(X_A -> X_B | do(X_C)); `c` may be empty.
double information_flow(const DiscreteModel& model, const Selection& a, const Selection& b,
                        const Selection& c, LogBase base = LogBase::bits);

/// A two-component chain unrolled over time steps 0..T. `x[t]` and `y[t]`
/// name the nodes of step t; every node of step t>0 has parents
/// {x[t-1], y[t-1]}.
struct BivariateChain {
  DiscreteModel model;
  std::vector<std::string> x;
  std::vector<std::string> y;
};

struct ChainDefinition {
  std::size_t x_cardinality = 2;
  std::size_t y_cardinality = 2;
  /// P(x_t | x_{t-1}, y_{t-1}); rows indexed by (x_prev, y_prev), y fastest.
  std::vector<std::vector<double>> x_transition;
  std::vector<std::vector<double>> y_transition;
  /// Joint P(x_0, y_0) as an x_cardinality by y_cardinality matrix.
  std::vector<std::vector<double>> initial;
  std::size_t steps = 3;  ///< T: the last time index
};

BivariateChain unroll_bivariate_chain(const ChainDefinition& def);

/// I(X_{T-h..T-1}; Y_T | Y_{T-h..T-1}) over the enumerated chain, h = horizon.
double transfer_entropy_exact(const BivariateChain& chain, std::size_t horizon,
                              LogBase base = LogBase::bits);

}  // namespace causal
