#include "causal/discrete.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <set>

#include "causal/error.hpp"

namespace causal {

namespace {

constexpr double kRowTolerance = 1e-12;
constexpr double kMassTolerance = 1e-9;
constexpr std::size_t kDefaultStateCap = 10'000'000;

std::vector<std::size_t> strides_for(const std::vector<std::size_t>& cards) {
  std::vector<std::size_t> strides(cards.size(), 1);
  for (std::size_t i = cards.size(); i-- > 1;) strides[i - 1] = strides[i] * cards[i];
  return strides;
}

std::size_t state_count(const std::vector<std::size_t>& cards, std::size_t cap) {
  std::size_t total = 1;
  for (std::size_t c : cards) {
    if (c == 0) return 0;
    if (total > cap / c) {
      throw ResourceError("joint state space exceeds the cap of " + std::to_string(cap) +
                          " entries (set CS_STATE_CAP to raise it)");
    }
    total *= c;
  }
  if (total > cap) throw ResourceError("joint state space exceeds the cap of " + std::to_string(cap));
  return total;
}

// Mixed-radix odometer, last digit fastest. Returns false after wrap-around.
bool advance(std::vector<std::size_t>& states, const std::vector<std::size_t>& cards) {
  for (std::size_t i = states.size(); i-- > 0;) {
    if (++states[i] < cards[i]) return true;
    states[i] = 0;
  }
  return false;
}

double log_ratio(double p, double q) { return std::log(p / q); }

// Which parents of `cpt` are cut, plus the kept/cut index lists into
// cpt.parents() (declaration order of the CPT preserved).
struct FamilySplit {
  std::vector<bool> is_cut;
  std::vector<std::size_t> kept;
  std::vector<std::size_t> cut;
  std::vector<std::size_t> kept_cards;
  std::vector<std::size_t> cut_cards;

  std::size_t kept_configs() const {
    return std::accumulate(kept_cards.begin(), kept_cards.end(), std::size_t{1},
                           std::multiplies<>());
  }
  std::size_t cut_configs() const {
    return std::accumulate(cut_cards.begin(), cut_cards.end(), std::size_t{1}, std::multiplies<>());
  }
};

FamilySplit split_family(const Cpt& cpt, const EdgeSet& s) {
  FamilySplit out;
  const auto& parents = cpt.parents();
  for (std::size_t i = 0; i < parents.size(); ++i) {
    const bool cut = s.contains(parents[i], cpt.node());
    out.is_cut.push_back(cut);
    (cut ? out.cut : out.kept).push_back(i);
    (cut ? out.cut_cards : out.kept_cards).push_back(cpt.parent_cardinalities()[i]);
  }
  return out;
}

std::vector<std::string> names_at(const Cpt& cpt, const std::vector<std::size_t>& idx) {
  std::vector<std::string> out;
  for (std::size_t i : idx) out.push_back(cpt.parents()[i]);
  return out;
}

// Calls fn(full_config, kept_config, cut_config) for every parent
// configuration of `cpt`, in row order.
template <class Fn>
void for_each_parent_config(const Cpt& cpt, const FamilySplit& split, Fn&& fn) {
  const auto& cards = cpt.parent_cardinalities();
  const auto kept_strides = strides_for(split.kept_cards);
  const auto cut_strides = strides_for(split.cut_cards);
  std::vector<std::size_t> states(cards.size(), 0);
  for (std::size_t full = 0; full < cpt.row_count(); ++full) {
    std::size_t kept = 0;
    std::size_t cut = 0;
    for (std::size_t i = 0; i < split.kept.size(); ++i) kept += states[split.kept[i]] * kept_strides[i];
    for (std::size_t i = 0; i < split.cut.size(); ++i) cut += states[split.cut[i]] * cut_strides[i];
    fn(full, kept, cut);
    advance(states, cards);
  }
}

// Weights w[kept * U + cut] for the product of single marginals of the cut
// parents (independent of the kept configuration).
std::vector<double> product_weights(const JointTable& joint, const Cpt& cpt, const FamilySplit& split) {
  const std::size_t kept_n = split.kept_configs();
  const std::size_t cut_n = split.cut_configs();
  std::vector<std::vector<double>> marginals;
  for (std::size_t i : split.cut) {
    marginals.push_back(joint.marginal({cpt.parents()[i]}).probabilities());
  }
  std::vector<double> row(cut_n, 1.0);
  std::vector<std::size_t> states(split.cut.size(), 0);
  for (std::size_t u = 0; u < cut_n; ++u) {
    for (std::size_t i = 0; i < states.size(); ++i) row[u] *= marginals[i][states[i]];
    advance(states, split.cut_cards);
  }
  std::vector<double> w;
  w.reserve(kept_n * cut_n);
  for (std::size_t k = 0; k < kept_n; ++k) w.insert(w.end(), row.begin(), row.end());
  return w;
}

std::vector<double> joint_weights(const JointTable& joint, const Cpt& cpt, const FamilySplit& split) {
  const auto row = joint.marginal(names_at(cpt, split.cut)).probabilities();
  std::vector<double> w;
  for (std::size_t k = 0; k < split.kept_configs(); ++k) w.insert(w.end(), row.begin(), row.end());
  return w;
}

// P(pa_cut | pa_kept) from the observational joint; rows with P(pa_kept)=0
// use product feeding.
std::vector<double> ignoring_weights(const JointTable& joint, const Cpt& cpt, const FamilySplit& split) {
  auto order = names_at(cpt, split.kept);
  const auto cut_names = names_at(cpt, split.cut);
  order.insert(order.end(), cut_names.begin(), cut_names.end());
  const auto fam = joint.marginal(order).probabilities();
  const auto fallback = product_weights(joint, cpt, split);
  const std::size_t cut_n = split.cut_configs();
  std::vector<double> w(fam.size());
  for (std::size_t k = 0; k < split.kept_configs(); ++k) {
    double total = 0.0;
    for (std::size_t u = 0; u < cut_n; ++u) total += fam[k * cut_n + u];
    for (std::size_t u = 0; u < cut_n; ++u) {
      w[k * cut_n + u] = total > 0.0 ? fam[k * cut_n + u] / total : fallback[k * cut_n + u];
    }
  }
  return w;
}

// sum_u w[k,u] P(x | kept=k, cut=u): a CPT over the kept parents.
Cpt reduce_cpt(const Cpt& cpt, const FamilySplit& split, std::vector<double> weights) {
  const std::size_t kept_n = split.kept_configs();
  const std::size_t cut_n = split.cut_configs();
  for (std::size_t k = 0; k < kept_n; ++k) {
    double total = 0.0;
    for (std::size_t u = 0; u < cut_n; ++u) total += weights[k * cut_n + u];
    if (!(total > 0.0)) throw NumericError("feeding distribution for '" + cpt.node() + "' has no mass");
    for (std::size_t u = 0; u < cut_n; ++u) weights[k * cut_n + u] /= total;
  }
  const std::size_t card = cpt.cardinality();
  std::vector<std::vector<double>> rows(kept_n, std::vector<double>(card, 0.0));
  for_each_parent_config(cpt, split, [&](std::size_t full, std::size_t kept, std::size_t cut) {
    const double w = weights[kept * cut_n + cut];
    if (w == 0.0) return;
    for (std::size_t x = 0; x < card; ++x) rows[kept][x] += w * cpt.probability(x, full);
  });
  for (auto& r : rows) {
    const double total = std::accumulate(r.begin(), r.end(), 0.0);
    for (double& v : r) v /= total;
  }
  return Cpt(cpt.node(), card, names_at(cpt, split.kept), split.kept_cards, rows);
}

// E_{P(pa, x)} log P(x | pa) / Q(x | pa_kept): one local relative entropy.
double local_divergence_nats(const JointTable& joint, const Cpt& cpt, const FamilySplit& split,
                             const Cpt& reduced) {
  auto order = cpt.parents();
  order.push_back(cpt.node());
  const auto fam = joint.marginal(order).probabilities();
  const std::size_t card = cpt.cardinality();
  double total = 0.0;
  bool infinite = false;
  for_each_parent_config(cpt, split, [&](std::size_t full, std::size_t kept, std::size_t) {
    for (std::size_t x = 0; x < card; ++x) {
      const double p = fam[full * card + x];
      if (p <= 0.0) continue;
      const double q = reduced.probability(x, kept);
      if (q <= 0.0) {
        infinite = true;
        return;
      }
      total += p * log_ratio(cpt.probability(x, full), q);
    }
  });
  return infinite ? kInfinity : std::max(total, 0.0);
}

double shannon_nats(const std::vector<double>& probs) {
  double h = 0.0;
  for (double p : probs) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

void require_disjoint(const JointTable& joint, std::initializer_list<const Selection*> sels) {
  std::set<std::string> seen;
  for (const Selection* sel : sels) {
    for (const auto& v : *sel) {
      joint.position(v);
      if (!seen.insert(v).second) {
        throw UsageError("variable '" + v + "' appears in more than one selection");
      }
    }
  }
}

Selection concat(const Selection& a, const Selection& b) {
  Selection out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

std::map<std::string, std::size_t> cardinality_map(const DiscreteModel& model) {
  std::map<std::string, std::size_t> out;
  const auto& nodes = model.dag().nodes();
  for (std::size_t i = 0; i < nodes.size(); ++i) out[nodes[i]] = model.cardinalities()[i];
  return out;
}

// Enumerates the product-form distribution of `model`'s CPTs, replacing the
// factor of each assigned node by a Kronecker delta.
JointTable enumerate(const DiscreteModel& model, const std::map<std::string, std::size_t>& assignment,
                     std::size_t cap) {
  const Dag& dag = model.dag();
  const auto& order = dag.topological_order();
  const std::size_t n = order.size();
  std::vector<std::size_t> cards(n);
  std::vector<const Cpt*> cpts(n);
  std::vector<std::vector<std::size_t>> parent_pos(n);
  std::vector<std::vector<std::size_t>> parent_strides(n);
  std::vector<long> fixed(n, -1);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t idx = dag.index_of(order[j]);
    cards[j] = model.cardinalities()[idx];
    cpts[j] = &model.cpts()[idx];
    for (const auto& p : cpts[j]->parents()) parent_pos[j].push_back(dag.topological_position(dag.index_of(p)));
    parent_strides[j] = strides_for(cpts[j]->parent_cardinalities());
    if (auto it = assignment.find(order[j]); it != assignment.end()) {
      if (it->second >= cards[j]) {
        throw UsageError("state " + std::to_string(it->second) + " out of range for '" + order[j] + "'");
      }
      fixed[j] = static_cast<long>(it->second);
    }
  }
  for (const auto& [name, state] : assignment) {
    if (!dag.contains(name)) throw UsageError("unknown node '" + name + "' in intervention");
  }
  const std::size_t total = state_count(cards, cap);
  std::vector<double> probs(total, 0.0);
  std::vector<std::size_t> states(n, 0);
  for (std::size_t flat = 0; flat < total; ++flat) {
    double p = 1.0;
    for (std::size_t j = 0; j < n && p != 0.0; ++j) {
      if (fixed[j] >= 0) {
        if (states[j] != static_cast<std::size_t>(fixed[j])) p = 0.0;
        continue;
      }
      std::size_t cfg = 0;
      for (std::size_t k = 0; k < parent_pos[j].size(); ++k) cfg += states[parent_pos[j][k]] * parent_strides[j][k];
      p *= cpts[j]->probability(states[j], cfg);
    }
    probs[flat] = p;
    advance(states, cards);
  }
  return JointTable(order, cards, std::move(probs));
}

// Rebuilds `model` with each target of `s` reduced by `weights_for`.
template <class WeightFn>
DiscreteModel reduce_targets(const DiscreteModel& model, const EdgeSet& s, WeightFn&& weights_for) {
  validate_edges(model.dag(), s);
  if (s.empty()) return model;
  const JointTable joint = joint_from_model(model);
  const auto targets = s.targets();
  std::vector<Cpt> cpts;
  for (const auto& cpt : model.cpts()) {
    if (std::find(targets.begin(), targets.end(), cpt.node()) == targets.end()) {
      cpts.push_back(cpt);
      continue;
    }
    const auto split = split_family(cpt, s);
    cpts.push_back(reduce_cpt(cpt, split, weights_for(joint, cpt, split)));
  }
  return DiscreteModel(remove_edges(model.dag(), s), cardinality_map(model), std::move(cpts));
}

double strength_with_feeding(const DiscreteModel& model, const EdgeSet& s, Feeding feeding,
                             LogBase base) {
  validate_edges(model.dag(), s);
  if (s.empty()) return 0.0;
  const JointTable joint = joint_from_model(model);
  double total = 0.0;
  for (const auto& target : s.targets()) {
    const Cpt& cpt = model.cpt(target);
    const auto split = split_family(cpt, s);
    auto w = feeding == Feeding::product ? product_weights(joint, cpt, split)
                                         : joint_weights(joint, cpt, split);
    const Cpt reduced = reduce_cpt(cpt, split, std::move(w));
    total += local_divergence_nats(joint, cpt, split, reduced);
  }
  return from_nats(total, base);
}

}  // namespace

// ---------------------------------------------------------------------------

Cpt::Cpt(std::string node, std::size_t cardinality, std::vector<std::string> parents,
         std::vector<std::size_t> parent_cardinalities, const std::vector<std::vector<double>>& rows)
    : node_(std::move(node)),
      cardinality_(cardinality),
      parents_(std::move(parents)),
      parent_cards_(std::move(parent_cardinalities)) {
  if (cardinality_ == 0) throw UsageError("node '" + node_ + "' has cardinality 0");
  if (parents_.size() != parent_cards_.size()) {
    throw UsageError("CPT for '" + node_ + "': parent list and cardinalities differ in length");
  }
  rows_ = std::accumulate(parent_cards_.begin(), parent_cards_.end(), std::size_t{1},
                          std::multiplies<>());
  if (rows.size() != rows_) {
    throw UsageError("CPT for '" + node_ + "' has " + std::to_string(rows.size()) +
                     " rows, expected " + std::to_string(rows_));
  }
  table_.reserve(rows_ * cardinality_);
  for (std::size_t r = 0; r < rows_; ++r) {
    if (rows[r].size() != cardinality_) {
      throw UsageError("CPT for '" + node_ + "': row " + std::to_string(r) + " has " +
                       std::to_string(rows[r].size()) + " entries, expected " +
                       std::to_string(cardinality_));
    }
    double total = 0.0;
    for (double v : rows[r]) {
      if (!(v >= 0.0 && v <= 1.0)) {
        throw UsageError("CPT for '" + node_ + "': entry outside [0,1] in row " + std::to_string(r));
      }
      total += v;
    }
    if (std::abs(total - 1.0) > kRowTolerance) {
      throw UsageError("CPT for '" + node_ + "': row " + std::to_string(r) + " sums to " +
                       std::to_string(total));
    }
    table_.insert(table_.end(), rows[r].begin(), rows[r].end());
  }
}

std::size_t Cpt::config_index(std::span<const std::size_t> parent_states) const {
  if (parent_states.size() != parent_cards_.size()) {
    throw UsageError("CPT for '" + node_ + "': wrong number of parent states");
  }
  std::size_t idx = 0;
  for (std::size_t i = 0; i < parent_states.size(); ++i) {
    if (parent_states[i] >= parent_cards_[i]) throw UsageError("parent state out of range");
    idx = idx * parent_cards_[i] + parent_states[i];
  }
  return idx;
}

DiscreteModel::DiscreteModel(Dag dag, const std::map<std::string, std::size_t>& cardinalities,
                             std::vector<Cpt> cpts)
    : dag_(std::move(dag)) {
  const std::size_t n = dag_.size();
  cards_.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    auto it = cardinalities.find(dag_.nodes()[i]);
    if (it == cardinalities.end()) {
      throw UsageError("no cardinality given for node '" + dag_.nodes()[i] + "'");
    }
    if (it->second == 0) throw UsageError("node '" + it->first + "' has cardinality 0");
    cards_[i] = it->second;
  }
  for (const auto& [name, card] : cardinalities) {
    if (!dag_.contains(name)) throw UsageError("cardinality given for unknown node '" + name + "'");
  }
  cpts_.assign(n, Cpt{});
  std::vector<bool> seen(n, false);
  for (auto& cpt : cpts) {
    const std::size_t idx = dag_.index_of(cpt.node());
    if (seen[idx]) throw UsageError("duplicate CPT for '" + cpt.node() + "'");
    seen[idx] = true;
    auto expected = dag_.parents(cpt.node());
    auto given = cpt.parents();
    std::sort(expected.begin(), expected.end());
    std::sort(given.begin(), given.end());
    if (expected != given) {
      throw UsageError("CPT parents of '" + cpt.node() + "' do not match the graph");
    }
    if (cpt.cardinality() != cards_[idx]) {
      throw UsageError("CPT for '" + cpt.node() + "' has the wrong cardinality");
    }
    for (std::size_t k = 0; k < cpt.parents().size(); ++k) {
      if (cpt.parent_cardinalities()[k] != cards_[dag_.index_of(cpt.parents()[k])]) {
        throw UsageError("CPT for '" + cpt.node() + "': wrong cardinality for parent '" +
                         cpt.parents()[k] + "'");
      }
    }
    cpts_[idx] = std::move(cpt);
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!seen[i]) throw UsageError("missing CPT for '" + dag_.nodes()[i] + "'");
  }
}

JointTable::JointTable(std::vector<std::string> variables, std::vector<std::size_t> cardinalities,
                       std::vector<double> probabilities)
    : vars_(std::move(variables)), cards_(std::move(cardinalities)), probs_(std::move(probabilities)) {
  if (vars_.size() != cards_.size()) throw UsageError("joint table: variables/cardinalities mismatch");
  std::set<std::string> unique(vars_.begin(), vars_.end());
  if (unique.size() != vars_.size()) throw UsageError("joint table: duplicate variable");
  std::size_t expected = 1;
  for (std::size_t c : cards_) expected *= c;
  if (probs_.size() != expected) {
    throw UsageError("joint table has " + std::to_string(probs_.size()) + " entries, expected " +
                     std::to_string(expected));
  }
  double total = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0)) throw UsageError("joint table has a negative or NaN entry");
    total += p;
  }
  if (std::abs(total - 1.0) > kMassTolerance) {
    throw UsageError("joint table mass is " + std::to_string(total));
  }
}

std::size_t JointTable::position(std::string_view variable) const {
  auto it = std::find(vars_.begin(), vars_.end(), variable);
  if (it == vars_.end()) throw UsageError("variable '" + std::string(variable) + "' not in joint table");
  return static_cast<std::size_t>(it - vars_.begin());
}

std::size_t JointTable::flat_index(std::span<const std::size_t> states) const {
  if (states.size() != cards_.size()) throw UsageError("joint table: wrong number of states");
  std::size_t idx = 0;
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (states[i] >= cards_[i]) throw UsageError("joint table: state out of range");
    idx = idx * cards_[i] + states[i];
  }
  return idx;
}

JointTable JointTable::marginal(const std::vector<std::string>& keep) const {
  std::vector<std::size_t> pos;
  std::vector<std::size_t> out_cards;
  for (const auto& k : keep) {
    pos.push_back(position(k));
    out_cards.push_back(cards_[pos.back()]);
  }
  const auto out_strides = strides_for(out_cards);
  std::size_t out_size = 1;
  for (std::size_t c : out_cards) out_size *= c;
  std::vector<double> out(out_size, 0.0);
  std::vector<std::size_t> states(cards_.size(), 0);
  for (double p : probs_) {
    std::size_t idx = 0;
    for (std::size_t i = 0; i < pos.size(); ++i) idx += states[pos[i]] * out_strides[i];
    out[idx] += p;
    advance(states, cards_);
  }
  return JointTable(keep, std::move(out_cards), std::move(out));
}

std::size_t state_cap() {
  if (const char* env = std::getenv("CS_STATE_CAP")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return kDefaultStateCap;
}

JointTable joint_from_model(const DiscreteModel& model, std::size_t cap) {
  return enumerate(model, {}, cap);
}

DiscreteModel cut_edges(const DiscreteModel& model, const EdgeSet& s, Feeding feeding) {
  return reduce_targets(model, s, [feeding](const JointTable& joint, const Cpt& cpt, const FamilySplit& split) {
    return feeding == Feeding::product ? product_weights(joint, cpt, split)
                                       : joint_weights(joint, cpt, split);
  });
}

JointTable ignore_edges(const DiscreteModel& model, const EdgeSet& s) {
  const DiscreteModel ignored = reduce_targets(model, s, ignoring_weights);
  return joint_from_model(ignored).marginal(model.dag().topological_order());
}

double kl(const JointTable& p, const JointTable& q, LogBase base) {
  const JointTable* aligned = &q;
  JointTable permuted;
  if (p.variables() != q.variables()) {
    if (p.variables().size() != q.variables().size()) {
      throw UsageError("kl: tables are over different variables");
    }
    permuted = q.marginal(p.variables());
    aligned = &permuted;
  }
  if (p.cardinalities() != aligned->cardinalities()) {
    throw UsageError("kl: tables have different cardinalities");
  }
  const auto& pp = p.probabilities();
  const auto& qq = aligned->probabilities();
  double total = 0.0;
  for (std::size_t i = 0; i < pp.size(); ++i) {
    if (pp[i] <= 0.0) continue;
    if (qq[i] <= 0.0) return kInfinity;
    total += pp[i] * log_ratio(pp[i], qq[i]);
  }
  return from_nats(std::max(total, 0.0), base);
}

double causal_strength(const DiscreteModel& model, const EdgeSet& s, LogBase base) {
  return strength_with_feeding(model, s, Feeding::product, base);
}

double source_exclusion_flow(const DiscreteModel& model, const EdgeSet& s, LogBase base) {
  return strength_with_feeding(model, s, Feeding::joint, base);
}

double observed_influence(const DiscreteModel& model, const EdgeSet& s, LogBase base) {
  validate_edges(model.dag(), s);
  if (s.empty()) return 0.0;
  return kl(joint_from_model(model), ignore_edges(model, s), base);
}

double ignoring_gap(const DiscreteModel& model, const EdgeSet& s, LogBase base) {
  validate_edges(model.dag(), s);
  if (s.empty()) return 0.0;
  const JointTable joint = joint_from_model(model);
  double total = 0.0;
  for (const auto& target : s.targets()) {
    const Cpt& cpt = model.cpt(target);
    const auto split = split_family(cpt, s);
    const Cpt ignored = reduce_cpt(cpt, split, ignoring_weights(joint, cpt, split));
    const Cpt cut = reduce_cpt(cpt, split, product_weights(joint, cpt, split));
    const auto kept_mass = joint.marginal(names_at(cpt, split.kept)).probabilities();
    for (std::size_t k = 0; k < kept_mass.size(); ++k) {
      if (kept_mass[k] <= 0.0) continue;
      for (std::size_t x = 0; x < cpt.cardinality(); ++x) {
        const double a = ignored.probability(x, k);
        if (a <= 0.0) continue;
        const double b = cut.probability(x, k);
        if (b <= 0.0) return kInfinity;
        total += kept_mass[k] * a * log_ratio(a, b);
      }
    }
  }
  return from_nats(std::max(total, 0.0), base);
}

double entropy(const JointTable& joint, const Selection& vars, LogBase base) {
  require_disjoint(joint, {&vars});
  if (vars.empty()) return 0.0;
  return from_nats(shannon_nats(joint.marginal(vars).probabilities()), base);
}

double conditional_entropy(const JointTable& joint, const Selection& vars, const Selection& given,
                           LogBase base) {
  require_disjoint(joint, {&vars, &given});
  const double h = entropy(joint, concat(vars, given), LogBase::nats) - entropy(joint, given, LogBase::nats);
  return from_nats(std::max(h, 0.0), base);
}

double mutual_information(const JointTable& joint, const Selection& a, const Selection& b,
                          LogBase base) {
  return conditional_mutual_information(joint, a, b, {}, base);
}

double conditional_mutual_information(const JointTable& joint, const Selection& a,
                                      const Selection& b, const Selection& given, LogBase base) {
  require_disjoint(joint, {&a, &b, &given});
  if (a.empty() || b.empty()) return 0.0;
  const double i = entropy(joint, concat(a, given), LogBase::nats) +
                   entropy(joint, concat(b, given), LogBase::nats) -
                   entropy(joint, concat(concat(a, b), given), LogBase::nats) -
                   entropy(joint, given, LogBase::nats);
  return from_nats(std::max(i, 0.0), base);
}

JointTable intervene(const DiscreteModel& model, const std::map<std::string, std::size_t>& assignment) {
  return enumerate(model, assignment, state_cap());
}

double ace(const DiscreteModel& model, std::string_view cause, std::string_view effect) {
  if (cause == effect) throw UsageError("ace: cause and effect must differ");
  if (model.cardinality(cause) != 2 || model.cardinality(effect) != 2) {
    throw UsageError("ace requires binary cause and effect");
  }
  auto success = [&](std::size_t value) {
    const auto joint = intervene(model, {{std::string(cause), value}});
    return joint.marginal({std::string(effect)}).probabilities()[1];
  };
  return success(1) - success(0);
}

double information_flow(const DiscreteModel& model, const Selection& a, const Selection& b,
                        const Selection& c, LogBase base) {
  const JointTable joint = joint_from_model(model);
  require_disjoint(joint, {&a, &b, &c});
  if (a.empty() || b.empty()) throw UsageError("information_flow: A and B must be nonempty");

  auto cards_of = [&](const Selection& sel) {
    std::vector<std::size_t> out;
    for (const auto& v : sel) out.push_back(model.cardinality(v));
    return out;
  };
  const auto a_cards = cards_of(a);
  const auto c_cards = cards_of(c);
  const auto pc = joint.marginal(c).probabilities();

  double total = 0.0;
  std::vector<std::size_t> c_states(c.size(), 0);
  for (std::size_t ci = 0; ci < pc.size(); ++ci, advance(c_states, c_cards)) {
    if (pc[ci] <= 0.0) continue;
    std::map<std::string, std::size_t> do_c;
    for (std::size_t k = 0; k < c.size(); ++k) do_c[c[k]] = c_states[k];
    const auto pa = intervene(model, do_c).marginal(a).probabilities();

    std::vector<std::vector<double>> pb(pa.size());
    std::vector<std::size_t> a_states(a.size(), 0);
    for (std::size_t ai = 0; ai < pa.size(); ++ai, advance(a_states, a_cards)) {
      auto do_ac = do_c;
      for (std::size_t k = 0; k < a.size(); ++k) do_ac[a[k]] = a_states[k];
      pb[ai] = intervene(model, do_ac).marginal(b).probabilities();
    }
    std::vector<double> mix(pb.front().size(), 0.0);
    for (std::size_t ai = 0; ai < pa.size(); ++ai) {
      for (std::size_t bi = 0; bi < mix.size(); ++bi) mix[bi] += pa[ai] * pb[ai][bi];
    }
    double inner = 0.0;
    for (std::size_t ai = 0; ai < pa.size(); ++ai) {
      if (pa[ai] <= 0.0) continue;
      for (std::size_t bi = 0; bi < mix.size(); ++bi) {
        const double p = pb[ai][bi];
        if (p > 0.0) inner += pa[ai] * p * log_ratio(p, mix[bi]);
      }
    }
    total += pc[ci] * inner;
  }
  return from_nats(std::max(total, 0.0), base);
}

BivariateChain unroll_bivariate_chain(const ChainDefinition& def) {
  const std::size_t cx = def.x_cardinality;
  const std::size_t cy = def.y_cardinality;
  if (def.steps < 1) throw UsageError("chain needs at least one transition");
  if (def.initial.size() != cx) throw UsageError("initial joint must have one row per X state");

  BivariateChain chain;
  std::vector<std::string> nodes;
  std::vector<Edge> edges;
  for (std::size_t t = 0; t <= def.steps; ++t) {
    chain.x.push_back("X" + std::to_string(t));
    chain.y.push_back("Y" + std::to_string(t));
    nodes.push_back(chain.x.back());
    nodes.push_back(chain.y.back());
  }
  edges.push_back({chain.x[0], chain.y[0]});
  for (std::size_t t = 1; t <= def.steps; ++t) {
    for (const auto& tgt : {chain.x[t], chain.y[t]}) {
      edges.push_back({chain.x[t - 1], tgt});
      edges.push_back({chain.y[t - 1], tgt});
    }
  }

  std::vector<double> px(cx, 0.0);
  std::vector<std::vector<double>> py_given_x(cx, std::vector<double>(cy, 1.0 / static_cast<double>(cy)));
  for (std::size_t x = 0; x < cx; ++x) {
    if (def.initial[x].size() != cy) throw UsageError("initial joint has the wrong width");
    px[x] = std::accumulate(def.initial[x].begin(), def.initial[x].end(), 0.0);
    if (px[x] > 0.0) {
      for (std::size_t y = 0; y < cy; ++y) py_given_x[x][y] = def.initial[x][y] / px[x];
    }
  }

  std::map<std::string, std::size_t> cards;
  std::vector<Cpt> cpts;
  cpts.emplace_back(chain.x[0], cx, std::vector<std::string>{}, std::vector<std::size_t>{},
                    std::vector<std::vector<double>>{px});
  cpts.emplace_back(chain.y[0], cy, std::vector<std::string>{chain.x[0]}, std::vector<std::size_t>{cx},
                    py_given_x);
  for (std::size_t t = 0; t <= def.steps; ++t) {
    cards[chain.x[t]] = cx;
    cards[chain.y[t]] = cy;
    if (t == 0) continue;
    const std::vector<std::string> parents{chain.x[t - 1], chain.y[t - 1]};
    cpts.emplace_back(chain.x[t], cx, parents, std::vector<std::size_t>{cx, cy}, def.x_transition);
    cpts.emplace_back(chain.y[t], cy, parents, std::vector<std::size_t>{cx, cy}, def.y_transition);
  }
  chain.model = DiscreteModel(Dag(nodes, edges), cards, std::move(cpts));
  return chain;
}

double transfer_entropy_exact(const BivariateChain& chain, std::size_t horizon, LogBase base) {
  const std::size_t last = chain.y.size() - 1;
  if (horizon < 1 || horizon > last) {
    throw UsageError("transfer entropy horizon must lie in [1, " + std::to_string(last) + "]");
  }
  Selection x_past;
  Selection y_past;
  for (std::size_t t = last - horizon; t < last; ++t) {
    x_past.push_back(chain.x[t]);
    y_past.push_back(chain.y[t]);
  }
  const JointTable joint = joint_from_model(chain.model);
  return conditional_mutual_information(joint, x_past, {chain.y[last]}, y_past, base);
}

}  // namespace causal
