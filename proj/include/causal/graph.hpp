#pragma once

#include <compare>
#include <cstddef>
#include <initializer_list>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace causal {

/// A directed arrow `source -> target`.
struct Edge {
  std::string source;
  std::string target;

  auto operator<=>(const Edge&) const = default;
};

std::string to_string(const Edge& edge);

/// A set of arrows whose joint strength is measured. Membership in a
/// particular graph is checked where the set is used, not here.
class EdgeSet {
 public:
  using container = std::set<Edge>;
  using const_iterator = container::const_iterator;

  EdgeSet() = default;
  EdgeSet(std::initializer_list<Edge> edges) : edges_(edges) {}
  template <class It>
  EdgeSet(It first, It last) : edges_(first, last) {}

  void insert(Edge edge) { edges_.insert(std::move(edge)); }
  bool contains(const Edge& edge) const { return edges_.count(edge) != 0; }
  bool contains(std::string_view source, std::string_view target) const;
  std::size_t size() const { return edges_.size(); }
  bool empty() const { return edges_.empty(); }

  const_iterator begin() const { return edges_.begin(); }
  const_iterator end() const { return edges_.end(); }

  /// Distinct target nodes, in lexicographic order.
  std::vector<std::string> targets() const;

  friend EdgeSet operator|(const EdgeSet& a, const EdgeSet& b);
  friend bool operator==(const EdgeSet&, const EdgeSet&) = default;

 private:
  container edges_;
};

std::string to_string(const EdgeSet& edges);

/// Directed acyclic graph over string-named nodes.
///
/// Nodes keep their declaration order; the topological order is computed
/// once at construction (Kahn's algorithm, ties broken by declaration index)
/// and is the canonical axis order for every tensor built from this graph.
/// Instances are immutable.
class Dag {
 public:
  Dag() = default;
  /// Throws GraphError on duplicate or unknown nodes, self-loops, duplicate
  /// edges or cycles.
  Dag(std::vector<std::string> nodes, const std::vector<Edge>& edges);

  const std::vector<std::string>& nodes() const { return nodes_; }
  std::size_t size() const { return nodes_.size(); }
  bool contains(std::string_view node) const;
  /// Declaration index of `node`; throws UsageError for unknown names.
  std::size_t index_of(std::string_view node) const;

  bool has_edge(std::string_view source, std::string_view target) const;
  /// All edges, sorted by (source, target) declaration index.
  std::vector<Edge> edges() const;
  std::size_t edge_count() const { return edge_count_; }

  /// Parents in declaration order.
  std::vector<std::string> parents(std::string_view node) const;
  std::vector<std::string> children(std::string_view node) const;
  const std::vector<std::size_t>& parent_indices(std::size_t node) const { return parents_[node]; }
  const std::vector<std::size_t>& child_indices(std::size_t node) const { return children_[node]; }

  /// Strict descendants of `node`, in topological order.
  std::vector<std::string> descendants(std::string_view node) const;

  const std::vector<std::string>& topological_order() const { return topo_names_; }
  /// Position of declaration index `node` in the topological order.
  std::size_t topological_position(std::size_t node) const { return topo_position_[node]; }

  /// Subgraph induced by `keep` (any order); nodes keep this graph's
  /// declaration order.
  Dag induced(const std::vector<std::string>& keep) const;

  friend bool operator==(const Dag& a, const Dag& b);

 private:
  std::vector<std::string> nodes_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::vector<std::size_t>> parents_;
  std::vector<std::vector<std::size_t>> children_;
  std::size_t edge_count_ = 0;
  std::vector<std::string> topo_names_;
  std::vector<std::size_t> topo_position_;
};

/// Returns the cached topological order of `dag`.
const std::vector<std::string>& topological_order(const Dag& dag);

/// Throws InvalidEdgeError unless every member of `s` is an edge of `dag`.
void validate_edges(const Dag& dag, const EdgeSet& s);

/// Partition of a node's parents by whether their arrow into it is cut.
struct ParentSplit {
  std::vector<std::string> cut;   ///< parents whose edge into the node is in S
  std::vector<std::string> kept;  ///< remaining parents
};

/// Splits the parents of `node` (declaration order preserved in both parts).
ParentSplit split_parents(const Dag& dag, std::string_view node, const EdgeSet& s);

/// The graph with the arrows in `s` removed; the node set is unchanged.
Dag remove_edges(const Dag& dag, const EdgeSet& s);

/// Groups `s` by target node.
std::map<std::string, EdgeSet> group_by_target(const EdgeSet& s);

/// Every edge of `dag`, each as its own singleton set.
std::vector<EdgeSet> all_single_arrows(const Dag& dag);

/// All arrows of `dag` pointing into `node`.
EdgeSet all_into(const Dag& dag, std::string_view node);

/// Parses `"A->B,C->B"`. An empty string or `"{}"` yields the empty set.
EdgeSet parse_edge_list(std::string_view text);

}  // namespace causal
