#include "causal/graph.hpp"

#include <algorithm>
#include <queue>

#include "causal/error.hpp"

namespace causal {

std::string to_string(const Edge& edge) { return edge.source + "->" + edge.target; }

bool EdgeSet::contains(std::string_view source, std::string_view target) const {
  return edges_.count(Edge{std::string(source), std::string(target)}) != 0;
}

std::vector<std::string> EdgeSet::targets() const {
  std::set<std::string> out;
  for (const auto& e : edges_) out.insert(e.target);
  return {out.begin(), out.end()};
}

EdgeSet operator|(const EdgeSet& a, const EdgeSet& b) {
  EdgeSet out = a;
  for (const auto& e : b) out.insert(e);
  return out;
}

std::string to_string(const EdgeSet& edges) {
  std::string out;
  for (const auto& e : edges) {
    if (!out.empty()) out += ';';
    out += to_string(e);
  }
  return out.empty() ? "{}" : out;
}

Dag::Dag(std::vector<std::string> nodes, const std::vector<Edge>& edges)
    : nodes_(std::move(nodes)) {
  const std::size_t n = nodes_.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (nodes_[i].empty()) throw GraphError("empty node identifier");
    if (!index_.emplace(nodes_[i], i).second) {
      throw GraphError("duplicate node '" + nodes_[i] + "'");
    }
  }
  parents_.assign(n, {});
  children_.assign(n, {});
  for (const auto& e : edges) {
    auto s = index_.find(e.source);
    auto t = index_.find(e.target);
    if (s == index_.end() || t == index_.end()) {
      throw GraphError("edge " + to_string(e) + " references an unknown node");
    }
    if (s->second == t->second) throw GraphError("self-loop on '" + e.source + "'");
    auto& pa = parents_[t->second];
    if (std::find(pa.begin(), pa.end(), s->second) != pa.end()) {
      throw GraphError("duplicate edge " + to_string(e));
    }
    pa.push_back(s->second);
    children_[s->second].push_back(t->second);
    ++edge_count_;
  }
  for (auto& pa : parents_) std::sort(pa.begin(), pa.end());
  for (auto& ch : children_) std::sort(ch.begin(), ch.end());

  // Kahn's algorithm; the min-heap makes ties resolve by declaration order.
  std::vector<std::size_t> indegree(n);
  for (std::size_t i = 0; i < n; ++i) indegree[i] = parents_[i].size();
  std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
  for (std::size_t i = 0; i < n; ++i) {
    if (indegree[i] == 0) ready.push(i);
  }
  topo_position_.assign(n, 0);
  while (!ready.empty()) {
    const std::size_t v = ready.top();
    ready.pop();
    topo_position_[v] = topo_names_.size();
    topo_names_.push_back(nodes_[v]);
    for (std::size_t c : children_[v]) {
      if (--indegree[c] == 0) ready.push(c);
    }
  }
  if (topo_names_.size() != n) throw GraphError("graph contains a cycle");
}

bool Dag::contains(std::string_view node) const {
  return index_.count(std::string(node)) != 0;
}

std::size_t Dag::index_of(std::string_view node) const {
  auto it = index_.find(std::string(node));
  if (it == index_.end()) throw UsageError("unknown node '" + std::string(node) + "'");
  return it->second;
}

bool Dag::has_edge(std::string_view source, std::string_view target) const {
  auto s = index_.find(std::string(source));
  auto t = index_.find(std::string(target));
  if (s == index_.end() || t == index_.end()) return false;
  const auto& pa = parents_[t->second];
  return std::binary_search(pa.begin(), pa.end(), s->second);
}

std::vector<Edge> Dag::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count_);
  for (std::size_t s = 0; s < nodes_.size(); ++s) {
    for (std::size_t t : children_[s]) out.push_back({nodes_[s], nodes_[t]});
  }
  return out;
}

std::vector<std::string> Dag::parents(std::string_view node) const {
  std::vector<std::string> out;
  for (std::size_t p : parents_[index_of(node)]) out.push_back(nodes_[p]);
  return out;
}

std::vector<std::string> Dag::children(std::string_view node) const {
  std::vector<std::string> out;
  for (std::size_t c : children_[index_of(node)]) out.push_back(nodes_[c]);
  return out;
}

std::vector<std::string> Dag::descendants(std::string_view node) const {
  std::vector<bool> seen(nodes_.size(), false);
  std::vector<std::size_t> stack{index_of(node)};
  while (!stack.empty()) {
    const std::size_t v = stack.back();
    stack.pop_back();
    for (std::size_t c : children_[v]) {
      if (!seen[c]) {
        seen[c] = true;
        stack.push_back(c);
      }
    }
  }
  std::vector<std::string> out;
  for (const auto& name : topo_names_) {
    if (seen[index_.at(name)]) out.push_back(name);
  }
  return out;
}

Dag Dag::induced(const std::vector<std::string>& keep) const {
  std::vector<bool> in(nodes_.size(), false);
  for (const auto& k : keep) in[index_of(k)] = true;
  std::vector<std::string> nodes;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (in[i]) nodes.push_back(nodes_[i]);
  }
  std::vector<Edge> edges;
  for (const auto& e : this->edges()) {
    if (in[index_.at(e.source)] && in[index_.at(e.target)]) edges.push_back(e);
  }
  return Dag(std::move(nodes), edges);
}

bool operator==(const Dag& a, const Dag& b) {
  return a.nodes_ == b.nodes_ && a.edges() == b.edges();
}

const std::vector<std::string>& topological_order(const Dag& dag) { return dag.topological_order(); }

void validate_edges(const Dag& dag, const EdgeSet& s) {
  for (const auto& e : s) {
    if (!dag.has_edge(e.source, e.target)) {
      throw InvalidEdgeError("edge " + to_string(e) + " is not in the graph");
    }
  }
}

ParentSplit split_parents(const Dag& dag, std::string_view node, const EdgeSet& s) {
  validate_edges(dag, s);
  ParentSplit out;
  for (auto& p : dag.parents(node)) {
    if (s.contains(p, node)) {
      out.cut.push_back(std::move(p));
    } else {
      out.kept.push_back(std::move(p));
    }
  }
  return out;
}

Dag remove_edges(const Dag& dag, const EdgeSet& s) {
  validate_edges(dag, s);
  std::vector<Edge> kept;
  for (auto& e : dag.edges()) {
    if (!s.contains(e)) kept.push_back(std::move(e));
  }
  return Dag(dag.nodes(), kept);
}

std::map<std::string, EdgeSet> group_by_target(const EdgeSet& s) {
  std::map<std::string, EdgeSet> out;
  for (const auto& e : s) out[e.target].insert(e);
  return out;
}

std::vector<EdgeSet> all_single_arrows(const Dag& dag) {
  std::vector<EdgeSet> out;
  for (auto& e : dag.edges()) out.push_back(EdgeSet{std::move(e)});
  return out;
}

EdgeSet all_into(const Dag& dag, std::string_view node) {
  EdgeSet out;
  for (auto& p : dag.parents(node)) out.insert({std::move(p), std::string(node)});
  return out;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

}  // namespace

EdgeSet parse_edge_list(std::string_view text) {
  EdgeSet out;
  text = trim(text);
  if (text.empty() || text == "{}" || text == "none") return out;
  while (!text.empty()) {
    const auto comma = text.find_first_of(",;");
    const auto item = trim(text.substr(0, comma));
    text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
    if (item.empty()) continue;
    const auto arrow = item.find("->");
    if (arrow == std::string_view::npos) {
      throw UsageError("malformed edge '" + std::string(item) + "' (expected SRC->DST)");
    }
    const auto src = trim(item.substr(0, arrow));
    const auto dst = trim(item.substr(arrow + 2));
    if (src.empty() || dst.empty()) {
      throw UsageError("malformed edge '" + std::string(item) + "'");
    }
    out.insert({std::string(src), std::string(dst)});
  }
  return out;
}

}  // namespace causal
