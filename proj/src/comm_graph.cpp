#include "sgne/comm_graph.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace sgne {

CommGraph CommGraph::from_edges(int node_count,
                                std::vector<std::pair<int, int>> edges) {
  if (node_count <= 0) {
    throw InputError("graph needs at least one node");
  }
  CommGraph g;
  g.node_count_ = node_count;
  g.adjacency_.assign(node_count, {});
  std::set<std::pair<int, int>> seen;
  for (auto& [u, v] : edges) {
    if (u < 0 || v < 0 || u >= node_count || v >= node_count) {
      throw InputError("edge endpoint out of range: " + std::to_string(u) +
                       " " + std::to_string(v));
    }
    if (u == v) {
      throw InputError("self-loop at node " + std::to_string(u));
    }
    if (u > v) std::swap(u, v);
    if (!seen.insert({u, v}).second) {
      throw InputError("duplicate edge " + std::to_string(u) + " " +
                       std::to_string(v));
    }
    g.edges_.emplace_back(u, v);
    g.adjacency_[u].push_back(v);
    g.adjacency_[v].push_back(u);
  }
  for (auto& nbrs : g.adjacency_) {
    std::sort(nbrs.begin(), nbrs.end());
  }
  return g;
}

CommGraph CommGraph::from_edge_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw InputError("cannot open edge list file: " + path);
  }
  std::vector<std::pair<int, int>> edges;
  int max_node = -1;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    int u, v;
    if (!(ls >> u)) continue;  // blank line
    if (!(ls >> v)) {
      throw InputError(path + ":" + std::to_string(lineno) +
                       ": expected 'u v' pair");
    }
    edges.emplace_back(u, v);
    max_node = std::max({max_node, u, v});
  }
  if (edges.empty()) {
    throw InputError(path + ": no edges");
  }
  return from_edges(max_node + 1, std::move(edges));
}

CommGraph CommGraph::complete(int node_count) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < node_count; ++i)
    for (int j = i + 1; j < node_count; ++j) edges.emplace_back(i, j);
  return from_edges(node_count, std::move(edges));
}

CommGraph CommGraph::path(int node_count) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i + 1 < node_count; ++i) edges.emplace_back(i, i + 1);
  return from_edges(node_count, std::move(edges));
}

CommGraph CommGraph::cycle(int node_count) {
  auto edges = path(node_count).edges();
  if (node_count > 2) edges.emplace_back(0, node_count - 1);
  return from_edges(node_count, std::move(edges));
}

int CommGraph::max_degree() const {
  int m = 0;
  for (int i = 0; i < node_count_; ++i) m = std::max(m, degree(i));
  return m;
}

bool CommGraph::is_connected() const {
  if (node_count_ == 0) return false;
  std::vector<char> seen(node_count_, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int count = 1;
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    for (int v : adjacency_[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        ++count;
        stack.push_back(v);
      }
    }
  }
  return count == node_count_;
}

void CommGraph::require_connected() const {
  if (!is_connected()) {
    throw DisconnectedGraphError("communication graph is not connected");
  }
}

Eigen::MatrixXd CommGraph::laplacian() const {
  require_connected();
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(node_count_, node_count_);
  for (int i = 0; i < node_count_; ++i) L(i, i) = degree(i);
  for (auto [u, v] : edges_) {
    L(u, v) = -1.0;
    L(v, u) = -1.0;
  }
  return L;
}

double CommGraph::laplacian_row_apply(int i, const Eigen::VectorXd& x) const {
  double acc = 0.0;
  for (int j : adjacency_[i]) acc += x[i] - x[j];
  return acc;
}

Eigen::VectorXd CommGraph::laplacian_apply(const Eigen::VectorXd& x) const {
  Eigen::VectorXd out(node_count_);
  for (int i = 0; i < node_count_; ++i) out[i] = laplacian_row_apply(i, x);
  return out;
}

}  // namespace sgne
