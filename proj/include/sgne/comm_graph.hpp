#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "sgne/errors.hpp"

namespace sgne {

/// Undirected communication graph between prosumers. Nodes are 0-indexed,
/// self-loops and duplicate edges are rejected. Neighbor lists are kept
/// sorted so that neighborhood sums are evaluated in a fixed order.
class CommGraph {
 public:
  CommGraph() = default;

  static CommGraph from_edges(int node_count,
                              std::vector<std::pair<int, int>> edges);

  /// Text format: one "u v" pair per line, 0-indexed; '#' starts a comment.
  static CommGraph from_edge_list_file(const std::string& path);

  static CommGraph complete(int node_count);
  static CommGraph path(int node_count);
  static CommGraph cycle(int node_count);

  int node_count() const { return node_count_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  const std::vector<int>& neighbors(int i) const { return adjacency_.at(i); }
  int degree(int i) const { return static_cast<int>(adjacency_.at(i).size()); }
  int max_degree() const;

  bool is_connected() const;
  void require_connected() const;

  /// Dense Laplacian: L_ii = deg(i), L_ij = -1 on edges. Throws
  /// DisconnectedGraphError when the graph is not connected.
  Eigen::MatrixXd laplacian() const;

  /// (L x)_i accumulated over sorted neighbor ids.
  double laplacian_row_apply(int i, const Eigen::VectorXd& x) const;
  Eigen::VectorXd laplacian_apply(const Eigen::VectorXd& x) const;

 private:
  int node_count_ = 0;
  std::vector<std::pair<int, int>> edges_;
  std::vector<std::vector<int>> adjacency_;
};

}  // namespace sgne
