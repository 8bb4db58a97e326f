#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sgne/comm_graph.hpp"
#include "sgne/scenario_io.hpp"

using namespace sgne;

TEST_CASE("triangle laplacian") {
  const auto g = CommGraph::cycle(3);
  const Eigen::MatrixXd L = g.laplacian();
  Eigen::MatrixXd expected(3, 3);
  expected << 2, -1, -1, -1, 2, -1, -1, -1, 2;
  CHECK((L - expected).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("two-node path laplacian") {
  const auto g = CommGraph::path(2);
  const Eigen::MatrixXd L = g.laplacian();
  Eigen::MatrixXd expected(2, 2);
  expected << 1, -1, -1, 1;
  CHECK((L - expected).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("ieee123 edge list loads with zero laplacian row sums") {
  const auto g = CommGraph::from_edge_list_file(
      (data_dir() / "ieee123_edges.txt").string());
  CHECK(g.node_count() == 123);
  CHECK(g.edge_count() == 122);
  CHECK(g.is_connected());
  const Eigen::MatrixXd L = g.laplacian();
  CHECK(L.rowwise().sum().cwiseAbs().maxCoeff() == 0.0);
  CHECK((L - L.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("laplacian_apply matches the dense matrix") {
  const auto g = CommGraph::cycle(5);
  Eigen::VectorXd x(5);
  x << 1.5, -2.0, 0.25, 3.0, -1.0;
  CHECK((g.laplacian_apply(x) - g.laplacian() * x).cwiseAbs().maxCoeff() ==
        doctest::Approx(0.0));
}

TEST_CASE("disconnected graph is rejected by laplacian") {
  const auto g = CommGraph::from_edges(4, {{0, 1}, {2, 3}});
  CHECK(!g.is_connected());
  CHECK_THROWS_AS(g.laplacian(), DisconnectedGraphError);
}

TEST_CASE("malformed graphs are rejected") {
  CHECK_THROWS_AS(CommGraph::from_edges(3, {{0, 0}}), InputError);
  CHECK_THROWS_AS(CommGraph::from_edges(3, {{0, 1}, {1, 0}}), InputError);
  CHECK_THROWS_AS(CommGraph::from_edges(2, {{0, 5}}), InputError);
}

TEST_CASE("neighbor lists are sorted") {
  const auto g = CommGraph::from_edges(4, {{3, 1}, {1, 0}, {1, 2}});
  const auto& nbrs = g.neighbors(1);
  CHECK(nbrs == std::vector<int>{0, 2, 3});
  CHECK(g.max_degree() == 3);
}
