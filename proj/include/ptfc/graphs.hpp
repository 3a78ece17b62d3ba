#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "bnc.hpp"
#include "ptf.hpp"

namespace ptfc
{

/// Simple undirected graph on vertices 0..n-1.
class graph
{
public:
  explicit graph( int n = 0 ) : adj_( static_cast<std::size_t>( n ) ) {}

  int num_vertices() const noexcept { return static_cast<int>( adj_.size() ); }
  std::size_t num_edges() const;

  /// Self-loops are ignored; repeated edges are stored once.
  void add_edge( int u, int v );
  bool has_edge( int u, int v ) const;
  std::vector<int> const& neighbors( int v ) const { return adj_[v]; }
  /// All edges (u, v) with u < v in lexicographic order.
  std::vector<std::pair<int, int>> edges() const;

  friend bool operator==( graph const&, graph const& ) = default;

private:
  void check( int v ) const;

  std::vector<std::vector<int>> adj_;
};

struct term_hypergraph
{
  int num_vertices = 0;
  std::vector<std::vector<int>> edges;
};

/// Hyperedges are the supports of the non-constant terms.
term_hypergraph hypergraph_of( polynomial const& p );

/// Every hyperedge becomes a clique.
graph primal_graph( term_hypergraph const& h );

/// Undirected skeleton plus edges between co-parents.  `parents[i]` lists
/// the parents of vertex i.
graph moral_graph( std::vector<std::vector<int>> const& parents );
/// Moral graph of the network with the class variable removed.
graph moral_graph( bnc_model const& m );

enum class decomposition_kind
{
  tree,
  path
};

struct decomposition
{
  decomposition_kind kind = decomposition_kind::tree;
  std::vector<std::vector<int>> bags;
  std::vector<std::pair<int, int>> tree_edges;

  int width() const;
};

struct validation_result
{
  bool valid = true;
  std::string reason;
};

/// Checks coverage of vertices and edges, that the bag graph is a tree (a
/// path for path decompositions) and that each vertex's bags are connected.
validation_result validate( graph const& g, decomposition const& d );

struct treewidth_result
{
  int width = -1;
  decomposition witness;
};

/// Exact tree-width by dynamic programming over elimination prefixes.
/// Refuses more than `max_vertices` vertices.
treewidth_result treewidth_exact( graph const& g, int max_vertices = 16 );

/// Tree decomposition induced by eliminating vertices in `order`.
decomposition decomposition_from_elimination( graph const& g, std::vector<int> const& order );

/// A vertex ordering with its separators: separators[l] holds the vertices
/// among the first l positions that have a neighbour after position l
/// (l = 0..n, so separators.front() and separators.back() are empty).
struct separator_sequence
{
  std::vector<int> ordering;
  std::vector<std::vector<int>> separators;

  int num_vertices() const noexcept { return static_cast<int>( ordering.size() ); }
  /// max over l < n of |S_l|.
  int value() const;
};

/// Throws input_error unless `ordering` is a permutation of the vertices.
separator_sequence make_separator_sequence( graph const& g, std::vector<int> ordering );

/// Path decomposition with bags S_{l} u {ordering[l]}.
decomposition path_decomposition( separator_sequence const& s );

struct pathwidth_result
{
  int width = -1;
  separator_sequence witness;
};

/// Minimum vertex separation number over all orderings.
pathwidth_result pathwidth_exact( graph const& g, int max_vertices = 14 );

/// Exhaustive search over nice path decompositions (introduce/forget steps),
/// independent of the separator formulation.
treewidth_result pathwidth_by_decomposition( graph const& g, int max_vertices = 10 );

/// Best of a greedy vertex-separation layout (every start vertex) and the
/// min-fill and min-degree elimination orders.  Deterministic; ties go to the
/// lowest vertex index.
separator_sequence heuristic_ordering( graph const& g );

/// Exact when the graph is small enough, heuristic otherwise.
separator_sequence best_ordering( graph const& g, int exact_limit = 14 );

/// Graphviz text, one node per bag.
std::string to_dot( decomposition const& d );

} // namespace ptfc
