#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "graphs.hpp"
#include "numeric.hpp"
#include "ptf.hpp"

namespace ptfc
{

/// Per-position bookkeeping for evaluating an integer PTF along an ordering.
///
/// At position l the variable ordering[l] is read.  The state before the read
/// is (s, b): s sums the terms already fully assigned, b holds the values of
/// the separator variables separators[l] (bit j for separators[l][j]).  A term
/// is added at the position of its last variable.
class ptf_schedule
{
public:
  /// The separators must contain every earlier variable that shares a term
  /// with a later one; throws input_error otherwise and capability_error
  /// when a separator exceeds 62 variables.
  ptf_schedule( integer_form const& p, separator_sequence const& seq );

  int num_vars() const noexcept { return n_; }
  std::vector<int> const& ordering() const noexcept { return seq_.ordering; }
  std::vector<int> const& separator( int l ) const { return seq_.separators[l]; }
  int128 initial_sum() const noexcept { return constant_; }

  /// Contribution of the terms completed at position l.
  int128 delta( int l, std::uint64_t b, int x ) const;
  std::uint64_t next_bits( int l, std::uint64_t b, int x ) const;

  /// Bounds on the contributions of positions l..n-1.
  int128 remaining_min( int l ) const { return rem_min_[l]; }
  int128 remaining_max( int l ) const { return rem_max_[l]; }

private:
  struct completed_term
  {
    int128 coeff;
    std::uint64_t mask; /* over separator bit positions */
  };

  int n_;
  separator_sequence seq_;
  int128 constant_;
  std::vector<std::vector<completed_term>> completed_;
  /* for each bit of separators[l+1]: source bit in separators[l], or -1 for x */
  std::vector<std::vector<int>> carry_;
  std::vector<int128> rem_min_, rem_max_;
};

struct obdd_node
{
  int layer = 0;
  int var = -1;  /* -1 for sinks */
  int lo = -1;
  int hi = -1;
  int sink = -1; /* 0 or 1 for sinks, -1 otherwise */

  bool is_sink() const noexcept { return sink >= 0; }
  friend bool operator==( obdd_node const&, obdd_node const& ) = default;
};

/// Ordered binary decision diagram over a fixed variable ordering.  Sinks sit
/// on layer n; a node on layer l tests ordering[l].  In the layered form every
/// edge goes to the next layer, in the reduced form edges may skip layers.
/// Both sinks are always present.
class obdd
{
public:
  obdd() = default;
  /// Validates the structure; throws input_error on malformed diagrams.
  obdd( int n, std::vector<int> ordering, std::vector<obdd_node> nodes, int start, bool layered );

  int num_vars() const noexcept { return n_; }
  std::vector<int> const& ordering() const noexcept { return ordering_; }
  std::vector<obdd_node> const& nodes() const noexcept { return nodes_; }
  obdd_node const& node( int id ) const { return nodes_[id]; }
  int start() const noexcept { return start_; }
  bool layered() const noexcept { return layered_; }

  std::size_t size() const noexcept { return nodes_.size(); }
  /// Nodes per layer, sinks included on layer n.
  std::vector<int> layer_sizes() const;
  /// Maximal number of non-sink nodes in a layer.
  int width() const;

  bool evaluate( assignment const& a ) const;

  static obdd constant( int n, std::vector<int> ordering, bool value );

private:
  int n_ = 0;
  std::vector<int> ordering_;
  std::vector<obdd_node> nodes_;
  int start_ = 0;
  bool layered_ = true;
};

struct exact_obdd_options
{
  std::size_t node_budget = 10'000'000;
  /// Merge nodes with equal subfunctions after the (s, b) construction.
  bool minimize = true;
};

/// Layered OBDD for sign(p) built from (s, b) states.  States whose sign is
/// already forced by the remaining-term bounds are merged into one accepting
/// and one rejecting state per layer.  Throws capability_error naming the
/// layer once more than `node_budget` nodes are created.
obdd build_exact_obdd( ptf const& p, separator_sequence const& seq, exact_obdd_options const& options = {} );

/// Unique minimal layered OBDD of the same function: unreachable nodes are
/// dropped and nodes with identical children merged bottom-up.
obdd minimize( obdd const& d );

/// Removes nodes whose two edges agree and merges isomorphic nodes.
obdd reduce( obdd const& d );

/// Graph isomorphism of the parts reachable from the start nodes.
bool isomorphic( obdd const& a, obdd const& b );

/// Number of satisfying assignments.
integer count_models( obdd const& d );

/// Deterministic Graphviz text: dashed 0-edges, solid 1-edges, one rank per
/// layer, variables labelled x1..xn.
std::string export_dot( obdd const& d );

/// True when no node has both edges to the same successor and no two nodes
/// share (var, lo, hi).
bool is_reduced( obdd const& d );

} // namespace ptfc
