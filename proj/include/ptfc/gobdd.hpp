#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bnc.hpp"
#include "graphs.hpp"
#include "numeric.hpp"
#include "obdd.hpp"

namespace ptfc
{

/// Edge probabilities are fixed-point numbers with this many fraction bits.
inline constexpr int probability_bits = 62;
inline constexpr std::uint64_t probability_one = std::uint64_t{ 1 } << probability_bits;

struct gobdd_node
{
  int layer = 0;
  int lo = -1;
  int hi = -1;
  /// Probability of the 0-edge times 2^62; the 1-edge gets the complement.
  std::uint64_t p0 = 0;

  long double prob0() const noexcept { return static_cast<long double>( p0 ) / probability_one; }
  long double prob1() const noexcept { return static_cast<long double>( probability_one - p0 ) / probability_one; }
  friend bool operator==( gobdd_node const&, gobdd_node const& ) = default;
};

/// Generator OBDD: a layered diagram with a single sink on layer n whose edge
/// probabilities define a distribution over {0,1}^n.  The sink is the last
/// node.  Since the 1-edge weight is derived from the 0-edge weight, every
/// node's weights sum to exactly one.
class gobdd
{
public:
  gobdd() = default;
  /// Validates structure; throws input_error on malformed input.
  gobdd( int n, std::vector<int> ordering, std::vector<gobdd_node> nodes, int start );

  int num_vars() const noexcept { return n_; }
  std::vector<int> const& ordering() const noexcept { return ordering_; }
  std::vector<gobdd_node> const& nodes() const noexcept { return nodes_; }
  gobdd_node const& node( int id ) const { return nodes_[id]; }
  int start() const noexcept { return start_; }
  int sink() const noexcept { return static_cast<int>( nodes_.size() ) - 1; }
  std::size_t size() const noexcept { return nodes_.size(); }

  std::vector<int> layer_sizes() const;
  int width() const;

  /// Product of edge probabilities along the path of a.
  long double prob( assignment const& a ) const;
  assignment sample( std::uint64_t seed ) const;
  std::vector<assignment> sample_many( std::size_t count, std::uint64_t seed ) const;

  static gobdd uniform( int n, std::vector<int> ordering );
  /// Independent bits with P(x_i = 1) = p1[i].
  static gobdd product( std::vector<int> ordering, std::vector<rational> const& p1 );

private:
  int n_ = 0;
  std::vector<int> ordering_;
  std::vector<gobdd_node> nodes_;
  int start_ = 0;
};

/// Rounds a probability in [0, 1] to the fixed-point grid.
std::uint64_t to_fixed_probability( rational const& p );

/// P_N(X | C = c) as a GOBDD.  Layer-l nodes correspond to assignments of the
/// separator S_l, so the width is at most 2^|S_l|.  The separators must cover
/// the moral-graph separators of the ordering (input_error otherwise).
gobdd joint_gobdd( bnc_model const& m, separator_sequence const& seq, int c );

struct approx_gobdd_info
{
  double epsilon = 0;
  /// Step of the log-odds grid used as part of the node key.
  double grid_step = 0;
  /// Worst-case accumulated log-odds drift, n(n-1)/4 * grid_step.
  double drift_bound = 0;
};

/// GOBDD D approximating the input distribution P_{N,X} with
/// (1 - eps) P_D(a) <= P_{N,X}(a) <= (1 + eps) P_D(a) for every a.
/// Nodes on layer l are keyed by the separator assignment of S_l and the
/// prefix log-odds log P(prefix, C=1) / P(prefix, C=0) on a grid.
gobdd approx_input_gobdd( bnc_model const& m, separator_sequence const& seq, double eps, approx_gobdd_info* info = nullptr );

/// Sum of P_D(a) over the accepted a; the orderings must agree.
long double weighted_mass( obdd const& d, gobdd const& dist );

} // namespace ptfc
