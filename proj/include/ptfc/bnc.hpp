#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "numeric.hpp"

namespace ptfc
{

/// One variable of a binary Bayesian network classifier.  The class variable
/// C is an implicit extra parent of every variable.
///
/// `p1[config * 2 + c]` is P(X_i = 1 | X_parents = config, C = c) where bit j
/// of `config` is the value of `parents[j]` (parents kept sorted).
struct bnc_node
{
  std::vector<int> parents;
  std::vector<rational> p1;
};

/// Exact binary Bayesian network classifier.  Immutable after construction;
/// the constructor rejects anything that is not a valid network with every
/// CPT entry strictly inside (0, 1).
class bnc_model
{
public:
  bnc_model( rational prior_c1, std::vector<bnc_node> nodes );

  int num_vars() const noexcept { return static_cast<int>( nodes_.size() ); }
  rational const& prior( int c ) const { return c ? prior1_ : prior0_; }
  std::vector<int> const& parents( int i ) const { return nodes_[i].parents; }
  bnc_node const& node( int i ) const { return nodes_[i]; }
  std::vector<int> const& topological_order() const noexcept { return topo_; }

  /// d_N = 1 + max_i |parents(i)|.
  int degree() const noexcept { return degree_; }
  /// Maximal bit-length of numerators and denominators of all probabilities.
  int precision() const noexcept { return precision_; }
  bool is_tan() const noexcept { return degree_ <= 2; }

  /// Index into node(i).p1 for the parent values read from `a`.
  std::size_t parent_config( int i, assignment const& a ) const;
  /// P(X_i = value | parents read from a, C = c).
  rational const& p1( int i, assignment const& a, int c ) const;
  rational conditional( int i, int value, assignment const& a, int c ) const;

private:
  rational prior0_, prior1_;
  std::vector<bnc_node> nodes_;
  std::vector<int> topo_;
  int degree_ = 1;
  int precision_ = 0;
};

/// P_N(X = a, C = c).
rational joint_probability( bnc_model const& m, assignment const& a, int c );

/// P_{N,X}(a) = sum over c of the joint.
rational input_probability( bnc_model const& m, assignment const& a );

/// 1 iff P_N(a, 1) >= P_N(a, 0), decided exactly.
bool classify( bnc_model const& m, assignment const& a );

/// Draw (a, c) by ancestral sampling.  Deterministic in the seed.
std::pair<assignment, int> sample( bnc_model const& m, std::uint64_t seed );

/// Draw `count` samples from one seeded generator.
std::vector<std::pair<assignment, int>> sample_many( bnc_model const& m, std::size_t count, std::uint64_t seed );

/// Whole-domain accuracy sum_a P_N(a, f(a)); refuses n > max_vars.
rational accuracy( bnc_model const& m, std::function<bool( assignment const& )> const& f, int max_vars = 20 );

/// Random TAN over an in-forest.  `forest_parent[i]` is the parent of X_i or
/// -1 for a root.  Every P(X_i = 1 | parent, c) is drawn uniformly from the
/// grid points k / 2^q inside (1/7,2/7) u (3/7,4/7) u (5/7,6/7);
/// P(C = 1) = 1/2.
bnc_model random_tan( std::vector<int> const& forest_parent, std::uint64_t seed, int q = 16 );

/// Random network whose moral graph (without C) is a partial k-tree, so its
/// tree-width is at most `width`.  Each variable gets a random subset of a
/// k-clique as parents.  CPT entries are drawn like in random_tan.
bnc_model random_bounded_treewidth( int n, int width, std::uint64_t seed, int q = 16 );

/// The 14-variable reference TAN (two depth-2 binary trees) with its CPT
/// entries given as 3-dp decimals k/1000.
bnc_model reference_tan();

/// Parent map of the reference TAN's forest (0-based, -1 for roots).
std::vector<int> reference_tan_forest();

} // namespace ptfc
