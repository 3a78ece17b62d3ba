#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <tuple>
#include <vector>

#include "bnc.hpp"
#include "gobdd.hpp"
#include "graphs.hpp"
#include "obdd.hpp"
#include "ptf.hpp"

namespace ptfc
{

struct compile_params
{
  /// Target bound on P_{N,X}(g(X) != f_N(X)); must lie in (0, 1).
  double epsilon = 0.1;
  /// Tree-width the caller expects; only reported.
  int treewidth_bound = -1;
  /// Fraction bits of the log-odds coefficients.
  int grid_bits = 64;
  std::size_t node_budget = 10'000'000;
  std::size_t distinguished_per_layer = 1'000'000;
  /// Variable ordering; chosen from the moral graph when absent.
  std::optional<std::vector<int>> ordering;
};

struct layer_stats
{
  int layer = 0;
  std::size_t groups = 0;        /* (b, GOBDD node) pairs */
  std::size_t candidates = 0;    /* breakpoints before merging */
  std::size_t distinguished = 0; /* nodes kept after merging */
  double max_gap = 0;            /* largest acceptance gap inside a merged run */
  std::size_t obdd_nodes = 0;    /* reachable nodes before minimization */
};

struct compile_report
{
  int num_vars = 0;
  double epsilon = 0;
  double gobdd_epsilon = 0;
  double merge_tolerance = 0;
  std::vector<int> ordering;
  int moral_separation = 0;  /* max |S_l| of the ordering on the moral graph */
  int primal_separation = 0; /* the same on the primal graph of the PTF */
  int treewidth = -1;        /* moral graph, when small enough to compute */
  int treewidth_bound = -1;
  int precision = 0;
  int grid_bits = 0;
  approx_gobdd_info gobdd;
  std::size_t gobdd_nodes = 0;
  int gobdd_width = 0;
  std::vector<layer_stats> layers;
  /// Sum over layers of max_gap; bounds P_D(f) - P_D(g).
  double gap_sum = 0;
  /// (1 + gobdd_epsilon) * gap_sum, an upper bound on P_{N,X}(g != f).
  double error_bound = 0;
  std::size_t monotonicity_checks = 0;
  double root_acceptance = 0;
  std::size_t obdd_size = 0;
  int obdd_width = 0;
};

struct compile_result
{
  obdd diagram;
  gobdd distribution;
  log_odds_ptf ptf;
  compile_report report;
};

/// Compiles the classifier into a layered OBDD g that accepts a subset of the
/// inputs accepted by the log-odds PTF, losing at most epsilon of
/// P_{N,X}-mass.  Throws capability_error when a budget is exceeded and
/// std::logic_error if acceptance probabilities ever fail to be monotone in
/// the partial sum.
compile_result compile_with_report( bnc_model const& m, compile_params const& params = {} );

obdd compile( bnc_model const& m, compile_params const& params = {} );

/// Exact acceptance probability of sign(p) from a partial state, with the
/// remaining variables drawn from a GOBDD.  Memoized recursion over
/// (layer, s, b, GOBDD node).
class acceptance_table
{
public:
  acceptance_table( ptf const& p, separator_sequence const& seq, gobdd const& d );

  ptf_schedule const& schedule() const noexcept { return schedule_; }
  long double alpha( int layer, int128 s, std::uint64_t b, int node );
  /// alpha at the root state.
  long double root();

private:
  ptf_schedule schedule_;
  gobdd const* dist_;
  std::map<std::tuple<int, int128, std::uint64_t, int>, long double> memo_;
};

enum class error_metric
{
  disagreement, /* P_{N,X}(g != f_N) */
  additive      /* |P_{N,X}(g = 1) - P_{N,X}(f_N = 1)| */
};

struct verification_report
{
  int num_vars = 0;
  std::size_t assignments = 0;
  error_metric metric = error_metric::disagreement;
  double epsilon = 0;
  rational disagreement;
  rational additive;
  std::size_t disagreeing_assignments = 0;
  /// Whether every disagreement is an input with f_N = 1 and g = 0.
  bool one_sided = true;
  bool sandwich_checked = false;
  bool sandwich_holds = true;
  std::size_t sandwich_violations = 0;
  /// max over a of |log(P_{N,X}(a) / P_D(a))|.
  double max_log_ratio = 0;

  double error() const { return ( metric == error_metric::disagreement ? disagreement : additive ).get_d(); }
  bool passed() const { return error() <= epsilon && ( !sandwich_checked || sandwich_holds ); }
};

/// Exhaustive comparison of g with the classifier; checks the GOBDD sandwich
/// at the same tolerance when `dist` is given.  Refuses more than max_vars
/// variables.
verification_report verify_compilation( bnc_model const& m, obdd const& g, error_metric metric, double epsilon,
                                        gobdd const* dist = nullptr, int max_vars = 20 );

} // namespace ptfc
