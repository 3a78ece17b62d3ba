#pragma once

#include <array>
#include <variant>
#include <vector>

#include "numeric.hpp"
#include "ptf.hpp"

namespace ptfc
{

/// n = 2k variables in k blocks {2j, 2j+1} (0-based), which form the
/// perfect matching M.
struct separation_instance
{
  int k = 2;

  int num_vars() const noexcept { return 2 * k; }
  std::vector<std::pair<int, int>> matching() const;
};

/// Th_{k+1}(x) or (Th_k(x) and no block is all ones).  Throws input_error on
/// odd length.
bool slice_function( assignment const& a );

/// x1 + x2 + x3 + x4 - x1 x2 - x3 x4 - 2: one when at least three bits are
/// set or both halves hold exactly one 1.
ptf four_variable_example();

/// sum x_i - (1/k) sum_j x_{2j} x_{2j+1} - k, the linear-size QTF whose
/// hypergraph is the singletons plus the matching.
ptf qtf_general( separation_instance const& inst );

/// sum x_i + 1/C(k,2) sum_{{i,j} not in M} x_i x_j >= k + 1.  Requires k >= 2.
threshold_ptf qtf_positive( separation_instance const& inst );

/// Every block pair has a mixed term.
struct mixed_term_certificate
{
  std::size_t mixed_pairs = 0;
  std::size_t required = 0;
  /// Representation is checked exhaustively only for k <= 5.
  bool representation_checked = false;
  bool represents = false;
};

/// A block pair without mixed terms and the four points that refute any
/// positive QTF on it.
struct mixed_term_witness
{
  int block_i = 0;
  int block_j = 0;
  std::array<assignment, 4> points; /* patterns 0011, 1100, 1010, 0101 on the two blocks */
  std::array<rational, 4> values;
  std::array<bool, 4> expected;     /* f_n at the points */
  std::array<bool, 4> decided;      /* candidate's decision at the points */
  rational gamma_i, gamma_j;        /* coefficients of the two matching pairs */
  /// p(0011z) + p(1100z) == p(1010z) + p(0101z) + gamma_i + gamma_j.
  bool identity_holds = false;
  /// At least one of the four decisions is wrong.
  bool refutes = false;
  bool representation_checked = false;
  bool represents = false;
  std::size_t mixed_pairs = 0;
  std::size_t required = 0;
};

using audit_result = std::variant<mixed_term_certificate, mixed_term_witness>;

/// Checks whether the candidate represents f_n (k <= 5), then looks for a
/// block pair without mixed terms.  Throws precondition_error unless the
/// candidate is positive with degree at most 2.
audit_result mixed_term_audit( threshold_ptf const& candidate, separation_instance const& inst );

} // namespace ptfc
