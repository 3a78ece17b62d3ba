#include "ptfc/separation.hpp"

#include "ptfc/errors.hpp"

namespace ptfc
{

std::vector<std::pair<int, int>> separation_instance::matching() const
{
  std::vector<std::pair<int, int>> m;
  for ( int j = 0; j < k; ++j )
    m.emplace_back( 2 * j, 2 * j + 1 );
  return m;
}

bool slice_function( assignment const& a )
{
  if ( a.size() % 2 != 0 )
    throw input_error( "slice function needs an even number of bits" );
  std::size_t const k = a.size() / 2;
  std::size_t const weight = a.weight();
  if ( weight >= k + 1 )
    return true;
  if ( weight < k )
    return false;
  for ( std::size_t j = 0; j < k; ++j )
    if ( a[2 * j] && a[2 * j + 1] )
      return false;
  return true;
}

ptf four_variable_example()
{
  polynomial p( 4 );
  for ( int i = 0; i < 4; ++i )
    p.add( { i }, 1 );
  p.add( { 0, 1 }, -1 );
  p.add( { 2, 3 }, -1 );
  p.add( {}, -2 );
  return ptf( std::move( p ) );
}

ptf qtf_general( separation_instance const& inst )
{
  if ( inst.k < 1 )
    throw input_error( "k must be positive" );
  polynomial p( inst.num_vars() );
  for ( int i = 0; i < inst.num_vars(); ++i )
    p.add( { i }, 1 );
  for ( auto [u, v] : inst.matching() )
    p.add( { u, v }, rational( -1, inst.k ) );
  p.add( {}, -inst.k );
  return ptf( std::move( p ) );
}

threshold_ptf qtf_positive( separation_instance const& inst )
{
  if ( inst.k < 2 )
    throw input_error( "the positive representation needs k >= 2" );
  int const n = inst.num_vars();
  rational const weight( 2, inst.k * ( inst.k - 1 ) );
  polynomial p( n );
  for ( int i = 0; i < n; ++i )
    p.add( { i }, 1 );
  for ( int i = 0; i < n; ++i )
    for ( int j = i + 1; j < n; ++j )
      if ( !( i % 2 == 0 && j == i + 1 ) )
        p.add( { i, j }, weight );
  return { ptf( std::move( p ) ), rational( inst.k + 1 ) };
}

audit_result mixed_term_audit( threshold_ptf const& candidate, separation_instance const& inst )
{
  int const n = inst.num_vars();
  if ( inst.k < 2 )
    throw input_error( "the audit needs k >= 2" );
  if ( candidate.form.num_vars() != n )
    throw input_error( "candidate has " + std::to_string( candidate.form.num_vars() ) + " variables, expected " + std::to_string( n ) );
  ptf const form = candidate.form.domain() == encoding::zero_one ? candidate.form : convert_domain( candidate.form, encoding::zero_one );
  if ( !is_positive( form, candidate.threshold ) || form.poly().degree() > 2 )
    throw precondition_error( "candidate is not a positive representation of degree at most 2" );
  threshold_ptf const cand{ form, candidate.threshold };

  bool const checked = inst.k <= 5;
  bool represents = false;
  if ( checked )
  {
    represents = true;
    for ( std::uint64_t idx = 0; idx < ( std::uint64_t{ 1 } << n ) && represents; ++idx )
    {
      auto const a = assignment::from_index( n, idx );
      represents = cand.decide( a ) == slice_function( a );
    }
  }

  auto const& poly = form.poly();
  auto has_mixed = [&]( int i, int j ) {
    for ( int u : { 2 * i, 2 * i + 1 } )
      for ( int v : { 2 * j, 2 * j + 1 } )
        if ( poly.coefficient( { std::min( u, v ), std::max( u, v ) } ) != 0 )
          return true;
    return false;
  };

  std::size_t const required = static_cast<std::size_t>( inst.k ) * ( inst.k - 1 ) / 2;
  std::size_t mixed = 0;
  int missing_i = -1, missing_j = -1;
  for ( int i = 0; i < inst.k; ++i )
    for ( int j = i + 1; j < inst.k; ++j )
    {
      if ( has_mixed( i, j ) )
        ++mixed;
      else if ( missing_i < 0 )
      {
        missing_i = i;
        missing_j = j;
      }
    }

  if ( missing_i < 0 )
    return mixed_term_certificate{ mixed, required, checked, represents };

  mixed_term_witness w;
  w.block_i = missing_i;
  w.block_j = missing_j;
  w.mixed_pairs = mixed;
  w.required = required;
  w.representation_checked = checked;
  w.represents = represents;
  static constexpr int patterns[4][4] = { { 0, 0, 1, 1 }, { 1, 1, 0, 0 }, { 1, 0, 1, 0 }, { 0, 1, 0, 1 } };
  for ( int p = 0; p < 4; ++p )
  {
    assignment a( n );
    /* the other blocks get the alternating completion 0,1 */
    for ( int b = 0; b < inst.k; ++b )
      if ( b != missing_i && b != missing_j )
        a.set( 2 * b + 1, true );
    a.set( 2 * missing_i, patterns[p][0] );
    a.set( 2 * missing_i + 1, patterns[p][1] );
    a.set( 2 * missing_j, patterns[p][2] );
    a.set( 2 * missing_j + 1, patterns[p][3] );
    w.values[p] = poly.eval( a );
    w.expected[p] = slice_function( a );
    w.decided[p] = w.values[p] >= candidate.threshold;
    w.points[p] = std::move( a );
  }
  w.gamma_i = poly.coefficient( { 2 * missing_i, 2 * missing_i + 1 } );
  w.gamma_j = poly.coefficient( { 2 * missing_j, 2 * missing_j + 1 } );
  w.identity_holds = w.values[0] + w.values[1] == w.values[2] + w.values[3] + w.gamma_i + w.gamma_j;
  for ( int p = 0; p < 4; ++p )
    w.refutes = w.refutes || w.decided[p] != w.expected[p];
  return w;
}

} // namespace ptfc
