#include "ptfc/bnc.hpp"

#include <algorithm>
#include <array>
#include <random>
#include <string>

#include "ptfc/errors.hpp"

namespace ptfc
{

namespace
{

/* uniform in [0, 1) with 53 random bits; independent of the standard
   library's distribution implementations so streams are portable */
double unit_draw( std::mt19937_64& rng )
{
  return static_cast<double>( rng() >> 11 ) * 0x1.0p-53;
}

std::uint64_t index_draw( std::mt19937_64& rng, std::uint64_t count )
{
  return rng() % count;
}

/* grid points m / 2^q strictly inside (1/7,2/7) u (3/7,4/7) u (5/7,6/7) */
class interval_union_sampler
{
public:
  explicit interval_union_sampler( int q ) : q_( q )
  {
    if ( q < 4 || q > 60 )
      throw input_error( "probability precision q must be in [4, 60]" );
    integer const scale = integer( 1 ) << q;
    for ( int lo : { 1, 3, 5 } )
    {
      integer first = ( scale * lo ) / 7 + 1;
      integer last = ( scale * ( lo + 1 ) - 1 ) / 7;
      ranges_.push_back( { first.get_ui(), last.get_ui() } );
      total_ += last.get_ui() - first.get_ui() + 1;
    }
  }

  rational draw( std::mt19937_64& rng ) const
  {
    auto k = index_draw( rng, total_ );
    for ( auto const& [first, last] : ranges_ )
    {
      auto const size = last - first + 1;
      if ( k < size )
      {
        rational r( integer( static_cast<unsigned long>( first + k ) ), integer( 1 ) << q_ );
        r.canonicalize();
        return r;
      }
      k -= size;
    }
    throw std::logic_error( "interval sampler out of range" );
  }

private:
  int q_;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> ranges_;
  std::uint64_t total_ = 0;
};

bool strictly_inside_unit( rational const& p )
{
  return p > 0 && p < 1;
}

} // namespace

bnc_model::bnc_model( rational prior_c1, std::vector<bnc_node> nodes )
    : prior0_( 1 - prior_c1 ), prior1_( std::move( prior_c1 ) ), nodes_( std::move( nodes ) )
{
  prior1_.canonicalize();
  prior0_ = 1 - prior1_;
  if ( !strictly_inside_unit( prior1_ ) )
    throw precondition_error( "class prior must lie strictly inside (0, 1)" );

  int const n = num_vars();
  for ( int i = 0; i < n; ++i )
  {
    auto& node = nodes_[i];
    for ( int p : node.parents )
    {
      if ( p < 0 || p >= n )
        throw input_error( "variable " + std::to_string( i ) + " has out-of-range parent " + std::to_string( p ) );
      if ( p == i )
        throw input_error( "variable " + std::to_string( i ) + " is its own parent" );
    }
    auto sorted = node.parents;
    std::sort( sorted.begin(), sorted.end() );
    if ( std::adjacent_find( sorted.begin(), sorted.end() ) != sorted.end() )
      throw input_error( "variable " + std::to_string( i ) + " lists a parent twice" );
    if ( sorted != node.parents )
      throw input_error( "parents of variable " + std::to_string( i ) + " must be sorted" );
    if ( node.parents.size() > 20 )
      throw capability_error( "more than 20 parents on one variable" );

    std::size_t const rows = std::size_t{ 2 } << node.parents.size();
    if ( node.p1.size() != rows )
      throw input_error( "variable " + std::to_string( i ) + " needs " + std::to_string( rows ) + " CPT entries, got " + std::to_string( node.p1.size() ) );
    for ( auto& p : node.p1 )
    {
      p.canonicalize();
      if ( !strictly_inside_unit( p ) )
        throw precondition_error( "CPT entry of variable " + std::to_string( i ) + " is not strictly inside (0, 1)" );
      precision_ = std::max( { precision_, bit_length( p ), bit_length( rational( 1 - p ) ) } );
    }
    degree_ = std::max( degree_, 1 + static_cast<int>( node.parents.size() ) );
  }
  precision_ = std::max( { precision_, bit_length( prior0_ ), bit_length( prior1_ ) } );

  /* Kahn's algorithm, smallest ready index first */
  std::vector<int> missing( n );
  std::vector<std::vector<int>> children( n );
  for ( int i = 0; i < n; ++i )
  {
    missing[i] = static_cast<int>( nodes_[i].parents.size() );
    for ( int p : nodes_[i].parents )
      children[p].push_back( i );
  }
  std::vector<bool> done( n, false );
  topo_.reserve( n );
  for ( int step = 0; step < n; ++step )
  {
    int next = -1;
    for ( int i = 0; i < n; ++i )
    {
      if ( !done[i] && missing[i] == 0 )
      {
        next = i;
        break;
      }
    }
    if ( next < 0 )
      throw input_error( "parent relation contains a cycle" );
    done[next] = true;
    topo_.push_back( next );
    for ( int c : children[next] )
      --missing[c];
  }
}

std::size_t bnc_model::parent_config( int i, assignment const& a ) const
{
  std::size_t config = 0;
  auto const& ps = nodes_[i].parents;
  for ( std::size_t j = 0; j < ps.size(); ++j )
    config |= static_cast<std::size_t>( a[ps[j]] ) << j;
  return config;
}

rational const& bnc_model::p1( int i, assignment const& a, int c ) const
{
  return nodes_[i].p1[parent_config( i, a ) * 2 + c];
}

rational bnc_model::conditional( int i, int value, assignment const& a, int c ) const
{
  auto const& p = p1( i, a, c );
  return value ? p : rational( 1 - p );
}

namespace
{

void check_length( bnc_model const& m, assignment const& a )
{
  if ( static_cast<int>( a.size() ) != m.num_vars() )
    throw input_error( "assignment has " + std::to_string( a.size() ) + " bits, model has " + std::to_string( m.num_vars() ) + " variables" );
}

} // namespace

rational joint_probability( bnc_model const& m, assignment const& a, int c )
{
  check_length( m, a );
  if ( c != 0 && c != 1 )
    throw input_error( "class value must be 0 or 1" );
  rational r = m.prior( c );
  for ( int i = 0; i < m.num_vars(); ++i )
    r *= m.conditional( i, a[i], a, c );
  return r;
}

rational input_probability( bnc_model const& m, assignment const& a )
{
  return joint_probability( m, a, 0 ) + joint_probability( m, a, 1 );
}

bool classify( bnc_model const& m, assignment const& a )
{
  return joint_probability( m, a, 1 ) >= joint_probability( m, a, 0 );
}

namespace
{

std::pair<assignment, int> draw_one( bnc_model const& m, std::vector<std::vector<double>> const& table, double prior1, std::mt19937_64& rng )
{
  int const c = unit_draw( rng ) < prior1 ? 1 : 0;
  assignment a( static_cast<std::size_t>( m.num_vars() ) );
  for ( int i : m.topological_order() )
    a.set( i, unit_draw( rng ) < table[i][m.parent_config( i, a ) * 2 + c] );
  return { std::move( a ), c };
}

std::vector<std::vector<double>> double_table( bnc_model const& m )
{
  std::vector<std::vector<double>> t( m.num_vars() );
  for ( int i = 0; i < m.num_vars(); ++i )
    for ( auto const& p : m.node( i ).p1 )
      t[i].push_back( p.get_d() );
  return t;
}

} // namespace

std::pair<assignment, int> sample( bnc_model const& m, std::uint64_t seed )
{
  std::mt19937_64 rng( seed );
  return draw_one( m, double_table( m ), m.prior( 1 ).get_d(), rng );
}

std::vector<std::pair<assignment, int>> sample_many( bnc_model const& m, std::size_t count, std::uint64_t seed )
{
  std::mt19937_64 rng( seed );
  auto const table = double_table( m );
  double const prior1 = m.prior( 1 ).get_d();
  std::vector<std::pair<assignment, int>> out;
  out.reserve( count );
  for ( std::size_t k = 0; k < count; ++k )
    out.push_back( draw_one( m, table, prior1, rng ) );
  return out;
}

rational accuracy( bnc_model const& m, std::function<bool( assignment const& )> const& f, int max_vars )
{
  int const n = m.num_vars();
  if ( n > max_vars || n > 62 )
    throw capability_error( "whole-domain accuracy enumerates 2^n inputs; n = " + std::to_string( n ) + " exceeds the limit " + std::to_string( max_vars ) );
  rational total = 0;
  for ( std::uint64_t index = 0; index < ( std::uint64_t{ 1 } << n ); ++index )
  {
    auto const a = assignment::from_index( n, index );
    total += joint_probability( m, a, f( a ) ? 1 : 0 );
  }
  return total;
}

bnc_model random_tan( std::vector<int> const& forest_parent, std::uint64_t seed, int q )
{
  int const n = static_cast<int>( forest_parent.size() );
  std::vector<bnc_node> nodes( n );
  for ( int i = 0; i < n; ++i )
  {
    if ( forest_parent[i] >= 0 )
      nodes[i].parents = { forest_parent[i] };
  }
  /* the constructor rejects cycles and bad indices */
  interval_union_sampler const draw( q );
  std::mt19937_64 rng( seed );
  for ( auto& node : nodes )
  {
    node.p1.resize( std::size_t{ 2 } << node.parents.size() );
    for ( auto& p : node.p1 )
      p = draw.draw( rng );
  }
  return bnc_model( rational( 1, 2 ), std::move( nodes ) );
}

bnc_model random_bounded_treewidth( int n, int width, std::uint64_t seed, int q )
{
  if ( n < 0 || width < 0 )
    throw input_error( "n and width must be nonnegative" );
  std::mt19937_64 rng( seed );
  interval_union_sampler const draw( q );
  std::vector<bnc_node> nodes( n );
  std::vector<std::vector<int>> cliques;

  for ( int i = 0; i < n; ++i )
  {
    std::vector<int> base;
    if ( i <= width )
    {
      for ( int j = 0; j < i; ++j )
        base.push_back( j );
    }
    else
    {
      base = cliques[index_draw( rng, cliques.size() )];
    }

    for ( int v : base )
      if ( rng() & 1u )
        nodes[i].parents.push_back( v );
    std::sort( nodes[i].parents.begin(), nodes[i].parents.end() );

    if ( i == width )
    {
      /* all k-subsets of the initial (k+1)-clique {0..k} */
      for ( int drop = 0; drop <= width; ++drop )
      {
        std::vector<int> k;
        for ( int j = 0; j <= width; ++j )
          if ( j != drop )
            k.push_back( j );
        cliques.push_back( std::move( k ) );
      }
    }
    else if ( i > width )
    {
      for ( std::size_t drop = 0; drop < base.size(); ++drop )
      {
        auto k = base;
        k[drop] = i;
        std::sort( k.begin(), k.end() );
        cliques.push_back( std::move( k ) );
      }
    }
  }

  for ( auto& node : nodes )
  {
    node.p1.resize( std::size_t{ 2 } << node.parents.size() );
    for ( auto& p : node.p1 )
      p = draw.draw( rng );
  }
  return bnc_model( rational( 1, 2 ), std::move( nodes ) );
}

std::vector<int> reference_tan_forest()
{
  /* 1 -> {2,3}, 2 -> {4,5}, 3 -> {6,7}, 8 -> {9,10}, 9 -> {11,12}, 10 -> {13,14} */
  return { -1, 0, 0, 1, 1, 2, 2, -1, 7, 7, 8, 8, 9, 9 };
}

bnc_model reference_tan()
{
  /* P(X_i = 1 | parent, c) in the order (0,0) (0,1) (1,0) (1,1); roots use
     the first entry for c = 0 and the last for c = 1 */
  static constexpr std::array<std::array<int, 4>, 14> table = { {
      { 234, 0, 0, 732 },
      { 472, 164, 156, 455 },
      { 506, 203, 812, 458 },
      { 810, 202, 508, 734 },
      { 281, 759, 527, 554 },
      { 148, 453, 268, 157 },
      { 743, 470, 449, 540 },
      { 235, 0, 0, 479 },
      { 284, 535, 469, 827 },
      { 844, 471, 184, 733 },
      { 559, 471, 798, 224 },
      { 176, 790, 850, 785 },
      { 149, 163, 542, 433 },
      { 483, 220, 236, 194 },
  } };

  auto const forest = reference_tan_forest();
  std::vector<bnc_node> nodes( 14 );
  for ( int i = 0; i < 14; ++i )
  {
    auto const& row = table[i];
    if ( forest[i] < 0 )
    {
      nodes[i].p1 = { rational( row[0], 1000 ), rational( row[3], 1000 ) };
    }
    else
    {
      nodes[i].parents = { forest[i] };
      for ( int v : row )
        nodes[i].p1.emplace_back( v, 1000 );
    }
  }
  return bnc_model( rational( 1, 2 ), std::move( nodes ) );
}

} // namespace ptfc
