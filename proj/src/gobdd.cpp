#include "ptfc/gobdd.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "ptfc/errors.hpp"

namespace ptfc
{

gobdd::gobdd( int n, std::vector<int> ordering, std::vector<gobdd_node> nodes, int start )
    : n_( n ), ordering_( std::move( ordering ) ), nodes_( std::move( nodes ) ), start_( start )
{
  if ( n_ < 0 || static_cast<int>( ordering_.size() ) != n_ )
    throw input_error( "ordering length does not match n" );
  std::vector<bool> seen( n_, false );
  for ( int v : ordering_ )
  {
    if ( v < 0 || v >= n_ || seen[v] )
      throw input_error( "ordering is not a permutation" );
    seen[v] = true;
  }
  if ( nodes_.empty() )
    throw input_error( "generator diagram needs a sink" );
  int const total = static_cast<int>( nodes_.size() );
  for ( int id = 0; id < total; ++id )
  {
    auto const& u = nodes_[id];
    std::string const where = "node " + std::to_string( id ) + ": ";
    if ( id == total - 1 )
    {
      if ( u.layer != n_ || u.lo != -1 || u.hi != -1 )
        throw input_error( where + "the last node must be the sink on layer n" );
      continue;
    }
    if ( u.layer < 0 || u.layer >= n_ )
      throw input_error( where + "layer out of range" );
    if ( u.p0 > probability_one )
      throw input_error( where + "probability above one" );
    for ( int child : { u.lo, u.hi } )
      if ( child < 0 || child >= total || nodes_[child].layer != u.layer + 1 )
        throw input_error( where + "edge does not go to the next layer" );
  }
  if ( start_ < 0 || start_ >= total || nodes_[start_].layer != 0 )
    throw input_error( "start node must be on layer 0" );
}

std::vector<int> gobdd::layer_sizes() const
{
  std::vector<int> sizes( n_ + 1, 0 );
  for ( auto const& u : nodes_ )
    ++sizes[u.layer];
  return sizes;
}

int gobdd::width() const
{
  if ( n_ == 0 )
    return 0;
  auto sizes = layer_sizes();
  return *std::max_element( sizes.begin(), sizes.end() - 1 );
}

long double gobdd::prob( assignment const& a ) const
{
  if ( static_cast<int>( a.size() ) != n_ )
    throw input_error( "assignment has " + std::to_string( a.size() ) + " bits, distribution has " + std::to_string( n_ ) + " variables" );
  long double p = 1;
  int u = start_;
  for ( int l = 0; l < n_; ++l )
  {
    auto const& node = nodes_[u];
    if ( a[ordering_[l]] )
    {
      p *= node.prob1();
      u = node.hi;
    }
    else
    {
      p *= node.prob0();
      u = node.lo;
    }
  }
  return p;
}

namespace
{

assignment draw( gobdd const& d, std::mt19937_64& rng )
{
  assignment a( d.num_vars() );
  int u = d.start();
  for ( int l = 0; l < d.num_vars(); ++l )
  {
    auto const& node = d.node( u );
    /* 62 random bits compared against the fixed-point probability */
    bool const one = ( rng() >> 2 ) >= node.p0;
    a.set( d.ordering()[l], one );
    u = one ? node.hi : node.lo;
  }
  return a;
}

} // namespace

assignment gobdd::sample( std::uint64_t seed ) const
{
  std::mt19937_64 rng( seed );
  return draw( *this, rng );
}

std::vector<assignment> gobdd::sample_many( std::size_t count, std::uint64_t seed ) const
{
  std::mt19937_64 rng( seed );
  std::vector<assignment> out;
  out.reserve( count );
  for ( std::size_t k = 0; k < count; ++k )
    out.push_back( draw( *this, rng ) );
  return out;
}

gobdd gobdd::uniform( int n, std::vector<int> ordering )
{
  std::vector<rational> half( n, rational( 1, 2 ) );
  return product( std::move( ordering ), half );
}

gobdd gobdd::product( std::vector<int> ordering, std::vector<rational> const& p1 )
{
  int const n = static_cast<int>( ordering.size() );
  if ( static_cast<int>( p1.size() ) != n )
    throw input_error( "one probability per variable expected" );
  std::vector<gobdd_node> nodes;
  for ( int l = 0; l < n; ++l )
    nodes.push_back( { l, l + 1, l + 1, to_fixed_probability( 1 - p1.at( ordering.at( l ) ) ) } );
  nodes.push_back( { n, -1, -1, 0 } );
  return gobdd( n, std::move( ordering ), std::move( nodes ), 0 );
}

std::uint64_t to_fixed_probability( rational const& p )
{
  if ( p < 0 || p > 1 )
    throw input_error( "probability outside [0, 1]" );
  /* round(p * 2^62), ties up */
  integer num = p.get_num();
  mpz_mul_2exp( num.get_mpz_t(), num.get_mpz_t(), probability_bits + 1 );
  num += p.get_den();
  integer twice_den = p.get_den();
  twice_den *= 2;
  integer q;
  mpz_fdiv_q( q.get_mpz_t(), num.get_mpz_t(), twice_den.get_mpz_t() );
  return mpz_get_ui( q.get_mpz_t() );
}

namespace
{

/* Per-position conditionals P_N(x_l | S_l assignment, C = c), exact. */
struct position_table
{
  std::vector<std::uint64_t> next[2]; /* successor separator index for x */
  std::vector<rational> cond0;        /* P(x_l = 0 | sigma, c) */
};

std::vector<position_table> conditional_tables( bnc_model const& m, separator_sequence const& seq, int c )
{
  int const n = m.num_vars();
  if ( seq.num_vertices() != n || static_cast<int>( seq.separators.size() ) != n + 1 )
    throw input_error( "ordering does not match the model's " + std::to_string( n ) + " variables" );
  std::vector<int> position( n, -1 );
  for ( int l = 0; l < n; ++l )
  {
    int const v = seq.ordering[l];
    if ( v < 0 || v >= n || position[v] >= 0 )
      throw input_error( "ordering is not a permutation" );
    position[v] = l;
  }
  for ( auto const& s : seq.separators )
    if ( s.size() > 20 )
      throw capability_error( "separator of size " + std::to_string( s.size() ) + " is too large for exact conditionals" );
  if ( !seq.separators.front().empty() || !seq.separators.back().empty() )
    throw input_error( "outer separators must be empty" );

  auto bit_of = [&]( int l, int v ) {
    auto const& s = seq.separators[l];
    auto it = std::find( s.begin(), s.end(), v );
    return it == s.end() ? -1 : static_cast<int>( it - s.begin() );
  };

  /* each CPT factor is evaluated at the position of its last variable */
  struct factor
  {
    int var;
    int self_bit;                /* -1: the variable read at this position */
    std::vector<int> parent_bit; /* same convention */
  };
  std::vector<std::vector<factor>> factors( n );
  for ( int i = 0; i < n; ++i )
  {
    int last = position[i];
    for ( int p : m.parents( i ) )
      last = std::max( last, position[p] );
    int const v = seq.ordering[last];
    auto source = [&]( int w ) {
      if ( w == v )
        return -1;
      int const bit = bit_of( last, w );
      if ( bit < 0 )
        throw input_error( "ordering separators do not cover the family of variable " + std::to_string( i ) );
      return bit;
    };
    factor f{ i, source( i ), {} };
    for ( int p : m.parents( i ) )
      f.parent_bit.push_back( source( p ) );
    factors[last].push_back( std::move( f ) );
  }

  std::vector<position_table> tables( n );
  for ( int l = 0; l < n; ++l )
  {
    std::vector<int> carry;
    for ( int w : seq.separators[l + 1] )
    {
      if ( w == seq.ordering[l] )
      {
        carry.push_back( -1 );
        continue;
      }
      int const bit = bit_of( l, w );
      if ( bit < 0 )
        throw input_error( "separator sequence is inconsistent at position " + std::to_string( l ) );
      carry.push_back( bit );
    }
    std::size_t const count = std::size_t{ 1 } << seq.separators[l].size();
    for ( int x = 0; x < 2; ++x )
    {
      tables[l].next[x].resize( count );
      for ( std::uint64_t sigma = 0; sigma < count; ++sigma )
      {
        std::uint64_t out = 0;
        for ( std::size_t j = 0; j < carry.size(); ++j )
          if ( carry[j] < 0 ? x : ( sigma >> carry[j] ) & 1u )
            out |= std::uint64_t{ 1 } << j;
        tables[l].next[x][sigma] = out;
      }
    }
  }

  auto local = [&]( int l, std::uint64_t sigma, int x ) {
    rational psi = 1;
    for ( auto const& f : factors[l] )
    {
      auto bit = [&]( int b ) { return b < 0 ? x : static_cast<int>( ( sigma >> b ) & 1u ); };
      std::size_t config = 0;
      for ( std::size_t j = 0; j < f.parent_bit.size(); ++j )
        config |= static_cast<std::size_t>( bit( f.parent_bit[j] ) ) << j;
      rational const& p1 = m.node( f.var ).p1[config * 2 + c];
      psi *= bit( f.self_bit ) ? p1 : 1 - p1;
    }
    return psi;
  };

  /* backward messages: beta_l(sigma) sums the remaining factors */
  std::vector<rational> beta_next{ rational( 1 ) };
  for ( int l = n - 1; l >= 0; --l )
  {
    std::size_t const count = std::size_t{ 1 } << seq.separators[l].size();
    std::vector<rational> beta( count );
    tables[l].cond0.resize( count );
    for ( std::uint64_t sigma = 0; sigma < count; ++sigma )
    {
      rational const w0 = local( l, sigma, 0 ) * beta_next[tables[l].next[0][sigma]];
      rational const w1 = local( l, sigma, 1 ) * beta_next[tables[l].next[1][sigma]];
      beta[sigma] = w0 + w1;
      tables[l].cond0[sigma] = w0 / beta[sigma];
    }
    beta_next = std::move( beta );
  }
  return tables;
}

} // namespace

gobdd joint_gobdd( bnc_model const& m, separator_sequence const& seq, int c )
{
  if ( c != 0 && c != 1 )
    throw input_error( "class value must be 0 or 1" );
  auto const tables = conditional_tables( m, seq, c );
  int const n = m.num_vars();

  std::vector<std::vector<std::uint64_t>> layer( n + 1 );
  std::vector<std::map<std::uint64_t, int>> local( n + 1 );
  layer[0].push_back( 0 );
  local[0][0] = 0;
  for ( int l = 0; l < n; ++l )
    for ( std::uint64_t sigma : layer[l] )
      for ( int x = 0; x < 2; ++x )
      {
        std::uint64_t const nx = tables[l].next[x][sigma];
        if ( local[l + 1].try_emplace( nx, static_cast<int>( layer[l + 1].size() ) ).second )
          layer[l + 1].push_back( nx );
      }

  std::vector<int> offset( n + 1, 0 );
  for ( int l = 0; l < n; ++l )
    offset[l + 1] = offset[l] + static_cast<int>( layer[l].size() );
  std::vector<gobdd_node> nodes;
  for ( int l = 0; l < n; ++l )
    for ( std::uint64_t sigma : layer[l] )
      nodes.push_back( { l,
                         offset[l + 1] + local[l + 1].at( tables[l].next[0][sigma] ),
                         offset[l + 1] + local[l + 1].at( tables[l].next[1][sigma] ),
                         to_fixed_probability( tables[l].cond0[sigma] ) } );
  nodes.push_back( { n, -1, -1, 0 } );
  return gobdd( n, seq.ordering, std::move( nodes ), 0 );
}

gobdd approx_input_gobdd( bnc_model const& m, separator_sequence const& seq, double eps, approx_gobdd_info* info )
{
  if ( !( eps > 0 && eps < 1 ) )
    throw input_error( "epsilon must lie in (0, 1)" );
  int const n = m.num_vars();
  std::vector<position_table> tables[2] = { conditional_tables( m, seq, 0 ), conditional_tables( m, seq, 1 ) };

  /* The per-layer error is at most the accumulated drift l * step / 2 of the
   * rounded log-odds, so the total is n(n-1)/4 * step.  A 1% margin absorbs
   * floating-point and fixed-point rounding. */
  double const budget = std::log1p( eps ) * 0.99;
  double const step = n >= 2 ? 4.0 * budget / ( static_cast<double>( n ) * ( n - 1 ) ) : budget;
  if ( info )
  {
    info->epsilon = eps;
    info->grid_step = step;
    info->drift_bound = static_cast<double>( n ) * ( n - 1 ) / 4.0 * step;
  }

  long double const root_odds = std::log( static_cast<long double>( m.prior( 1 ).get_d() ) ) - std::log( static_cast<long double>( m.prior( 0 ).get_d() ) );

  /* cached long double conditionals per (layer, sigma) */
  struct edge_data
  {
    long double p[2][2]; /* [c][x] */
    long long shift[2];  /* rounded log-ratio increment in grid steps */
  };
  auto edge = [&]( int l, std::uint64_t sigma ) {
    edge_data e{};
    for ( int c = 0; c < 2; ++c )
    {
      rational const& q0 = tables[c][l].cond0[sigma];
      e.p[c][0] = q0.get_d();
      e.p[c][1] = rational( 1 - q0 ).get_d();
    }
    for ( int x = 0; x < 2; ++x )
      e.shift[x] = std::llround( ( std::log( e.p[1][x] ) - std::log( e.p[0][x] ) ) / step );
    return e;
  };

  using key = std::pair<std::uint64_t, long long>;
  std::vector<std::vector<key>> layer( n + 1 );
  std::vector<std::map<key, int>> local( n + 1 );
  layer[0].push_back( { 0, 0 } );
  local[0][{ 0, 0 }] = 0;
  std::vector<std::vector<std::pair<key, key>>> children( n );
  std::vector<std::vector<std::uint64_t>> p0( n );

  for ( int l = 0; l < n; ++l )
  {
    std::map<std::uint64_t, edge_data> cache;
    for ( auto const& [sigma, k] : layer[l] )
    {
      auto it = cache.find( sigma );
      if ( it == cache.end() )
        it = cache.emplace( sigma, edge( l, sigma ) ).first;
      auto const& e = it->second;
      long double const r = root_odds + static_cast<long double>( k ) * step;
      long double const w1 = 1.0L / ( 1.0L + std::exp( -r ) );
      long double const d0 = w1 * e.p[1][0] + ( 1.0L - w1 ) * e.p[0][0];
      auto fixed = static_cast<std::uint64_t>( std::llroundl( d0 * static_cast<long double>( probability_one ) ) );
      p0[l].push_back( std::min( fixed, probability_one ) );

      key kids[2];
      for ( int x = 0; x < 2; ++x )
      {
        kids[x] = { tables[0][l].next[x][sigma], k + e.shift[x] };
        if ( local[l + 1].try_emplace( kids[x], static_cast<int>( layer[l + 1].size() ) ).second )
          layer[l + 1].push_back( kids[x] );
      }
      children[l].emplace_back( kids[0], kids[1] );
    }
  }

  /* a single sink: every key of layer n collapses */
  std::vector<int> offset( n + 1, 0 );
  for ( int l = 0; l < n; ++l )
    offset[l + 1] = offset[l] + static_cast<int>( layer[l].size() );
  int const sink = offset[n];
  std::vector<gobdd_node> nodes;
  for ( int l = 0; l < n; ++l )
    for ( std::size_t i = 0; i < layer[l].size(); ++i )
    {
      auto target = [&]( key const& k ) { return l + 1 == n ? sink : offset[l + 1] + local[l + 1].at( k ); };
      nodes.push_back( { l, target( children[l][i].first ), target( children[l][i].second ), p0[l][i] } );
    }
  nodes.push_back( { n, -1, -1, 0 } );
  return gobdd( n, seq.ordering, std::move( nodes ), 0 );
}

long double weighted_mass( obdd const& d, gobdd const& dist )
{
  if ( d.ordering() != dist.ordering() )
    throw input_error( "diagram and distribution use different orderings" );
  int const n = d.num_vars();
  std::map<std::pair<int, int>, long double> front{ { { d.start(), dist.start() }, 1.0L } };
  for ( int l = 0; l < n; ++l )
  {
    std::map<std::pair<int, int>, long double> next;
    for ( auto const& [state, mass] : front )
    {
      auto const [u, g] = state;
      auto const& node = d.node( u );
      auto const& gn = dist.node( g );
      bool const reads = node.layer == l;
      next[{ reads ? node.lo : u, gn.lo }] += mass * gn.prob0();
      next[{ reads ? node.hi : u, gn.hi }] += mass * gn.prob1();
    }
    front = std::move( next );
  }
  long double total = 0;
  for ( auto const& [state, mass] : front )
    if ( d.node( state.first ).sink == 1 )
      total += mass;
  return total;
}

} // namespace ptfc
