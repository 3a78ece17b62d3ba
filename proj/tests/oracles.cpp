#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <regex>
#include <sstream>

namespace oracle
{

std::vector<int> bits_of( int n, std::uint64_t idx )
{
  std::vector<int> a( n );
  for ( int i = 0; i < n; ++i )
    a[i] = static_cast<int>( ( idx >> i ) & 1u );
  return a;
}

rational joint( ptfc::bnc_model const& m, std::vector<int> const& a, int c )
{
  rational p = m.prior( c );
  for ( int i = 0; i < m.num_vars(); ++i )
  {
    auto const& node = m.node( i );
    std::size_t config = 0;
    for ( std::size_t j = 0; j < node.parents.size(); ++j )
      if ( a[node.parents[j]] )
        config |= std::size_t{ 1 } << j;
    rational const& p1 = node.p1[config * 2 + c];
    p *= a[i] ? p1 : rational( 1 - p1 );
  }
  return p;
}

std::vector<long double> log_odds_coefficients( ptfc::bnc_model const& m )
{
  int const n = m.num_vars();
  std::size_t const count = std::size_t{ 1 } << n;
  std::vector<long double> value( count );
  for ( std::size_t idx = 0; idx < count; ++idx )
  {
    auto const a = bits_of( n, idx );
    long double lo = std::log( static_cast<long double>( m.prior( 1 ).get_d() ) ) - std::log( static_cast<long double>( m.prior( 0 ).get_d() ) );
    for ( int i = 0; i < n; ++i )
    {
      auto const& node = m.node( i );
      std::size_t config = 0;
      for ( std::size_t j = 0; j < node.parents.size(); ++j )
        if ( a[node.parents[j]] )
          config |= std::size_t{ 1 } << j;
      long double const q1 = node.p1[config * 2 + 1].get_d();
      long double const q0 = node.p1[config * 2].get_d();
      lo += a[i] ? std::log( q1 ) - std::log( q0 ) : std::log1p( -q1 ) - std::log1p( -q0 );
    }
    value[idx] = lo;
  }
  for ( int i = 0; i < n; ++i )
    for ( std::size_t mask = 0; mask < count; ++mask )
      if ( mask >> i & 1u )
        value[mask] -= value[mask ^ ( std::size_t{ 1 } << i )];
  return value;
}

rational eval_terms( ptfc::polynomial const& p, std::vector<int> const& a )
{
  rational sum = 0;
  for ( auto const& [t, c] : p.terms() )
  {
    bool on = true;
    for ( int v : t )
      on = on && a[v] == 1;
    if ( on )
      sum += c;
  }
  return sum;
}

int treewidth_by_permutations( ptfc::graph const& g )
{
  int const n = g.num_vertices();
  if ( n == 0 )
    return -1;
  std::vector<int> perm( n );
  std::iota( perm.begin(), perm.end(), 0 );
  int best = n;
  do
  {
    std::vector<std::vector<bool>> adj( n, std::vector<bool>( n, false ) );
    for ( auto [u, v] : g.edges() )
      adj[u][v] = adj[v][u] = true;
    std::vector<bool> gone( n, false );
    int width = 0;
    for ( int v : perm )
    {
      std::vector<int> nb;
      for ( int w = 0; w < n; ++w )
        if ( !gone[w] && adj[v][w] )
          nb.push_back( w );
      width = std::max( width, static_cast<int>( nb.size() ) );
      for ( int x : nb )
        for ( int y : nb )
          if ( x != y )
            adj[x][y] = true;
      gone[v] = true;
    }
    best = std::min( best, width );
  } while ( std::next_permutation( perm.begin(), perm.end() ) );
  return best;
}

int vertex_separation_by_permutations( ptfc::graph const& g )
{
  int const n = g.num_vertices();
  if ( n == 0 )
    return 0;
  std::vector<int> perm( n );
  std::iota( perm.begin(), perm.end(), 0 );
  int best = n;
  do
  {
    int worst = 0;
    for ( int l = 1; l < n; ++l )
    {
      int size = 0;
      for ( int i = 0; i < l; ++i )
      {
        bool crosses = false;
        for ( int j = l; j < n && !crosses; ++j )
          crosses = g.has_edge( perm[i], perm[j] );
        size += crosses;
      }
      worst = std::max( worst, size );
    }
    best = std::min( best, worst );
  } while ( std::next_permutation( perm.begin(), perm.end() ) );
  return best;
}

long double binomial_tail( int m, long long t )
{
  long double total = 0, coeff = 1;
  for ( int j = 0; j <= m; ++j )
  {
    if ( j > 0 )
      coeff = coeff * ( m - j + 1 ) / j;
    if ( j >= t )
      total += coeff;
  }
  return total / std::pow( 2.0L, m );
}

dot_summary parse_dot( std::string const& text )
{
  dot_summary s;
  std::regex const header( R"(^\s*digraph\s+\w+\s*\{\s*$)" );
  std::regex const node( R"(^\s*(n\d+)\s*\[[^\]]*label="[^"]*"[^\]]*\];\s*$)" );
  std::regex const edge( R"(^\s*n\d+\s*->\s*n\d+(\s*\[style=dashed\])?;\s*$)" );
  std::regex const rank( R"(^\s*\{\s*rank=same;(\s*n\d+;)+\s*\}\s*$)" );
  std::istringstream in( text );
  std::string line;
  bool opened = false, closed = false;
  while ( std::getline( in, line ) )
  {
    std::smatch m;
    if ( !opened )
    {
      if ( !std::regex_match( line, header ) )
        return s;
      opened = true;
    }
    else if ( line == "}" )
      closed = true;
    else if ( closed )
      return s;
    else if ( std::regex_match( line, m, edge ) )
    {
      ++s.edges;
      if ( m[1].matched )
        ++s.dashed;
    }
    else if ( std::regex_match( line, node ) )
      ++s.nodes;
    else if ( !std::regex_match( line, rank ) )
      return s;
  }
  s.well_formed = opened && closed;
  return s;
}

ptfc::polynomial random_polynomial( int n, int terms, int degree, std::mt19937_64& rng )
{
  ptfc::polynomial p( n );
  std::uniform_int_distribution<int> coeff( -5, 5 );
  std::uniform_int_distribution<int> deg( 0, degree );
  std::vector<int> vars( n );
  std::iota( vars.begin(), vars.end(), 0 );
  for ( int k = 0; k < terms; ++k )
  {
    std::shuffle( vars.begin(), vars.end(), rng );
    int const d = std::min( deg( rng ), n );
    ptfc::term t( vars.begin(), vars.begin() + d );
    int c = coeff( rng );
    if ( c == 0 )
      c = 1;
    p.add( t, rational( c, 2 ) );
  }
  return p;
}

ptfc::graph random_graph( int n, double density, std::mt19937_64& rng )
{
  ptfc::graph g( n );
  std::bernoulli_distribution edge( density );
  for ( int u = 0; u < n; ++u )
    for ( int v = u + 1; v < n; ++v )
      if ( edge( rng ) )
        g.add_edge( u, v );
  return g;
}

std::vector<int> random_forest( int n, std::mt19937_64& rng )
{
  std::vector<int> perm( n );
  std::iota( perm.begin(), perm.end(), 0 );
  std::shuffle( perm.begin(), perm.end(), rng );
  std::vector<int> parent( n, -1 );
  std::bernoulli_distribution root( 0.2 );
  for ( int k = 1; k < n; ++k )
  {
    if ( root( rng ) )
      continue;
    std::uniform_int_distribution<int> pick( 0, k - 1 );
    parent[perm[k]] = perm[pick( rng )];
  }
  return parent;
}

} // namespace oracle
