#include "ptfc/graphs.hpp"

#include <algorithm>
#include <bit>
#include <deque>
#include <limits>
#include <numeric>
#include <sstream>

#include "ptfc/errors.hpp"

namespace ptfc
{

void graph::check( int v ) const
{
  if ( v < 0 || v >= num_vertices() )
    throw input_error( "vertex " + std::to_string( v ) + " outside [0, " + std::to_string( num_vertices() ) + ")" );
}

std::size_t graph::num_edges() const
{
  std::size_t twice = 0;
  for ( auto const& a : adj_ )
    twice += a.size();
  return twice / 2;
}

void graph::add_edge( int u, int v )
{
  check( u );
  check( v );
  if ( u == v || has_edge( u, v ) )
    return;
  adj_[u].insert( std::upper_bound( adj_[u].begin(), adj_[u].end(), v ), v );
  adj_[v].insert( std::upper_bound( adj_[v].begin(), adj_[v].end(), u ), u );
}

bool graph::has_edge( int u, int v ) const
{
  check( u );
  check( v );
  return std::binary_search( adj_[u].begin(), adj_[u].end(), v );
}

std::vector<std::pair<int, int>> graph::edges() const
{
  std::vector<std::pair<int, int>> out;
  for ( int u = 0; u < num_vertices(); ++u )
    for ( int v : adj_[u] )
      if ( u < v )
        out.emplace_back( u, v );
  return out;
}

term_hypergraph hypergraph_of( polynomial const& p )
{
  term_hypergraph h;
  h.num_vertices = p.num_vars();
  for ( auto const& [t, c] : p.terms() )
    if ( !t.empty() )
      h.edges.push_back( t );
  return h;
}

graph primal_graph( term_hypergraph const& h )
{
  graph g( h.num_vertices );
  for ( auto const& e : h.edges )
  {
    if ( e.empty() )
      throw input_error( "hyperedges must be nonempty" );
    for ( std::size_t i = 0; i < e.size(); ++i )
      for ( std::size_t j = i + 1; j < e.size(); ++j )
        g.add_edge( e[i], e[j] );
  }
  return g;
}

graph moral_graph( std::vector<std::vector<int>> const& parents )
{
  int const n = static_cast<int>( parents.size() );
  graph g( n );
  std::vector<int> indegree( n, 0 );
  std::vector<std::vector<int>> children( n );
  for ( int v = 0; v < n; ++v )
  {
    for ( int p : parents[v] )
    {
      if ( p < 0 || p >= n || p == v )
        throw input_error( "invalid parent " + std::to_string( p ) + " of vertex " + std::to_string( v ) );
      g.add_edge( p, v );
      children[p].push_back( v );
      ++indegree[v];
    }
    for ( std::size_t i = 0; i < parents[v].size(); ++i )
      for ( std::size_t j = i + 1; j < parents[v].size(); ++j )
        g.add_edge( parents[v][i], parents[v][j] );
  }

  std::deque<int> ready;
  for ( int v = 0; v < n; ++v )
    if ( indegree[v] == 0 )
      ready.push_back( v );
  int seen = 0;
  while ( !ready.empty() )
  {
    int const v = ready.front();
    ready.pop_front();
    ++seen;
    for ( int c : children[v] )
      if ( --indegree[c] == 0 )
        ready.push_back( c );
  }
  if ( seen != n )
    throw input_error( "directed graph contains a cycle" );
  return g;
}

graph moral_graph( bnc_model const& m )
{
  std::vector<std::vector<int>> parents( m.num_vars() );
  for ( int i = 0; i < m.num_vars(); ++i )
    parents[i] = m.parents( i );
  return moral_graph( parents );
}

int decomposition::width() const
{
  std::size_t w = 0;
  for ( auto const& b : bags )
    w = std::max( w, b.size() );
  return static_cast<int>( w ) - 1;
}

validation_result validate( graph const& g, decomposition const& d )
{
  auto fail = []( std::string why ) { return validation_result{ false, std::move( why ) }; };
  int const n = g.num_vertices();
  int const t = static_cast<int>( d.bags.size() );
  if ( n > 0 && t == 0 )
    return fail( "no bags" );

  std::vector<std::vector<int>> tree( t );
  for ( auto [a, b] : d.tree_edges )
  {
    if ( a < 0 || b < 0 || a >= t || b >= t || a == b )
      return fail( "tree edge references an invalid bag" );
    tree[a].push_back( b );
    tree[b].push_back( a );
  }
  if ( t > 0 && static_cast<int>( d.tree_edges.size() ) != t - 1 )
    return fail( "bag graph has the wrong number of edges for a tree" );
  if ( d.kind == decomposition_kind::path )
  {
    for ( auto const& nb : tree )
      if ( nb.size() > 2 )
        return fail( "path decomposition has a bag of degree > 2" );
  }

  /* connectivity of the bag graph */
  if ( t > 0 )
  {
    std::vector<bool> seen( t, false );
    std::deque<int> queue{ 0 };
    seen[0] = true;
    int count = 1;
    while ( !queue.empty() )
    {
      int const x = queue.front();
      queue.pop_front();
      for ( int y : tree[x] )
        if ( !seen[y] )
        {
          seen[y] = true;
          ++count;
          queue.push_back( y );
        }
    }
    if ( count != t )
      return fail( "bag graph is not connected" );
  }

  std::vector<std::vector<bool>> member( t, std::vector<bool>( n, false ) );
  for ( int b = 0; b < t; ++b )
    for ( int v : d.bags[b] )
    {
      if ( v < 0 || v >= n )
        return fail( "bag contains an invalid vertex" );
      member[b][v] = true;
    }

  for ( int v = 0; v < n; ++v )
  {
    std::vector<int> holders;
    for ( int b = 0; b < t; ++b )
      if ( member[b][v] )
        holders.push_back( b );
    if ( holders.empty() )
      return fail( "vertex " + std::to_string( v ) + " is in no bag" );
    /* the holders must induce a connected subtree */
    std::vector<bool> seen( t, false );
    std::deque<int> queue{ holders.front() };
    seen[holders.front()] = true;
    std::size_t count = 1;
    while ( !queue.empty() )
    {
      int const x = queue.front();
      queue.pop_front();
      for ( int y : tree[x] )
        if ( !seen[y] && member[y][v] )
        {
          seen[y] = true;
          ++count;
          queue.push_back( y );
        }
    }
    if ( count != holders.size() )
      return fail( "bags containing vertex " + std::to_string( v ) + " are not connected" );
  }

  for ( auto [u, v] : g.edges() )
  {
    bool covered = false;
    for ( int b = 0; b < t && !covered; ++b )
      covered = member[b][u] && member[b][v];
    if ( !covered )
      return fail( "edge (" + std::to_string( u ) + "," + std::to_string( v ) + ") is not covered" );
  }
  return {};
}

namespace
{

std::vector<std::uint32_t> adjacency_masks( graph const& g )
{
  std::vector<std::uint32_t> adj( g.num_vertices(), 0 );
  for ( int v = 0; v < g.num_vertices(); ++v )
    for ( int w : g.neighbors( v ) )
      adj[v] |= std::uint32_t{ 1 } << w;
  return adj;
}

std::uint32_t neighbourhood( std::vector<std::uint32_t> const& adj, std::uint32_t set )
{
  std::uint32_t out = 0;
  while ( set )
  {
    int const v = std::countr_zero( set );
    set &= set - 1;
    out |= adj[v];
  }
  return out;
}

} // namespace

decomposition decomposition_from_elimination( graph const& g, std::vector<int> const& order )
{
  int const n = g.num_vertices();
  if ( static_cast<int>( order.size() ) != n )
    throw input_error( "elimination order must list every vertex once" );
  std::vector<int> position( n, -1 );
  for ( int i = 0; i < n; ++i )
  {
    if ( order[i] < 0 || order[i] >= n || position[order[i]] >= 0 )
      throw input_error( "elimination order must list every vertex once" );
    position[order[i]] = i;
  }

  std::vector<std::vector<bool>> adj( n, std::vector<bool>( n, false ) );
  for ( auto [u, v] : g.edges() )
    adj[u][v] = adj[v][u] = true;

  decomposition d;
  d.kind = decomposition_kind::tree;
  d.bags.resize( n );
  for ( int i = 0; i < n; ++i )
  {
    int const v = order[i];
    std::vector<int> later;
    for ( int w = 0; w < n; ++w )
      if ( adj[v][w] && position[w] > i )
        later.push_back( w );
    for ( std::size_t a = 0; a < later.size(); ++a )
      for ( std::size_t b = a + 1; b < later.size(); ++b )
        adj[later[a]][later[b]] = adj[later[b]][later[a]] = true;

    auto bag = later;
    bag.push_back( v );
    std::sort( bag.begin(), bag.end() );
    d.bags[i] = std::move( bag );

    if ( !later.empty() )
    {
      int const next = *std::min_element( later.begin(), later.end(), [&]( int a, int b ) { return position[a] < position[b]; } );
      d.tree_edges.emplace_back( i, position[next] );
    }
    else if ( i + 1 < n )
    {
      d.tree_edges.emplace_back( i, i + 1 );
    }
  }
  return d;
}

treewidth_result treewidth_exact( graph const& g, int max_vertices )
{
  int const n = g.num_vertices();
  if ( n > max_vertices || n > 24 )
    throw capability_error( "exact tree-width is limited to " + std::to_string( max_vertices ) + " vertices" );
  if ( n == 0 )
    return { -1, {} };

  auto const adj = adjacency_masks( g );
  std::uint32_t const all = ( n == 32 ) ? ~0u : ( ( 1u << n ) - 1 );
  std::vector<std::int8_t> best( std::size_t{ 1 } << n, 0 );
  std::vector<std::int8_t> choice( std::size_t{ 1 } << n, -1 );
  best[0] = -1;

  for ( std::uint32_t set = 1; set <= all; ++set )
  {
    int value = std::numeric_limits<int>::max();
    int pick = -1;
    for ( std::uint32_t rest = set; rest; rest &= rest - 1 )
    {
      int const v = std::countr_zero( rest );
      std::uint32_t const before = set & ~( 1u << v );
      if ( best[before] >= value )
        continue;
      /* vertices outside `before` reachable from v through `before` */
      std::uint32_t reach = adj[v] & before;
      std::uint32_t frontier = reach;
      while ( frontier )
      {
        std::uint32_t const next = neighbourhood( adj, frontier ) & before & ~reach;
        reach |= next;
        frontier = next;
      }
      std::uint32_t const q = ( adj[v] | neighbourhood( adj, reach ) ) & ~before & ~( 1u << v );
      int const cost = std::max<int>( best[before], std::popcount( q ) );
      if ( cost < value )
      {
        value = cost;
        pick = v;
      }
    }
    best[set] = static_cast<std::int8_t>( value );
    choice[set] = static_cast<std::int8_t>( pick );
  }

  std::vector<int> order;
  for ( std::uint32_t set = all; set; set &= ~( 1u << choice[set] ) )
    order.push_back( choice[set] );
  std::reverse( order.begin(), order.end() );

  treewidth_result out;
  out.width = best[all];
  out.witness = decomposition_from_elimination( g, order );
  return out;
}

int separator_sequence::value() const
{
  std::size_t best = 0;
  for ( std::size_t l = 0; l + 1 < separators.size(); ++l )
    best = std::max( best, separators[l].size() );
  return static_cast<int>( best );
}

separator_sequence make_separator_sequence( graph const& g, std::vector<int> ordering )
{
  int const n = g.num_vertices();
  if ( static_cast<int>( ordering.size() ) != n )
    throw input_error( "ordering has " + std::to_string( ordering.size() ) + " entries for " + std::to_string( n ) + " vertices" );
  std::vector<int> position( n, -1 );
  for ( int i = 0; i < n; ++i )
  {
    int const v = ordering[i];
    if ( v < 0 || v >= n || position[v] >= 0 )
      throw input_error( "ordering is not a permutation of the vertices" );
    position[v] = i;
  }

  separator_sequence s;
  s.separators.assign( n + 1, {} );
  for ( int u = 0; u < n; ++u )
  {
    int last = position[u];
    for ( int w : g.neighbors( u ) )
      last = std::max( last, position[w] );
    for ( int l = position[u] + 1; l <= last; ++l )
      s.separators[l].push_back( u );
  }
  s.ordering = std::move( ordering );
  return s;
}

decomposition path_decomposition( separator_sequence const& s )
{
  decomposition d;
  d.kind = decomposition_kind::path;
  int const n = s.num_vertices();
  for ( int l = 0; l < n; ++l )
  {
    auto bag = s.separators[l];
    bag.push_back( s.ordering[l] );
    std::sort( bag.begin(), bag.end() );
    d.bags.push_back( std::move( bag ) );
    if ( l > 0 )
      d.tree_edges.emplace_back( l - 1, l );
  }
  return d;
}

pathwidth_result pathwidth_exact( graph const& g, int max_vertices )
{
  int const n = g.num_vertices();
  if ( n > max_vertices || n > 24 )
    throw capability_error( "exact path-width is limited to " + std::to_string( max_vertices ) + " vertices" );
  if ( n == 0 )
    return { 0, make_separator_sequence( g, {} ) };

  auto const adj = adjacency_masks( g );
  std::uint32_t const all = ( 1u << n ) - 1;
  std::vector<std::int8_t> best( std::size_t{ 1 } << n, 0 );
  std::vector<std::int8_t> choice( std::size_t{ 1 } << n, -1 );

  for ( std::uint32_t set = 1; set <= all; ++set )
  {
    int boundary = 0;
    if ( set != all )
    {
      for ( std::uint32_t rest = set; rest; rest &= rest - 1 )
        if ( adj[std::countr_zero( rest )] & ~set )
          ++boundary;
    }
    int value = std::numeric_limits<int>::max();
    int pick = -1;
    for ( std::uint32_t rest = set; rest; rest &= rest - 1 )
    {
      int const v = std::countr_zero( rest );
      int const cost = std::max<int>( best[set & ~( 1u << v )], boundary );
      if ( cost < value )
      {
        value = cost;
        pick = v;
      }
    }
    best[set] = static_cast<std::int8_t>( value );
    choice[set] = static_cast<std::int8_t>( pick );
  }

  std::vector<int> order;
  for ( std::uint32_t set = all; set; set &= ~( 1u << choice[set] ) )
    order.push_back( choice[set] );
  std::reverse( order.begin(), order.end() );

  pathwidth_result out;
  out.witness = make_separator_sequence( g, std::move( order ) );
  out.width = out.witness.value();
  return out;
}

treewidth_result pathwidth_by_decomposition( graph const& g, int max_vertices )
{
  int const n = g.num_vertices();
  if ( n > max_vertices || n > 12 )
    throw capability_error( "path-decomposition search is limited to " + std::to_string( max_vertices ) + " vertices" );
  if ( n == 0 )
    return { -1, { decomposition_kind::path, {}, {} } };

  auto const adj = adjacency_masks( g );
  std::uint32_t const all = ( 1u << n ) - 1;
  auto key = [n]( std::uint32_t forgotten, std::uint32_t bag ) { return forgotten | ( bag << n ); };

  for ( int width = 0; width < n; ++width )
  {
    std::vector<std::int32_t> parent( std::size_t{ 1 } << ( 2 * n ), -2 );
    std::deque<std::uint32_t> queue{ key( 0, 0 ) };
    parent[key( 0, 0 )] = -1;
    std::uint32_t goal = key( all, 0 );
    bool found = false;
    while ( !queue.empty() && !found )
    {
      std::uint32_t const state = queue.front();
      queue.pop_front();
      std::uint32_t const forgotten = state & all;
      std::uint32_t const bag = state >> n;
      auto push = [&]( std::uint32_t next ) {
        if ( parent[next] == -2 )
        {
          parent[next] = static_cast<std::int32_t>( state );
          queue.push_back( next );
          found = found || next == goal;
        }
      };
      for ( int v = 0; v < n; ++v )
      {
        std::uint32_t const bit = 1u << v;
        if ( bag & bit )
        {
          if ( ( adj[v] & ~( forgotten | bag ) ) == 0 )
            push( key( forgotten | bit, bag & ~bit ) );
        }
        else if ( !( forgotten & bit ) && std::popcount( bag ) < width + 1 )
        {
          push( key( forgotten, bag | bit ) );
        }
      }
    }
    if ( !found )
      continue;

    /* bags are the states right after each introduce step */
    std::vector<std::uint32_t> path;
    for ( std::int32_t s = static_cast<std::int32_t>( goal ); s >= 0; s = parent[s] )
      path.push_back( static_cast<std::uint32_t>( s ) );
    std::reverse( path.begin(), path.end() );

    decomposition d;
    d.kind = decomposition_kind::path;
    for ( std::size_t i = 1; i < path.size(); ++i )
    {
      std::uint32_t const prev_bag = path[i - 1] >> n;
      std::uint32_t const bag = path[i] >> n;
      if ( std::popcount( bag ) > std::popcount( prev_bag ) )
      {
        std::vector<int> b;
        for ( int v = 0; v < n; ++v )
          if ( bag >> v & 1u )
            b.push_back( v );
        if ( !d.bags.empty() )
          d.tree_edges.emplace_back( static_cast<int>( d.bags.size() ) - 1, static_cast<int>( d.bags.size() ) );
        d.bags.push_back( std::move( b ) );
      }
    }
    return { width, std::move( d ) };
  }
  throw std::logic_error( "path-decomposition search found no decomposition" );
}

namespace
{

std::vector<int> greedy_layout( graph const& g, int start )
{
  int const n = g.num_vertices();
  std::vector<bool> placed( n, false );
  std::vector<int> unplaced_neighbours( n );
  for ( int v = 0; v < n; ++v )
    unplaced_neighbours[v] = static_cast<int>( g.neighbors( v ).size() );
  int boundary = 0;
  std::vector<int> order;
  order.reserve( n );

  auto place = [&]( int v ) {
    placed[v] = true;
    order.push_back( v );
    if ( unplaced_neighbours[v] > 0 )
      ++boundary;
    for ( int w : g.neighbors( v ) )
    {
      if ( --unplaced_neighbours[w] == 0 && placed[w] )
        --boundary;
    }
  };

  place( start );
  while ( static_cast<int>( order.size() ) < n )
  {
    int best = -1;
    std::pair<int, int> best_cost{ std::numeric_limits<int>::max(), 0 };
    for ( int v = 0; v < n; ++v )
    {
      if ( placed[v] )
        continue;
      int delta = unplaced_neighbours[v] > 0 ? 1 : 0;
      for ( int w : g.neighbors( v ) )
        if ( placed[w] && unplaced_neighbours[w] == 1 )
          --delta;
      std::pair<int, int> const cost{ boundary + delta, unplaced_neighbours[v] };
      if ( cost < best_cost )
      {
        best_cost = cost;
        best = v;
      }
    }
    place( best );
  }
  return order;
}

/* min-fill (or min-degree) elimination order */
std::vector<int> elimination_order( graph const& g, bool min_fill )
{
  int const n = g.num_vertices();
  std::vector<std::vector<bool>> adj( n, std::vector<bool>( n, false ) );
  for ( auto [u, v] : g.edges() )
    adj[u][v] = adj[v][u] = true;
  std::vector<bool> gone( n, false );
  std::vector<int> order;
  for ( int step = 0; step < n; ++step )
  {
    int best = -1;
    long best_cost = std::numeric_limits<long>::max();
    for ( int v = 0; v < n; ++v )
    {
      if ( gone[v] )
        continue;
      std::vector<int> nb;
      for ( int w = 0; w < n; ++w )
        if ( !gone[w] && adj[v][w] )
          nb.push_back( w );
      long cost = static_cast<long>( nb.size() );
      if ( min_fill )
      {
        cost = 0;
        for ( std::size_t a = 0; a < nb.size(); ++a )
          for ( std::size_t b = a + 1; b < nb.size(); ++b )
            if ( !adj[nb[a]][nb[b]] )
              ++cost;
      }
      if ( cost < best_cost )
      {
        best_cost = cost;
        best = v;
      }
    }
    std::vector<int> nb;
    for ( int w = 0; w < n; ++w )
      if ( !gone[w] && adj[best][w] )
        nb.push_back( w );
    for ( std::size_t a = 0; a < nb.size(); ++a )
      for ( std::size_t b = a + 1; b < nb.size(); ++b )
        adj[nb[a]][nb[b]] = adj[nb[b]][nb[a]] = true;
    gone[best] = true;
    order.push_back( best );
  }
  return order;
}

} // namespace

separator_sequence heuristic_ordering( graph const& g )
{
  int const n = g.num_vertices();
  if ( n == 0 )
    return make_separator_sequence( g, {} );

  std::vector<std::vector<int>> candidates;
  std::vector<int> starts( n );
  std::iota( starts.begin(), starts.end(), 0 );
  if ( n > 256 )
  {
    /* only the lowest-degree vertex for big graphs */
    starts = { *std::min_element( starts.begin(), starts.end(), [&]( int a, int b ) { return g.neighbors( a ).size() < g.neighbors( b ).size(); } ) };
  }
  for ( int s : starts )
    candidates.push_back( greedy_layout( g, s ) );
  if ( n <= 512 )
  {
    for ( bool fill : { true, false } )
    {
      auto order = elimination_order( g, fill );
      candidates.push_back( order );
      std::reverse( order.begin(), order.end() );
      candidates.push_back( std::move( order ) );
    }
  }

  separator_sequence best;
  int best_value = std::numeric_limits<int>::max();
  for ( auto& order : candidates )
  {
    auto s = make_separator_sequence( g, std::move( order ) );
    if ( s.value() < best_value )
    {
      best_value = s.value();
      best = std::move( s );
    }
  }
  return best;
}

separator_sequence best_ordering( graph const& g, int exact_limit )
{
  if ( g.num_vertices() <= exact_limit )
    return pathwidth_exact( g, exact_limit ).witness;
  return heuristic_ordering( g );
}

std::string to_dot( decomposition const& d )
{
  std::ostringstream os;
  os << "graph decomposition {\n";
  for ( std::size_t b = 0; b < d.bags.size(); ++b )
  {
    os << "  b" << b << " [label=\"{";
    for ( std::size_t i = 0; i < d.bags[b].size(); ++i )
      os << ( i ? "," : "" ) << d.bags[b][i];
    os << "}\"];\n";
  }
  for ( auto [a, b] : d.tree_edges )
    os << "  b" << a << " -- b" << b << ";\n";
  os << "}\n";
  return os.str();
}

} // namespace ptfc
