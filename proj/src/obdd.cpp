#include "ptfc/obdd.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

#include "ptfc/errors.hpp"

namespace ptfc
{

/* ---------------------------------------------------------------- schedule */

ptf_schedule::ptf_schedule( integer_form const& p, separator_sequence const& seq )
    : n_( p.num_vars ), seq_( seq ), constant_( p.constant )
{
  if ( seq.num_vertices() != n_ || static_cast<int>( seq.separators.size() ) != n_ + 1 )
    throw input_error( "ordering does not match the polynomial's " + std::to_string( n_ ) + " variables" );
  std::vector<int> position( n_, -1 );
  for ( int l = 0; l < n_; ++l )
  {
    int const v = seq.ordering[l];
    if ( v < 0 || v >= n_ || position[v] >= 0 )
      throw input_error( "ordering is not a permutation" );
    position[v] = l;
  }
  for ( auto const& s : seq.separators )
    if ( s.size() > 62 )
      throw capability_error( "separator of size " + std::to_string( s.size() ) + " exceeds 62 variables" );

  auto bit_of = [&]( int l, int v ) {
    auto const& s = seq_.separators[l];
    auto it = std::find( s.begin(), s.end(), v );
    return it == s.end() ? -1 : static_cast<int>( it - s.begin() );
  };

  completed_.assign( n_, {} );
  for ( auto const& [t, c] : p.terms )
  {
    int last = t.front();
    for ( int v : t )
      if ( position[v] > position[last] )
        last = v;
    int const l = position[last];
    std::uint64_t mask = 0;
    for ( int v : t )
    {
      if ( v == last )
        continue;
      int const bit = bit_of( l, v );
      if ( bit < 0 )
        throw input_error( "separator at position " + std::to_string( l ) + " misses variable " + std::to_string( v ) );
      mask |= std::uint64_t{ 1 } << bit;
    }
    completed_[l].push_back( { c, mask } );
  }

  carry_.assign( n_, {} );
  for ( int l = 0; l < n_; ++l )
  {
    for ( int w : seq_.separators[l + 1] )
    {
      if ( w == seq_.ordering[l] )
      {
        carry_[l].push_back( -1 );
        continue;
      }
      int const bit = bit_of( l, w );
      if ( bit < 0 )
        throw input_error( "separator sequence is inconsistent at position " + std::to_string( l ) );
      carry_[l].push_back( bit );
    }
  }

  rem_min_.assign( n_ + 1, 0 );
  rem_max_.assign( n_ + 1, 0 );
  for ( int l = n_ - 1; l >= 0; --l )
  {
    rem_min_[l] = rem_min_[l + 1];
    rem_max_[l] = rem_max_[l + 1];
    for ( auto const& t : completed_[l] )
      ( t.coeff < 0 ? rem_min_[l] : rem_max_[l] ) += t.coeff;
  }
}

int128 ptf_schedule::delta( int l, std::uint64_t b, int x ) const
{
  if ( !x )
    return 0;
  int128 sum = 0;
  for ( auto const& t : completed_[l] )
    if ( ( b & t.mask ) == t.mask )
      sum += t.coeff;
  return sum;
}

std::uint64_t ptf_schedule::next_bits( int l, std::uint64_t b, int x ) const
{
  std::uint64_t out = 0;
  auto const& carry = carry_[l];
  for ( std::size_t j = 0; j < carry.size(); ++j )
  {
    bool const bit = carry[j] < 0 ? x != 0 : ( ( b >> carry[j] ) & 1u ) != 0;
    if ( bit )
      out |= std::uint64_t{ 1 } << j;
  }
  return out;
}

/* -------------------------------------------------------------------- obdd */

obdd::obdd( int n, std::vector<int> ordering, std::vector<obdd_node> nodes, int start, bool layered )
    : n_( n ), ordering_( std::move( ordering ) ), nodes_( std::move( nodes ) ), start_( start ), layered_( layered )
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
  int const total = static_cast<int>( nodes_.size() );
  int sinks[2] = { 0, 0 };
  for ( int id = 0; id < total; ++id )
  {
    auto const& u = nodes_[id];
    std::string const where = "node " + std::to_string( id ) + ": ";
    if ( u.is_sink() )
    {
      if ( u.sink > 1 || u.layer != n_ )
        throw input_error( where + "sinks must be labelled 0/1 and sit on layer n" );
      ++sinks[u.sink];
      continue;
    }
    if ( u.layer < 0 || u.layer >= n_ || u.var != ordering_[u.layer] )
      throw input_error( where + "variable does not match its layer" );
    for ( int child : { u.lo, u.hi } )
    {
      if ( child < 0 || child >= total )
        throw input_error( where + "edge to unknown node" );
      int const cl = nodes_[child].layer;
      if ( cl <= u.layer || ( layered_ && cl != u.layer + 1 ) )
        throw input_error( where + "edge does not go to a later layer" + ( layered_ ? std::string( " (layered form)" ) : "" ) );
    }
  }
  if ( sinks[0] != 1 || sinks[1] != 1 )
    throw input_error( "diagram must have exactly one 0-sink and one 1-sink" );
  if ( start_ < 0 || start_ >= total )
    throw input_error( "start node out of range" );
  if ( layered_ && nodes_[start_].layer != 0 )
    throw input_error( "layered diagram must start on layer 0" );
}

std::vector<int> obdd::layer_sizes() const
{
  std::vector<int> sizes( n_ + 1, 0 );
  for ( auto const& u : nodes_ )
    ++sizes[u.layer];
  return sizes;
}

int obdd::width() const
{
  auto sizes = layer_sizes();
  if ( n_ == 0 )
    return 0;
  return *std::max_element( sizes.begin(), sizes.end() - 1 );
}

bool obdd::evaluate( assignment const& a ) const
{
  if ( static_cast<int>( a.size() ) != n_ )
    throw input_error( "assignment has " + std::to_string( a.size() ) + " bits, diagram has " + std::to_string( n_ ) + " variables" );
  int u = start_;
  while ( !nodes_[u].is_sink() )
    u = a[nodes_[u].var] ? nodes_[u].hi : nodes_[u].lo;
  return nodes_[u].sink == 1;
}

obdd obdd::constant( int n, std::vector<int> ordering, bool value )
{
  std::vector<obdd_node> nodes;
  for ( int l = 0; l < n; ++l )
    nodes.push_back( { l, ordering.at( l ), l + 1, l + 1, -1 } );
  /* the chain ends in the sink with the requested value */
  obdd_node const s0{ n, -1, -1, -1, 0 }, s1{ n, -1, -1, -1, 1 };
  if ( value )
  {
    nodes.push_back( s1 );
    nodes.push_back( s0 );
  }
  else
  {
    nodes.push_back( s0 );
    nodes.push_back( s1 );
  }
  return obdd( n, std::move( ordering ), std::move( nodes ), 0, true );
}

namespace
{

std::pair<int, int> sink_ids( std::vector<obdd_node> const& nodes )
{
  int s0 = -1, s1 = -1;
  for ( int id = 0; id < static_cast<int>( nodes.size() ); ++id )
  {
    if ( nodes[id].sink == 0 )
      s0 = id;
    else if ( nodes[id].sink == 1 )
      s1 = id;
  }
  return { s0, s1 };
}

/* Renumbers the nodes reachable from rep[start] after redirecting every edge
 * through rep.  Non-sinks are numbered by layer, in discovery order (lo before
 * hi); the two sinks come last. */
obdd rebuild( obdd const& d, std::vector<int> const& rep, bool layered )
{
  auto const& old = d.nodes();
  int const n = d.num_vars();
  auto const [s0, s1] = sink_ids( old );
  std::vector<std::vector<int>> buckets( n + 1 );
  std::vector<int> fresh( old.size(), -1 );
  std::vector<bool> queued( old.size(), false );

  int const root = rep[d.start()];
  if ( !old[root].is_sink() )
  {
    buckets[old[root].layer].push_back( root );
    queued[root] = true;
  }
  for ( int l = 0; l < n; ++l )
  {
    for ( std::size_t i = 0; i < buckets[l].size(); ++i )
    {
      auto const& u = old[buckets[l][i]];
      for ( int child : { rep[u.lo], rep[u.hi] } )
      {
        if ( !queued[child] && !old[child].is_sink() )
        {
          queued[child] = true;
          buckets[old[child].layer].push_back( child );
        }
      }
    }
  }

  int next = 0;
  for ( auto const& bucket : buckets )
    for ( int id : bucket )
      fresh[id] = next++;
  fresh[s0] = next++;
  fresh[s1] = next++;

  std::vector<obdd_node> nodes( next );
  for ( std::size_t id = 0; id < old.size(); ++id )
  {
    if ( fresh[id] < 0 )
      continue;
    auto u = old[id];
    if ( !u.is_sink() )
    {
      u.lo = fresh[rep[u.lo]];
      u.hi = fresh[rep[u.hi]];
    }
    nodes[fresh[id]] = u;
  }
  return obdd( n, d.ordering(), std::move( nodes ), fresh[root], layered );
}

/* node ids sorted by decreasing layer */
std::vector<int> bottom_up( obdd const& d )
{
  std::vector<int> ids( d.size() );
  for ( std::size_t i = 0; i < ids.size(); ++i )
    ids[i] = static_cast<int>( i );
  std::stable_sort( ids.begin(), ids.end(), [&]( int a, int b ) { return d.node( a ).layer > d.node( b ).layer; } );
  return ids;
}

struct state_key
{
  int128 s;
  std::uint64_t b;
  int decided;

  bool operator==( state_key const& o ) const noexcept { return s == o.s && b == o.b && decided == o.decided; }
};

struct state_hash
{
  std::size_t operator()( state_key const& k ) const noexcept
  {
    auto const lo = static_cast<std::uint64_t>( k.s );
    auto const hi = static_cast<std::uint64_t>( k.s >> 64 );
    std::uint64_t h = lo * 0x9e3779b97f4a7c15ull;
    h ^= ( hi + 0x632be59bd9b4e019ull + ( h << 6 ) + ( h >> 2 ) );
    h ^= ( k.b + 0x94d049bb133111ebull + ( h << 6 ) + ( h >> 2 ) );
    return static_cast<std::size_t>( h ^ static_cast<std::uint64_t>( k.decided + 1 ) );
  }
};

} // namespace

obdd build_exact_obdd( ptf const& p, separator_sequence const& seq, exact_obdd_options const& options )
{
  ptf const base = p.domain() == encoding::zero_one ? p : convert_domain( p, encoding::zero_one );
  ptf_schedule const sch( to_integer_form( base.poly() ), seq );
  int const n = sch.num_vars();

  auto settle = [&]( int l, int128 s, std::uint64_t b ) -> state_key {
    if ( s + sch.remaining_min( l ) >= 0 )
      return { 0, 0, 1 };
    if ( s + sch.remaining_max( l ) < 0 )
      return { 0, 0, 0 };
    return { s, b, -1 };
  };

  std::vector<std::vector<state_key>> layers( n + 1 );
  std::vector<std::vector<std::pair<int, int>>> edges( n );
  layers[0].push_back( settle( 0, sch.initial_sum(), 0 ) );
  std::size_t created = 1;

  for ( int l = 0; l < n; ++l )
  {
    std::unordered_map<state_key, int, state_hash> index;
    auto& next = layers[l + 1];
    auto lookup = [&]( state_key const& k ) {
      auto [it, inserted] = index.try_emplace( k, static_cast<int>( next.size() ) );
      if ( inserted )
      {
        next.push_back( k );
        if ( ++created > options.node_budget )
          throw capability_error( "node budget of " + std::to_string( options.node_budget ) + " exceeded at layer " + std::to_string( l + 1 ) );
      }
      return it->second;
    };

    for ( auto const& st : layers[l] )
    {
      int child[2];
      for ( int x = 0; x < 2; ++x )
      {
        if ( st.decided >= 0 )
          child[x] = lookup( st );
        else
          child[x] = lookup( settle( l + 1, st.s + sch.delta( l, st.b, x ), sch.next_bits( l, st.b, x ) ) );
      }
      edges[l].emplace_back( child[0], child[1] );
    }

    /* (s, b) states are bounded by (distinct s) * 2^|S| */
    std::set<int128> sums;
    std::size_t open = 0;
    for ( auto const& st : next )
      if ( st.decided < 0 )
      {
        sums.insert( st.s );
        ++open;
      }
    if ( sch.separator( l + 1 ).size() < 63 && open > sums.size() << sch.separator( l + 1 ).size() )
      throw std::logic_error( "layer " + std::to_string( l + 1 ) + " exceeds the (s, b) state bound" );
  }

  /* layer n holds decided states only; both sinks are emitted regardless */
  std::vector<int> offset( n + 2, 0 );
  for ( int l = 0; l < n; ++l )
    offset[l + 1] = offset[l] + static_cast<int>( layers[l].size() );
  int const sink_base = offset[n];
  std::vector<obdd_node> nodes;
  nodes.reserve( sink_base + 2 );
  for ( int l = 0; l < n; ++l )
  {
    for ( std::size_t i = 0; i < layers[l].size(); ++i )
    {
      auto [lo, hi] = edges[l][i];
      auto target = [&]( int local ) { return l + 1 == n ? sink_base + layers[n][local].decided : offset[l + 1] + local; };
      nodes.push_back( { l, sch.ordering()[l], target( lo ), target( hi ), -1 } );
    }
  }
  nodes.push_back( { n, -1, -1, -1, 0 } );
  nodes.push_back( { n, -1, -1, -1, 1 } );
  int const start = n == 0 ? sink_base + layers[0][0].decided : 0;

  obdd d( n, sch.ordering(), std::move( nodes ), start, true );
  return options.minimize ? minimize( d ) : d;
}

obdd minimize( obdd const& d )
{
  if ( !d.layered() )
    throw input_error( "minimize expects a layered diagram" );
  std::vector<int> rep( d.size() );
  std::map<std::pair<int, int>, int> unique;
  int current_layer = -1;
  for ( int id : bottom_up( d ) )
  {
    auto const& u = d.node( id );
    if ( u.is_sink() )
    {
      rep[id] = id;
      continue;
    }
    if ( u.layer != current_layer )
    {
      unique.clear();
      current_layer = u.layer;
    }
    auto [it, inserted] = unique.try_emplace( { rep[u.lo], rep[u.hi] }, id );
    rep[id] = it->second;
  }
  return rebuild( d, rep, true );
}

obdd reduce( obdd const& d )
{
  std::vector<int> rep( d.size() );
  std::map<std::tuple<int, int, int>, int> unique;
  for ( int id : bottom_up( d ) )
  {
    auto const& u = d.node( id );
    if ( u.is_sink() )
    {
      rep[id] = id;
      continue;
    }
    int const lo = rep[u.lo], hi = rep[u.hi];
    if ( lo == hi )
    {
      rep[id] = lo;
      continue;
    }
    auto [it, inserted] = unique.try_emplace( { u.var, lo, hi }, id );
    rep[id] = it->second;
  }
  return rebuild( d, rep, false );
}

bool is_reduced( obdd const& d )
{
  std::set<std::tuple<int, int, int>> seen;
  for ( auto const& u : d.nodes() )
  {
    if ( u.is_sink() )
      continue;
    if ( u.lo == u.hi || !seen.insert( { u.var, u.lo, u.hi } ).second )
      return false;
  }
  return true;
}

bool isomorphic( obdd const& a, obdd const& b )
{
  if ( a.num_vars() != b.num_vars() || a.ordering() != b.ordering() )
    return false;
  std::vector<int> ab( a.size(), -1 ), ba( b.size(), -1 );
  std::vector<std::pair<int, int>> stack{ { a.start(), b.start() } };
  while ( !stack.empty() )
  {
    auto [u, v] = stack.back();
    stack.pop_back();
    if ( ab[u] >= 0 || ba[v] >= 0 )
    {
      if ( ab[u] != v || ba[v] != u )
        return false;
      continue;
    }
    auto const& nu = a.node( u );
    auto const& nv = b.node( v );
    if ( nu.sink != nv.sink || nu.var != nv.var || nu.layer != nv.layer )
      return false;
    ab[u] = v;
    ba[v] = u;
    if ( !nu.is_sink() )
    {
      stack.emplace_back( nu.hi, nv.hi );
      stack.emplace_back( nu.lo, nv.lo );
    }
  }
  return true;
}

integer count_models( obdd const& d )
{
  std::vector<integer> count( d.size() );
  for ( int id : bottom_up( d ) )
  {
    auto const& u = d.node( id );
    if ( u.is_sink() )
    {
      count[id] = u.sink;
      continue;
    }
    integer total = 0;
    for ( int child : { u.lo, u.hi } )
    {
      integer c = count[child];
      mpz_mul_2exp( c.get_mpz_t(), c.get_mpz_t(), d.node( child ).layer - u.layer - 1 );
      total += c;
    }
    count[id] = total;
  }
  integer out = count[d.start()];
  mpz_mul_2exp( out.get_mpz_t(), out.get_mpz_t(), d.node( d.start() ).layer );
  return out;
}

std::string export_dot( obdd const& d )
{
  std::ostringstream os;
  os << "digraph obdd {\n";
  std::vector<std::vector<int>> by_layer( d.num_vars() + 1 );
  for ( std::size_t id = 0; id < d.size(); ++id )
  {
    auto const& u = d.node( static_cast<int>( id ) );
    by_layer[u.layer].push_back( static_cast<int>( id ) );
    if ( u.is_sink() )
      os << "  n" << id << " [shape=box,label=\"" << u.sink << "\"];\n";
    else
      os << "  n" << id << " [shape=circle,label=\"x" << u.var + 1 << "\"];\n";
  }
  for ( auto const& ids : by_layer )
  {
    if ( ids.empty() )
      continue;
    os << "  { rank=same;";
    for ( int id : ids )
      os << " n" << id << ";";
    os << " }\n";
  }
  for ( std::size_t id = 0; id < d.size(); ++id )
  {
    auto const& u = d.node( static_cast<int>( id ) );
    if ( u.is_sink() )
      continue;
    os << "  n" << id << " -> n" << u.lo << " [style=dashed];\n";
    os << "  n" << id << " -> n" << u.hi << ";\n";
  }
  os << "}\n";
  return os.str();
}

} // namespace ptfc
