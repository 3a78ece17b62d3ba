#include "ptfc/compile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ptfc/errors.hpp"

namespace ptfc
{

namespace
{

int128 const minus_infinity = static_cast<int128>( static_cast<unsigned __int128>( 1 ) << 127 );

/* Nondecreasing step function of the partial sum: value a[j] on [t[j], t[j+1]).
 * t[0] is minus_infinity. */
struct step_function
{
  std::vector<int128> t;
  std::vector<double> a;

  std::size_t interval( int128 s ) const
  {
    if ( s == minus_infinity )
      return 0;
    return static_cast<std::size_t>( std::upper_bound( t.begin() + 1, t.end(), s ) - t.begin() ) - 1;
  }
  double operator()( int128 s ) const { return a[interval( s )]; }
};

struct group
{
  std::uint64_t b;
  int node;
  int child[2] = { -1, -1 };
  int128 shift = 0; /* contribution of reading x = 1 */
  long double p0 = 0;
};

int128 plus( int128 s, int128 d )
{
  return s == minus_infinity ? s : s + d;
}

} // namespace

compile_result compile_with_report( bnc_model const& m, compile_params const& params )
{
  if ( !( params.epsilon > 0 && params.epsilon < 1 ) )
    throw input_error( "epsilon must lie in (0, 1)" );
  if ( params.node_budget == 0 || params.distinguished_per_layer == 0 )
    throw input_error( "budgets must be positive" );
  int const n = m.num_vars();

  compile_result out;
  auto& rep = out.report;
  rep.num_vars = n;
  rep.epsilon = params.epsilon;
  rep.gobdd_epsilon = params.epsilon / 2;
  rep.merge_tolerance = n > 0 ? params.epsilon / ( 2.0 * n ) : 0;
  rep.treewidth_bound = params.treewidth_bound;
  rep.precision = m.precision();
  rep.grid_bits = params.grid_bits;

  /* ordering and separators */
  graph const moral = moral_graph( m );
  separator_sequence const moral_seq = params.ordering ? make_separator_sequence( moral, *params.ordering ) : best_ordering( moral );
  if ( n <= 16 )
    rep.treewidth = treewidth_exact( moral ).width;
  rep.ordering = moral_seq.ordering;
  rep.moral_separation = moral_seq.value();

  out.ptf = bnc_to_ptf( m, params.grid_bits );
  graph const primal = primal_graph( hypergraph_of( out.ptf.form.poly() ) );
  separator_sequence const primal_seq = make_separator_sequence( primal, moral_seq.ordering );
  rep.primal_separation = primal_seq.value();
  ptf_schedule const sch( to_integer_form( out.ptf.form.poly() ), primal_seq );

  out.distribution = approx_input_gobdd( m, moral_seq, rep.gobdd_epsilon, &rep.gobdd );
  gobdd const& dist = out.distribution;
  rep.gobdd_nodes = dist.size();
  rep.gobdd_width = dist.width();

  /* reachable (b, GOBDD node) groups, layer by layer */
  std::vector<std::vector<group>> groups( n + 1 );
  std::vector<std::map<std::pair<std::uint64_t, int>, int>> index( n + 1 );
  groups[0].push_back( { 0, dist.start() } );
  index[0][{ 0, dist.start() }] = 0;
  for ( int l = 0; l < n; ++l )
  {
    for ( auto& g : groups[l] )
    {
      auto const& node = dist.node( g.node );
      g.p0 = node.prob0();
      g.shift = sch.delta( l, g.b, 1 );
      for ( int x = 0; x < 2; ++x )
      {
        std::pair<std::uint64_t, int> const key{ sch.next_bits( l, g.b, x ), x ? node.hi : node.lo };
        auto [it, inserted] = index[l + 1].try_emplace( key, static_cast<int>( groups[l + 1].size() ) );
        if ( inserted )
          groups[l + 1].push_back( { key.first, key.second } );
        g.child[x] = it->second;
      }
    }
  }

  /* backward pass: compressed acceptance functions per group */
  std::vector<std::vector<step_function>> fn( n + 1 );
  fn[n].assign( groups[n].size(), { { minus_infinity, 0 }, { 0.0, 1.0 } } );
  double const tol = rep.merge_tolerance;
  std::size_t total = 2;
  rep.layers.resize( n );
  for ( int l = n - 1; l >= 0; --l )
  {
    auto& stats = rep.layers[l];
    stats.layer = l;
    stats.groups = groups[l].size();
    fn[l].resize( groups[l].size() );
    for ( std::size_t gi = 0; gi < groups[l].size(); ++gi )
    {
      auto const& g = groups[l][gi];
      auto const& f0 = fn[l + 1][g.child[0]];
      auto const& f1 = fn[l + 1][g.child[1]];

      std::vector<int128> cand{ minus_infinity };
      for ( std::size_t j = 1; j < f0.t.size(); ++j )
        cand.push_back( f0.t[j] );
      for ( std::size_t j = 1; j < f1.t.size(); ++j )
        cand.push_back( f1.t[j] - g.shift );
      std::sort( cand.begin() + 1, cand.end() );
      cand.erase( std::unique( cand.begin(), cand.end() ), cand.end() );
      stats.candidates += cand.size();

      double const p0 = static_cast<double>( g.p0 );
      double const p1 = static_cast<double>( 1.0L - g.p0 );
      std::vector<double> value( cand.size() );
      for ( std::size_t j = 0; j < cand.size(); ++j )
      {
        value[j] = p0 * f0( cand[j] ) + p1 * f1( plus( cand[j], g.shift ) );
        ++rep.monotonicity_checks;
        if ( j > 0 && value[j] < value[j - 1] - 1e-12 )
        {
          std::ostringstream os;
          os << "acceptance probability decreases in s at layer " << l << ", b=" << g.b << ", GOBDD node " << g.node
             << ": " << value[j - 1] << " then " << value[j];
          throw std::logic_error( os.str() );
        }
      }

      /* keep a new node whenever acceptance grows by more than tol */
      auto& f = fn[l][gi];
      std::size_t j = 0;
      while ( j < cand.size() )
      {
        f.t.push_back( cand[j] );
        f.a.push_back( value[j] );
        auto const next = static_cast<std::size_t>( std::upper_bound( value.begin() + j, value.end(), value[j] + tol ) - value.begin() );
        stats.max_gap = std::max( stats.max_gap, value[next - 1] - value[j] );
        j = next;
      }
      stats.distinguished += f.t.size();
    }
    if ( stats.distinguished > params.distinguished_per_layer )
      throw capability_error( "layer " + std::to_string( l ) + " needs " + std::to_string( stats.distinguished ) +
                              " distinguished nodes, more than the limit of " + std::to_string( params.distinguished_per_layer ) );
    total += stats.distinguished;
    if ( total > params.node_budget )
      throw capability_error( "node budget of " + std::to_string( params.node_budget ) + " exceeded at layer " + std::to_string( l ) );
  }
  for ( auto const& s : rep.layers )
    rep.gap_sum += s.max_gap;
  rep.error_bound = ( 1 + rep.gobdd_epsilon ) * rep.gap_sum;

  /* extract the diagram reachable from the root state */
  int128 const s0 = sch.initial_sum();
  std::vector<std::vector<std::pair<int, std::size_t>>> layer_nodes( n + 1 );
  std::vector<std::map<std::pair<int, std::size_t>, int>> local( n + 1 );
  std::pair<int, std::size_t> const root{ 0, fn[0].empty() ? 0 : fn[0][0].interval( s0 ) };
  if ( n == 0 )
  {
    rep.root_acceptance = s0 >= 0 ? 1 : 0;
    out.diagram = obdd::constant( 0, {}, s0 >= 0 );
    rep.obdd_size = out.diagram.size();
    return out;
  }
  rep.root_acceptance = fn[0][0].a[root.second];
  layer_nodes[0].push_back( root );
  local[0][root] = 0;
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> kids( n );
  for ( int l = 0; l < n; ++l )
  {
    for ( auto const& [gi, j] : layer_nodes[l] )
    {
      auto const& g = groups[l][gi];
      int128 const t = fn[l][gi].t[j];
      std::size_t child[2];
      for ( int x = 0; x < 2; ++x )
      {
        int const cg = g.child[x];
        std::pair<int, std::size_t> const key{ cg, fn[l + 1][cg].interval( x ? plus( t, g.shift ) : t ) };
        auto [it, inserted] = local[l + 1].try_emplace( key, static_cast<int>( layer_nodes[l + 1].size() ) );
        if ( inserted )
          layer_nodes[l + 1].push_back( key );
        child[x] = static_cast<std::size_t>( it->second );
      }
      kids[l].emplace_back( child[0], child[1] );
    }
    rep.layers[l].obdd_nodes = layer_nodes[l].size();
  }

  std::vector<int> offset( n + 1, 0 );
  for ( int l = 0; l < n; ++l )
    offset[l + 1] = offset[l] + static_cast<int>( layer_nodes[l].size() );
  int const sink_base = offset[n];
  std::vector<obdd_node> nodes;
  for ( int l = 0; l < n; ++l )
  {
    for ( std::size_t i = 0; i < layer_nodes[l].size(); ++i )
    {
      auto target = [&]( std::size_t local_id ) {
        if ( l + 1 < n )
          return offset[l + 1] + static_cast<int>( local_id );
        auto const [gi, j] = layer_nodes[n][local_id];
        return sink_base + ( fn[n][gi].a[j] > 0.5 ? 1 : 0 );
      };
      nodes.push_back( { l, moral_seq.ordering[l], target( kids[l][i].first ), target( kids[l][i].second ), -1 } );
    }
  }
  nodes.push_back( { n, -1, -1, -1, 0 } );
  nodes.push_back( { n, -1, -1, -1, 1 } );
  out.diagram = minimize( obdd( n, moral_seq.ordering, std::move( nodes ), 0, true ) );
  rep.obdd_size = out.diagram.size();
  rep.obdd_width = out.diagram.width();
  return out;
}

obdd compile( bnc_model const& m, compile_params const& params )
{
  return compile_with_report( m, params ).diagram;
}

acceptance_table::acceptance_table( ptf const& p, separator_sequence const& seq, gobdd const& d )
    : schedule_( to_integer_form( ( p.domain() == encoding::zero_one ? p : convert_domain( p, encoding::zero_one ) ).poly() ), seq ),
      dist_( &d )
{
  if ( d.ordering() != seq.ordering )
    throw input_error( "distribution and separator sequence use different orderings" );
}

long double acceptance_table::alpha( int layer, int128 s, std::uint64_t b, int node )
{
  if ( layer == schedule_.num_vars() )
    return s >= 0 ? 1.0L : 0.0L;
  auto const key = std::make_tuple( layer, s, b, node );
  if ( auto it = memo_.find( key ); it != memo_.end() )
    return it->second;
  auto const& u = dist_->node( node );
  long double const value =
      u.prob0() * alpha( layer + 1, s, schedule_.next_bits( layer, b, 0 ), u.lo ) +
      u.prob1() * alpha( layer + 1, s + schedule_.delta( layer, b, 1 ), schedule_.next_bits( layer, b, 1 ), u.hi );
  memo_.emplace( key, value );
  return value;
}

long double acceptance_table::root()
{
  return alpha( 0, schedule_.initial_sum(), 0, dist_->start() );
}

verification_report verify_compilation( bnc_model const& m, obdd const& g, error_metric metric, double epsilon, gobdd const* dist, int max_vars )
{
  int const n = m.num_vars();
  if ( n > max_vars || n > 30 )
    throw capability_error( "exhaustive verification is limited to " + std::to_string( max_vars ) + " variables" );
  if ( g.num_vars() != n || ( dist && dist->num_vars() != n ) )
    throw input_error( "diagram and model disagree on the number of variables" );

  verification_report r;
  r.num_vars = n;
  r.metric = metric;
  r.epsilon = epsilon;
  r.sandwich_checked = dist != nullptr;
  rational accepted_g = 0, accepted_f = 0;
  std::uint64_t const count = std::uint64_t{ 1 } << n;
  r.assignments = count;
  for ( std::uint64_t idx = 0; idx < count; ++idx )
  {
    auto const a = assignment::from_index( n, idx );
    rational const j1 = joint_probability( m, a, 1 );
    rational const j0 = joint_probability( m, a, 0 );
    rational const p = j0 + j1;
    bool const f = j1 >= j0;
    bool const gv = g.evaluate( a );
    if ( f )
      accepted_f += p;
    if ( gv )
      accepted_g += p;
    if ( f != gv )
    {
      r.disagreement += p;
      ++r.disagreeing_assignments;
      if ( gv )
        r.one_sided = false;
    }
    if ( dist )
    {
      long double const pd = dist->prob( a );
      long double const truth = p.get_d();
      bool const ok = ( 1 - epsilon ) * pd <= truth && truth <= ( 1 + epsilon ) * pd;
      if ( !ok )
      {
        r.sandwich_holds = false;
        ++r.sandwich_violations;
      }
      if ( pd > 0 )
        r.max_log_ratio = std::max<double>( r.max_log_ratio, std::fabs( static_cast<double>( std::log( truth / pd ) ) ) );
      else
        r.max_log_ratio = std::numeric_limits<double>::infinity();
    }
  }
  r.additive = abs( accepted_g - accepted_f );
  return r;
}

} // namespace ptfc
