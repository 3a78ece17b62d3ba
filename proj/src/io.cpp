#include "ptfc/io.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include "ptfc/errors.hpp"

namespace ptfc
{

namespace
{

template<class F>
auto guarded( char const* what, F&& f )
{
  try
  {
    return f();
  }
  catch ( json::exception const& e )
  {
    throw input_error( std::string( what ) + ": " + e.what() );
  }
}

json const& field( json const& j, char const* key )
{
  if ( !j.is_object() || !j.contains( key ) )
    throw input_error( std::string( "missing field \"" ) + key + "\"" );
  return j.at( key );
}

integer integer_from_json( json const& j )
{
  if ( j.is_number_integer() )
    return integer( std::to_string( j.get<long long>() ) );
  if ( j.is_string() )
  {
    integer v;
    if ( v.set_str( j.get<std::string>(), 10 ) != 0 )
      throw input_error( "not an integer: " + j.get<std::string>() );
    return v;
  }
  throw input_error( "expected an integer" );
}

json integer_to_json( integer const& v )
{
  if ( v.fits_slong_p() )
    return v.get_si();
  return v.get_str();
}

/* [num, den] or a rational string */
rational rational_from_json( json const& j )
{
  if ( j.is_array() )
  {
    if ( j.size() != 2 )
      throw input_error( "rational pairs need exactly two entries" );
    integer const den = integer_from_json( j[1] );
    if ( den == 0 )
      throw input_error( "zero denominator" );
    rational r( integer_from_json( j[0] ), den );
    r.canonicalize();
    return r;
  }
  if ( j.is_string() )
    return parse_rational( j.get<std::string>() );
  if ( j.is_number_integer() )
    return rational( integer_from_json( j ) );
  throw input_error( "expected a rational" );
}

json pair_to_json( rational const& r )
{
  return json::array( { integer_to_json( r.get_num() ), integer_to_json( r.get_den() ) } );
}

int int_field( json const& j, char const* key )
{
  auto const& v = field( j, key );
  if ( !v.is_number_integer() )
    throw input_error( std::string( "field \"" ) + key + "\" must be an integer" );
  return v.get<int>();
}

std::vector<int> int_list( json const& j )
{
  if ( !j.is_array() )
    throw input_error( "expected an array of integers" );
  std::vector<int> out;
  for ( auto const& v : j )
  {
    if ( !v.is_number_integer() )
      throw input_error( "expected an array of integers" );
    out.push_back( v.get<int>() );
  }
  return out;
}

std::string fixed_to_decimal( std::uint64_t raw )
{
  rational r( integer( std::to_string( raw ) ), integer( 1 ) );
  integer den = 1;
  mpz_mul_2exp( den.get_mpz_t(), den.get_mpz_t(), probability_bits );
  r /= den;
  return to_exact_string( r );
}

} // namespace

bnc_model bnc_from_json( json const& j )
{
  return guarded( "BNC document", [&] {
    int const n = int_field( j, "n" );
    if ( n < 0 )
      throw input_error( "n must be nonnegative" );
    rational const prior = rational_from_json( field( j, "class_prior" ) );
    auto const& nodes_json = field( j, "nodes" );
    if ( !nodes_json.is_array() || static_cast<int>( nodes_json.size() ) != n )
      throw input_error( "expected " + std::to_string( n ) + " nodes" );

    std::vector<bnc_node> nodes( n );
    std::vector<bool> seen( n, false );
    for ( auto const& nj : nodes_json )
    {
      int const id = int_field( nj, "id" );
      if ( id < 0 || id >= n || seen[id] )
        throw input_error( "node ids must be a permutation of 0..n-1" );
      seen[id] = true;
      auto const given = int_list( field( nj, "parents" ) );
      auto sorted = given;
      std::sort( sorted.begin(), sorted.end() );
      if ( std::adjacent_find( sorted.begin(), sorted.end() ) != sorted.end() )
        throw input_error( "node " + std::to_string( id ) + " lists a parent twice" );
      if ( sorted.size() > 30 )
        throw capability_error( "node " + std::to_string( id ) + " has too many parents" );
      /* position of given[k] among the sorted parents */
      std::vector<int> rank( given.size() );
      for ( std::size_t k = 0; k < given.size(); ++k )
        rank[k] = static_cast<int>( std::lower_bound( sorted.begin(), sorted.end(), given[k] ) - sorted.begin() );

      std::size_t const rows = std::size_t{ 2 } << given.size();
      std::vector<rational> p1( rows );
      std::vector<bool> filled( rows, false );
      auto const& cpt = field( nj, "cpt" );
      if ( !cpt.is_array() || cpt.size() != rows )
        throw input_error( "node " + std::to_string( id ) + " needs " + std::to_string( rows ) + " CPT rows" );
      for ( auto const& row : cpt )
      {
        auto const bits = int_list( field( row, "parent_bits" ) );
        int const c = int_field( row, "c" );
        if ( bits.size() != given.size() || ( c != 0 && c != 1 ) )
          throw input_error( "node " + std::to_string( id ) + ": malformed CPT row" );
        std::size_t config = 0;
        for ( std::size_t k = 0; k < bits.size(); ++k )
        {
          if ( bits[k] != 0 && bits[k] != 1 )
            throw input_error( "parent bits must be 0 or 1" );
          config |= static_cast<std::size_t>( bits[k] ) << rank[k];
        }
        std::size_t const slot = config * 2 + c;
        if ( filled[slot] )
          throw input_error( "node " + std::to_string( id ) + ": duplicate CPT row" );
        filled[slot] = true;
        p1[slot] = rational_from_json( field( row, "p1" ) );
      }
      nodes[id] = { std::move( sorted ), std::move( p1 ) };
    }
    return bnc_model( prior, std::move( nodes ) );
  } );
}

json to_json( bnc_model const& m )
{
  json nodes = json::array();
  for ( int i = 0; i < m.num_vars(); ++i )
  {
    auto const& node = m.node( i );
    json cpt = json::array();
    std::size_t const configs = std::size_t{ 1 } << node.parents.size();
    for ( std::size_t config = 0; config < configs; ++config )
      for ( int c = 0; c < 2; ++c )
      {
        json bits = json::array();
        for ( std::size_t k = 0; k < node.parents.size(); ++k )
          bits.push_back( static_cast<int>( ( config >> k ) & 1u ) );
        cpt.push_back( { { "parent_bits", bits }, { "c", c }, { "p1", pair_to_json( node.p1[config * 2 + c] ) } } );
      }
    nodes.push_back( { { "id", i }, { "parents", node.parents }, { "cpt", cpt } } );
  }
  return { { "n", m.num_vars() }, { "class_prior", pair_to_json( m.prior( 1 ) ) }, { "nodes", nodes } };
}

ptf_document ptf_from_json( json const& j )
{
  return guarded( "PTF document", [&] {
    int const n = int_field( j, "n" );
    if ( n < 0 )
      throw input_error( "n must be nonnegative" );
    encoding enc = encoding::zero_one;
    if ( j.contains( "encoding" ) )
    {
      auto const e = field( j, "encoding" ).get<std::string>();
      if ( e == "pm1" )
        enc = encoding::plus_minus_one;
      else if ( e != "01" )
        throw input_error( "encoding must be \"01\" or \"pm1\"" );
    }
    polynomial p( n );
    auto const& terms = field( j, "terms" );
    if ( !terms.is_array() )
      throw input_error( "terms must be an array" );
    for ( auto const& t : terms )
      p.add( int_list( field( t, "vars" ) ), rational_from_json( field( t, "coeff" ) ) );
    ptf_document doc{ ptf( std::move( p ), enc ), std::nullopt };
    if ( j.contains( "threshold" ) )
      doc.threshold = rational_from_json( j.at( "threshold" ) );
    return doc;
  } );
}

json to_json( ptf const& p, std::optional<rational> const& threshold )
{
  json terms = json::array();
  for ( auto const& [t, c] : p.poly().terms() )
    terms.push_back( { { "vars", t }, { "coeff", to_exact_string( c ) } } );
  json out = { { "n", p.num_vars() }, { "encoding", p.domain() == encoding::zero_one ? "01" : "pm1" }, { "terms", terms } };
  if ( threshold )
    out["threshold"] = to_exact_string( *threshold );
  return out;
}

graph graph_from_json( json const& j )
{
  return guarded( "graph document", [&] {
    int const n = int_field( j, "n" );
    if ( n < 0 )
      throw input_error( "n must be nonnegative" );
    term_hypergraph h;
    h.num_vertices = n;
    auto const& edges = field( j, "edges" );
    if ( !edges.is_array() )
      throw input_error( "edges must be an array" );
    for ( auto const& e : edges )
    {
      auto vs = int_list( e );
      for ( int v : vs )
        if ( v < 0 || v >= n )
          throw input_error( "edge vertex " + std::to_string( v ) + " out of range" );
      if ( vs.empty() )
        throw input_error( "empty edge" );
      h.edges.push_back( std::move( vs ) );
    }
    return primal_graph( h );
  } );
}

json to_json( graph const& g )
{
  json edges = json::array();
  for ( auto [u, v] : g.edges() )
    edges.push_back( { u, v } );
  return { { "n", g.num_vertices() }, { "edges", edges } };
}

std::vector<int> ordering_from_json( json const& j )
{
  return guarded( "ordering document", [&] {
    if ( j.is_array() )
      return int_list( j );
    return int_list( field( j, "ordering" ) );
  } );
}

json to_json( decomposition const& d )
{
  json tree = json::array();
  for ( auto [a, b] : d.tree_edges )
    tree.push_back( { a, b } );
  return { { "kind", d.kind == decomposition_kind::path ? "path" : "tree" }, { "width", d.width() }, { "bags", d.bags }, { "tree_edges", tree } };
}

obdd obdd_from_json( json const& j )
{
  return guarded( "OBDD document", [&] {
    int const n = int_field( j, "n" );
    auto ordering = int_list( field( j, "ordering" ) );
    auto const& nodes_json = field( j, "nodes" );
    if ( !nodes_json.is_array() )
      throw input_error( "nodes must be an array" );
    std::vector<obdd_node> nodes( nodes_json.size() );
    std::vector<bool> seen( nodes.size(), false );
    for ( auto const& nj : nodes_json )
    {
      int const id = int_field( nj, "id" );
      if ( id < 0 || id >= static_cast<int>( nodes.size() ) || seen[id] )
        throw input_error( "node ids must be a permutation of 0..size-1" );
      seen[id] = true;
      obdd_node u;
      u.layer = int_field( nj, "layer" );
      auto const& sink = field( nj, "sink" );
      if ( sink.is_null() )
      {
        u.var = int_field( nj, "var" );
        u.lo = int_field( nj, "lo" );
        u.hi = int_field( nj, "hi" );
      }
      else
      {
        u.sink = sink.get<int>();
        if ( u.sink != 0 && u.sink != 1 )
          throw input_error( "sink labels must be 0 or 1" );
      }
      nodes[id] = u;
    }
    bool const layered = j.contains( "layered" ) ? j.at( "layered" ).get<bool>() : false;
    return obdd( n, std::move( ordering ), std::move( nodes ), int_field( j, "start" ), layered );
  } );
}

json to_json( obdd const& d )
{
  json nodes = json::array();
  for ( std::size_t id = 0; id < d.size(); ++id )
  {
    auto const& u = d.node( static_cast<int>( id ) );
    json nj = { { "id", id }, { "layer", u.layer } };
    if ( u.is_sink() )
    {
      nj["var"] = nullptr;
      nj["lo"] = -1;
      nj["hi"] = -1;
      nj["sink"] = u.sink;
    }
    else
    {
      nj["var"] = u.var;
      nj["lo"] = u.lo;
      nj["hi"] = u.hi;
      nj["sink"] = nullptr;
    }
    nodes.push_back( std::move( nj ) );
  }
  return { { "n", d.num_vars() }, { "ordering", d.ordering() }, { "nodes", nodes }, { "start", d.start() }, { "layered", d.layered() } };
}

gobdd gobdd_from_json( json const& j )
{
  return guarded( "GOBDD document", [&] {
    int const n = int_field( j, "n" );
    auto ordering = int_list( field( j, "ordering" ) );
    auto const& nodes_json = field( j, "nodes" );
    if ( !nodes_json.is_array() )
      throw input_error( "nodes must be an array" );
    std::vector<gobdd_node> nodes( nodes_json.size() );
    std::vector<bool> seen( nodes.size(), false );
    for ( auto const& nj : nodes_json )
    {
      int const id = int_field( nj, "id" );
      if ( id < 0 || id >= static_cast<int>( nodes.size() ) || seen[id] )
        throw input_error( "node ids must be a permutation of 0..size-1" );
      seen[id] = true;
      gobdd_node u;
      u.layer = int_field( nj, "layer" );
      if ( nj.contains( "sink" ) && !nj.at( "sink" ).is_null() )
      {
        u.lo = u.hi = -1;
      }
      else
      {
        u.lo = int_field( nj, "lo" );
        u.hi = int_field( nj, "hi" );
        u.p0 = to_fixed_probability( rational_from_json( field( nj, "p" ) ) );
      }
      nodes[id] = u;
    }
    return gobdd( n, std::move( ordering ), std::move( nodes ), int_field( j, "start" ) );
  } );
}

json to_json( gobdd const& d )
{
  json nodes = json::array();
  for ( std::size_t id = 0; id < d.size(); ++id )
  {
    auto const& u = d.node( static_cast<int>( id ) );
    json nj = { { "id", id }, { "layer", u.layer } };
    if ( static_cast<int>( id ) == d.sink() )
    {
      nj["var"] = nullptr;
      nj["lo"] = -1;
      nj["hi"] = -1;
      nj["sink"] = 1;
    }
    else
    {
      nj["var"] = d.ordering()[u.layer];
      nj["lo"] = u.lo;
      nj["hi"] = u.hi;
      nj["sink"] = nullptr;
      nj["p"] = fixed_to_decimal( u.p0 );
    }
    nodes.push_back( std::move( nj ) );
  }
  return { { "n", d.num_vars() }, { "ordering", d.ordering() }, { "nodes", nodes }, { "start", d.start() } };
}

json to_json( compile_report const& r )
{
  json layers = json::array();
  for ( auto const& s : r.layers )
    layers.push_back( { { "layer", s.layer },
                        { "groups", s.groups },
                        { "candidates", s.candidates },
                        { "distinguished", s.distinguished },
                        { "max_gap", s.max_gap },
                        { "obdd_nodes", s.obdd_nodes } } );
  return { { "n", r.num_vars },
           { "epsilon", r.epsilon },
           { "gobdd_epsilon", r.gobdd_epsilon },
           { "merge_tolerance", r.merge_tolerance },
           { "ordering", r.ordering },
           { "moral_separation", r.moral_separation },
           { "primal_separation", r.primal_separation },
           { "treewidth", r.treewidth },
           { "treewidth_bound", r.treewidth_bound },
           { "precision", r.precision },
           { "grid_bits", r.grid_bits },
           { "gobdd", { { "grid_step", r.gobdd.grid_step }, { "drift_bound", r.gobdd.drift_bound }, { "nodes", r.gobdd_nodes }, { "width", r.gobdd_width } } },
           { "layers", layers },
           { "gap_sum", r.gap_sum },
           { "error_bound", r.error_bound },
           { "monotonicity_checks", r.monotonicity_checks },
           { "root_acceptance", r.root_acceptance },
           { "obdd_size", r.obdd_size },
           { "obdd_width", r.obdd_width } };
}

json to_json( verification_report const& r )
{
  json out = { { "n", r.num_vars },
               { "assignments", r.assignments },
               { "metric", r.metric == error_metric::disagreement ? "disagreement" : "additive" },
               { "epsilon", r.epsilon },
               { "disagreement", r.disagreement.get_d() },
               { "disagreement_exact", to_exact_string( r.disagreement ) },
               { "additive", r.additive.get_d() },
               { "disagreeing_assignments", r.disagreeing_assignments },
               { "one_sided", r.one_sided },
               { "passed", r.passed() } };
  if ( r.sandwich_checked )
    out["sandwich"] = { { "holds", r.sandwich_holds }, { "violations", r.sandwich_violations }, { "max_log_ratio", r.max_log_ratio } };
  return out;
}

std::string samples_to_csv( int n, std::vector<std::pair<assignment, int>> const& samples )
{
  std::string out;
  for ( int i = 0; i < n; ++i )
    out += "x" + std::to_string( i + 1 ) + ",";
  out += "c\n";
  for ( auto const& [a, c] : samples )
  {
    for ( int i = 0; i < n; ++i )
    {
      out += a[i] ? '1' : '0';
      out += ',';
    }
    out += c ? '1' : '0';
    out += '\n';
  }
  return out;
}

std::string read_text_file( std::string const& path )
{
  std::ifstream in( path, std::ios::binary );
  if ( !in )
    throw input_error( "cannot open " + path );
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file( std::string const& path, std::string const& text )
{
  std::ofstream out( path, std::ios::binary );
  if ( !out )
    throw input_error( "cannot write " + path );
  out << text;
  if ( !out )
    throw input_error( "write to " + path + " failed" );
}

json read_json_file( std::string const& path )
{
  auto const text = read_text_file( path );
  try
  {
    return json::parse( text );
  }
  catch ( json::exception const& e )
  {
    throw input_error( path + ": " + e.what() );
  }
}

void write_json_file( std::string const& path, json const& j )
{
  write_text_file( path, j.dump( 2 ) + "\n" );
}

} // namespace ptfc
