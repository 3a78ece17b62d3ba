#include <doctest.h>

#include <random>
#include <set>

#include "oracles.hpp"
#include "ptfc/errors.hpp"
#include "ptfc/graphs.hpp"
#include "ptfc/obdd.hpp"
#include "ptfc/separation.hpp"

using namespace ptfc;

namespace
{

separator_sequence natural_sequence( ptf const& p )
{
  std::vector<int> order( p.num_vars() );
  for ( int i = 0; i < p.num_vars(); ++i )
    order[i] = i;
  return make_separator_sequence( primal_graph( hypergraph_of( p.poly() ) ), order );
}

/// Number of distinct subfunctions after fixing each prefix of the ordering,
/// computed from the truth table.  These are the layer sizes of the unique
/// minimal layered diagram.
std::vector<int> subfunction_counts( ptf const& p, std::vector<int> const& order )
{
  int const n = p.num_vars();
  std::vector<int> counts;
  for ( int l = 0; l <= n; ++l )
  {
    std::set<std::vector<bool>> seen;
    for ( std::uint64_t prefix = 0; prefix < ( std::uint64_t{ 1 } << l ); ++prefix )
    {
      std::vector<bool> table;
      for ( std::uint64_t rest = 0; rest < ( std::uint64_t{ 1 } << ( n - l ) ); ++rest )
      {
        std::vector<int> bits( n );
        for ( int i = 0; i < l; ++i )
          bits[order[i]] = prefix >> i & 1u;
        for ( int i = l; i < n; ++i )
          bits[order[i]] = rest >> ( i - l ) & 1u;
        table.push_back( oracle::eval_terms( p.poly(), bits ) >= 0 );
      }
      seen.insert( table );
    }
    counts.push_back( static_cast<int>( seen.size() ) );
  }
  counts.back() = 2; /* both sinks are always kept */
  return counts;
}

std::uint64_t brute_count( ptf const& p )
{
  std::uint64_t count = 0;
  for ( std::uint64_t idx = 0; idx < ( std::uint64_t{ 1 } << p.num_vars() ); ++idx )
    count += oracle::eval_terms( p.poly(), oracle::bits_of( p.num_vars(), idx ) ) >= 0;
  return count;
}

} // namespace

TEST_SUITE( "obdd" )
{
  TEST_CASE( "four-variable example" )
  {
    auto const p = four_variable_example();
    auto const seq = natural_sequence( p );
    CHECK( seq.value() == 1 );
    auto const d = build_exact_obdd( p, seq );
    CHECK( d.layered() );
    for ( std::uint64_t idx = 0; idx < 16; ++idx )
    {
      auto const a = assignment::from_index( 4, idx );
      CHECK( d.evaluate( a ) == ( a.weight() >= 3 || ( a[0] + a[1] == 1 && a[2] + a[3] == 1 ) ) );
    }
    CHECK( count_models( d ) == 9 );
    CHECK( d.layer_sizes() == subfunction_counts( p, seq.ordering ) );
  }

  TEST_CASE( "random PTFs against the truth table" )
  {
    std::mt19937_64 rng( 2718 );
    for ( int trial = 0; trial < 40; ++trial )
    {
      int const n = 2 + trial % 7;
      ptf const p( oracle::random_polynomial( n, 2 + trial % 5, 2 + trial % 2, rng ) );
      auto const g = primal_graph( hypergraph_of( p.poly() ) );
      auto const seq = best_ordering( g );
      auto const d = build_exact_obdd( p, seq );
      for ( std::uint64_t idx = 0; idx < ( std::uint64_t{ 1 } << n ); ++idx )
        CHECK( d.evaluate( assignment::from_index( n, idx ) ) == ( oracle::eval_terms( p.poly(), oracle::bits_of( n, idx ) ) >= 0 ) );
      CHECK( count_models( d ) == brute_count( p ) );
      CHECK( d.layer_sizes() == subfunction_counts( p, seq.ordering ) );

      exact_obdd_options raw;
      raw.minimize = false;
      auto const unminimized = build_exact_obdd( p, seq, raw );
      CHECK( unminimized.size() >= d.size() );
      CHECK( isomorphic( minimize( unminimized ), d ) );

      auto const r = reduce( d );
      CHECK( is_reduced( r ) );
      CHECK_FALSE( r.layered() );
      CHECK( r.size() <= d.size() );
      CHECK( isomorphic( reduce( r ), r ) );
      CHECK( count_models( r ) == brute_count( p ) );
      for ( std::uint64_t idx = 0; idx < ( std::uint64_t{ 1 } << n ); ++idx )
      {
        auto const a = assignment::from_index( n, idx );
        CHECK( r.evaluate( a ) == d.evaluate( a ) );
      }
    }
  }

  TEST_CASE( "plus-minus PTFs are converted first" )
  {
    polynomial q( 3 );
    q.add( { 0, 1 }, 1 );
    q.add( { 2 }, 1 );
    ptf const p( q, encoding::plus_minus_one );
    auto const seq = make_separator_sequence( primal_graph( hypergraph_of( q ) ), { 0, 1, 2 } );
    auto const d = build_exact_obdd( p, seq );
    for ( std::uint64_t idx = 0; idx < 8; ++idx )
    {
      auto const a = assignment::from_index( 3, idx );
      CHECK( d.evaluate( a ) == p.sign( a ) );
    }
  }

  TEST_CASE( "constant diagrams" )
  {
    auto const t = obdd::constant( 3, { 2, 0, 1 }, true );
    auto const f = obdd::constant( 3, { 2, 0, 1 }, false );
    CHECK( count_models( t ) == 8 );
    CHECK( count_models( f ) == 0 );
    CHECK( t.width() == 1 );
    CHECK( reduce( t ).size() == 2 );
    CHECK_FALSE( isomorphic( t, f ) );

    polynomial always( 3 );
    always.add( {}, 1 );
    auto const d = build_exact_obdd( ptf( always ), natural_sequence( ptf( always ) ) );
    CHECK( count_models( d ) == 8 );
  }

  TEST_CASE( "reduced sizes" )
  {
    /* x1 AND x2 AND x3: a chain of three tests */
    polynomial p( 3 );
    p.add( { 0, 1, 2 }, 1 );
    p.add( {}, rational( -1, 2 ) );
    auto const d = build_exact_obdd( ptf( p ), natural_sequence( ptf( p ) ) );
    CHECK( reduce( d ).size() == 5 );
    CHECK( d.layer_sizes() == std::vector<int>{ 1, 2, 2, 2 } );
  }

  TEST_CASE( "node budget" )
  {
    std::mt19937_64 rng( 4 );
    ptf const p( oracle::random_polynomial( 10, 12, 2, rng ) );
    auto const seq = best_ordering( primal_graph( hypergraph_of( p.poly() ) ) );
    exact_obdd_options tight;
    tight.node_budget = 3;
    CHECK_THROWS_AS( build_exact_obdd( p, seq, tight ), capability_error );
  }

  TEST_CASE( "separators must cover the terms" )
  {
    polynomial p( 3 );
    p.add( { 0, 2 }, 1 );
    graph empty( 3 );
    auto const seq = make_separator_sequence( empty, { 0, 1, 2 } );
    CHECK_THROWS_AS( build_exact_obdd( ptf( p ), seq ), input_error );
  }

  TEST_CASE( "structural validation" )
  {
    std::vector<obdd_node> nodes = { { 0, 0, 1, 2, -1 }, { 1, -1, -1, -1, 0 }, { 1, -1, -1, -1, 1 } };
    CHECK_NOTHROW( obdd( 1, { 0 }, nodes, 0, true ) );
    auto two_zero = nodes;
    two_zero[2].sink = 0;
    CHECK_THROWS_AS( obdd( 1, { 0 }, two_zero, 0, true ), input_error );
    auto dangling = nodes;
    dangling[0].hi = 7;
    CHECK_THROWS_AS( obdd( 1, { 0 }, dangling, 0, true ), input_error );
    auto wrong_var = nodes;
    wrong_var[0].var = 1;
    CHECK_THROWS_AS( obdd( 2, { 0, 1 }, wrong_var, 0, true ), input_error );
    CHECK_THROWS_AS( obdd( 1, { 0 }, nodes, 5, true ), input_error );
  }

  TEST_CASE( "DOT export" )
  {
    polynomial p( 1 );
    p.add( { 0 }, 1 );
    p.add( {}, rational( -1, 2 ) );
    auto const d = build_exact_obdd( ptf( p ), natural_sequence( ptf( p ) ) );
    std::string const expected =
        "digraph obdd {\n"
        "  n0 [shape=circle,label=\"x1\"];\n"
        "  n1 [shape=box,label=\"0\"];\n"
        "  n2 [shape=box,label=\"1\"];\n"
        "  { rank=same; n0; }\n"
        "  { rank=same; n1; n2; }\n"
        "  n0 -> n1 [style=dashed];\n"
        "  n0 -> n2;\n"
        "}\n";
    CHECK( export_dot( d ) == expected );

    auto const big = build_exact_obdd( four_variable_example(), natural_sequence( four_variable_example() ) );
    auto const text = export_dot( big );
    CHECK( text == export_dot( big ) );
    auto const summary = oracle::parse_dot( text );
    CHECK( summary.well_formed );
    CHECK( summary.nodes == static_cast<int>( big.size() ) );
    CHECK( summary.edges == 2 * ( static_cast<int>( big.size() ) - 2 ) );
    CHECK( summary.dashed == static_cast<int>( big.size() ) - 2 );
  }

  TEST_CASE( "construction is deterministic" )
  {
    std::mt19937_64 rng( 8 );
    ptf const p( oracle::random_polynomial( 8, 10, 2, rng ) );
    auto const seq = best_ordering( primal_graph( hypergraph_of( p.poly() ) ) );
    auto const a = build_exact_obdd( p, seq );
    auto const b = build_exact_obdd( p, seq );
    CHECK( a.nodes() == b.nodes() );
    CHECK( a.start() == b.start() );
  }
}
