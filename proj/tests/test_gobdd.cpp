#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "ptfc/bnc.hpp"
#include "ptfc/errors.hpp"
#include "ptfc/gobdd.hpp"
#include "ptfc/graphs.hpp"
#include "ptfc/obdd.hpp"

using namespace ptfc;

namespace
{

separator_sequence moral_sequence( bnc_model const& m )
{
  return best_ordering( moral_graph( m ) );
}

long double exact_conditional( bnc_model const& m, std::uint64_t idx, int c )
{
  auto const bits = oracle::bits_of( m.num_vars(), idx );
  return static_cast<long double>( rational( oracle::joint( m, bits, c ) / m.prior( c ) ).get_d() );
}

long double exact_input( bnc_model const& m, std::uint64_t idx )
{
  auto const bits = oracle::bits_of( m.num_vars(), idx );
  return static_cast<long double>( rational( oracle::joint( m, bits, 0 ) + oracle::joint( m, bits, 1 ) ).get_d() );
}

/// A network whose class variable carries no information.
bnc_model uninformative( int n, std::uint64_t seed )
{
  auto const base = random_bounded_treewidth( n, 2, seed );
  std::vector<bnc_node> nodes;
  for ( int i = 0; i < n; ++i )
  {
    auto node = base.node( i );
    for ( std::size_t k = 0; k + 1 < node.p1.size(); k += 2 )
      node.p1[k + 1] = node.p1[k];
    nodes.push_back( node );
  }
  return bnc_model( rational( 1, 3 ), nodes );
}

} // namespace

TEST_SUITE( "gobdd" )
{
  TEST_CASE( "fixed-point probabilities" )
  {
    CHECK( to_fixed_probability( 0 ) == 0 );
    CHECK( to_fixed_probability( 1 ) == probability_one );
    CHECK( to_fixed_probability( rational( 1, 2 ) ) == probability_one / 2 );
    CHECK( to_fixed_probability( rational( 1, 3 ) ) == ( probability_one + 1 ) / 3 );
    CHECK_THROWS_AS( to_fixed_probability( 2 ), input_error );
  }

  TEST_CASE( "uniform and product distributions" )
  {
    auto const u = gobdd::uniform( 5, { 4, 3, 2, 1, 0 } );
    CHECK( u.width() == 1 );
    for ( std::uint64_t idx = 0; idx < 32; ++idx )
      CHECK( u.prob( assignment::from_index( 5, idx ) ) == doctest::Approx( 1.0 / 32 ) );

    std::vector<rational> p1 = { rational( 1, 4 ), rational( 1, 2 ), rational( 9, 10 ) };
    auto const d = gobdd::product( { 1, 2, 0 }, p1 );
    for ( std::uint64_t idx = 0; idx < 8; ++idx )
    {
      auto const bits = oracle::bits_of( 3, idx );
      double expected = 1;
      for ( int i = 0; i < 3; ++i )
        expected *= bits[i] ? p1[i].get_d() : 1 - p1[i].get_d();
      CHECK( static_cast<double>( d.prob( assignment::from_index( 3, idx ) ) ) == doctest::Approx( expected ).epsilon( 1e-15 ) );
    }
  }

  TEST_CASE( "joint diagrams reproduce the conditionals" )
  {
    std::vector<bnc_model> models = { reference_tan() };
    for ( int seed = 0; seed < 3; ++seed )
      models.push_back( random_bounded_treewidth( 9, 2, 300 + seed ) );
    for ( auto const& m : models )
    {
      auto const seq = moral_sequence( m );
      for ( int c : { 0, 1 } )
      {
        auto const d = joint_gobdd( m, seq, c );
        long double total = 0;
        for ( std::uint64_t idx = 0; idx < ( std::uint64_t{ 1 } << m.num_vars() ); ++idx )
        {
          long double const got = d.prob( assignment::from_index( m.num_vars(), idx ) );
          long double const want = exact_conditional( m, idx, c );
          CHECK( std::fabs( got - want ) <= 1e-13L * want );
          total += got;
        }
        CHECK( std::fabs( total - 1 ) < 1e-12L );
        auto const sizes = d.layer_sizes();
        for ( int l = 0; l < m.num_vars(); ++l )
          CHECK( sizes[l] <= ( 1 << seq.separators[l].size() ) );
      }
    }
  }

  TEST_CASE( "naive Bayes conditionals have width one" )
  {
    auto const m = random_tan( std::vector<int>( 8, -1 ), 12 );
    auto const d = joint_gobdd( m, moral_sequence( m ), 1 );
    CHECK( d.width() == 1 );
    CHECK( d.size() == 9 );
  }

  TEST_CASE( "chains work in both directions" )
  {
    auto const m = random_tan( { -1, 0, 1, 2, 3, 4 }, 3 );
    for ( auto order : { std::vector<int>{ 0, 1, 2, 3, 4, 5 }, std::vector<int>{ 5, 4, 3, 2, 1, 0 } } )
    {
      auto const seq = make_separator_sequence( moral_graph( m ), order );
      auto const d = joint_gobdd( m, seq, 0 );
      CHECK( d.width() <= 2 );
      for ( std::uint64_t idx = 0; idx < 64; ++idx )
      {
        long double const want = exact_conditional( m, idx, 0 );
        CHECK( std::fabs( d.prob( assignment::from_index( 6, idx ) ) - want ) <= 1e-13L * want );
      }
    }
  }

  TEST_CASE( "separators must cover the families" )
  {
    auto const m = random_tan( { -1, 0, 1 }, 3 );
    auto const seq = make_separator_sequence( graph( 3 ), { 0, 1, 2 } );
    CHECK_THROWS_AS( joint_gobdd( m, seq, 0 ), input_error );
    CHECK_THROWS_AS( approx_input_gobdd( m, seq, 0.1 ), input_error );
  }

  TEST_CASE( "approximate input distribution satisfies the sandwich" )
  {
    std::vector<bnc_model> models = { reference_tan() };
    for ( int seed = 0; seed < 4; ++seed )
      models.push_back( random_bounded_treewidth( 10, 2, 400 + seed ) );
    for ( auto const& m : models )
      for ( double eps : { 0.2, 0.05 } )
      {
        approx_gobdd_info info;
        auto const d = approx_input_gobdd( m, moral_sequence( m ), eps, &info );
        CHECK( info.epsilon == eps );
        CHECK( info.grid_step > 0 );
        CHECK( info.drift_bound <= std::log1p( eps ) );
        long double total = 0;
        for ( std::uint64_t idx = 0; idx < ( std::uint64_t{ 1 } << m.num_vars() ); ++idx )
        {
          long double const pd = d.prob( assignment::from_index( m.num_vars(), idx ) );
          long double const p = exact_input( m, idx );
          CHECK( ( 1 - eps ) * pd <= p );
          CHECK( p <= ( 1 + eps ) * pd );
          total += pd;
        }
        CHECK( std::fabs( total - 1 ) < 1e-12L );
      }
  }

  TEST_CASE( "uninformative class gives the exact input distribution" )
  {
    auto const m = uninformative( 9, 21 );
    auto const d = approx_input_gobdd( m, moral_sequence( m ), 0.1 );
    auto const exact = joint_gobdd( m, moral_sequence( m ), 0 );
    CHECK( d.width() == exact.width() );
    for ( std::uint64_t idx = 0; idx < 512; ++idx )
    {
      long double const want = exact_input( m, idx );
      CHECK( std::fabs( d.prob( assignment::from_index( 9, idx ) ) - want ) <= 1e-13L * want );
    }
  }

  TEST_CASE( "epsilon range" )
  {
    auto const m = reference_tan();
    CHECK_THROWS_AS( approx_input_gobdd( m, moral_sequence( m ), 0 ), input_error );
    CHECK_THROWS_AS( approx_input_gobdd( m, moral_sequence( m ), 1 ), input_error );
  }

  TEST_CASE( "sampling follows the edge probabilities" )
  {
    auto const m = reference_tan();
    auto const d = joint_gobdd( m, moral_sequence( m ), 1 );
    CHECK( d.sample( 7 ) == d.sample( 7 ) );
    std::size_t const count = 50000;
    auto const draws = d.sample_many( count, 99 );
    double ones = 0;
    for ( auto const& a : draws )
      ones += a[0];
    double const p = 0.732;
    CHECK( std::fabs( ones / count - p ) <= 3 * std::sqrt( p * ( 1 - p ) / count ) );
  }

  TEST_CASE( "weighted mass" )
  {
    auto const m = random_bounded_treewidth( 8, 2, 5 );
    auto const seq = moral_sequence( m );
    auto const d = joint_gobdd( m, seq, 1 );
    CHECK( weighted_mass( obdd::constant( 8, seq.ordering, true ), d ) == doctest::Approx( 1.0 ) );
    CHECK( weighted_mass( obdd::constant( 8, seq.ordering, false ), d ) == 0 );

    /* x_first >= 1/2, reduced so that edges skip layers */
    polynomial p( 8 );
    p.add( { seq.ordering[0] }, 1 );
    p.add( {}, rational( -1, 2 ) );
    auto const g = reduce( build_exact_obdd( ptf( p ), make_separator_sequence( graph( 8 ), seq.ordering ) ) );
    long double want = 0;
    for ( std::uint64_t idx = 0; idx < 256; ++idx )
      if ( idx >> seq.ordering[0] & 1u )
        want += exact_conditional( m, idx, 1 );
    CHECK( std::fabs( weighted_mass( g, d ) - want ) < 1e-13L );

    std::vector<int> other = seq.ordering;
    std::swap( other[0], other[1] );
    CHECK_THROWS_AS( weighted_mass( obdd::constant( 8, other, true ), d ), input_error );
  }

  TEST_CASE( "structural validation" )
  {
    std::vector<gobdd_node> nodes = { { 0, 1, 1, probability_one / 2 }, { 1, -1, -1, 0 } };
    CHECK_NOTHROW( gobdd( 1, { 0 }, nodes, 0 ) );
    auto skipping = nodes;
    skipping.insert( skipping.begin() + 1, gobdd_node{ 1, 2, 2, 0 } );
    skipping[0].lo = skipping[0].hi = 2;
    CHECK_THROWS_AS( gobdd( 2, { 0, 1 }, skipping, 0 ), input_error );
    auto heavy = nodes;
    heavy[0].p0 = probability_one + 1;
    CHECK_THROWS_AS( gobdd( 1, { 0 }, heavy, 0 ), input_error );
  }
}
