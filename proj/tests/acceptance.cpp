/* Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
 * criterion fails. */

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "oracles.hpp"
#include "ptfc/bnc.hpp"
#include "ptfc/compile.hpp"
#include "ptfc/gobdd.hpp"
#include "ptfc/graphs.hpp"
#include "ptfc/obdd.hpp"
#include "ptfc/ptf.hpp"
#include "ptfc/separation.hpp"

using namespace ptfc;

namespace
{

struct outcome
{
  bool pass = true;
  std::ostringstream detail;
  std::string first_failure;

  void require( bool ok, std::string const& what )
  {
    if ( !ok && pass )
    {
      first_failure = what;
      pass = false;
    }
  }
};

struct criterion
{
  std::string name;
  double time_limit; /* seconds */
  std::function<void( outcome& )> run;
};

/// Reference TAN plus random models of tree-width at most 2 with n <= 12.
std::vector<std::pair<std::string, bnc_model>> model_suite()
{
  std::vector<std::pair<std::string, bnc_model>> suite;
  suite.emplace_back( "reference", reference_tan() );
  int const sizes[] = { 8, 10, 11, 12 };
  for ( int k = 0; k < 4; ++k )
    suite.emplace_back( "tw2-n" + std::to_string( sizes[k] ), random_bounded_treewidth( sizes[k], 2, 9000 + k ) );
  return suite;
}

long double input_mass( bnc_model const& m, std::vector<int> const& bits )
{
  return static_cast<long double>( rational( oracle::joint( m, bits, 0 ) + oracle::joint( m, bits, 1 ) ).get_d() );
}

/* ---------------------------------------------------------------- */

void four_variable_fixture( outcome& out )
{
  auto const p = four_variable_example();
  int count = 0;
  for ( std::uint64_t idx = 0; idx < 16; ++idx )
  {
    auto const bits = oracle::bits_of( 4, idx );
    int const w = bits[0] + bits[1] + bits[2] + bits[3];
    /* one when at least three bits are set, or each half holds exactly one */
    bool const described = w >= 3 || ( bits[0] + bits[1] == 1 && bits[2] + bits[3] == 1 );
    bool const got = oracle::eval_terms( p.poly(), bits ) >= 0;
    out.require( got == described, "sign table at " + std::to_string( idx ) );
    count += described;
  }
  out.require( count == 9, "model count" );

  auto const seq = make_separator_sequence( primal_graph( hypergraph_of( p.poly() ) ), { 0, 1, 2, 3 } );
  auto const layered = build_exact_obdd( p, seq );
  auto const reduced = reduce( layered );
  for ( std::uint64_t idx = 0; idx < 16; ++idx )
  {
    auto const a = assignment::from_index( 4, idx );
    out.require( reduced.evaluate( a ) == p.sign( a ), "reduced OBDD equivalence" );
  }
  out.require( count_models( reduced ) == 9, "OBDD model count" );
  out.require( is_reduced( reduced ), "reduction rules exhausted" );
  out.require( isomorphic( reduce( reduced ), reduced ), "reduction idempotent" );
  out.detail << "models=" << count << " layered_size=" << layered.size() << " reduced_size=" << reduced.size();
}

void tan_accuracy( outcome& out )
{
  auto const m = reference_tan();
  double const acc = accuracy( m, [&]( assignment const& a ) { return classify( m, a ); } ).get_d();
  out.require( std::fabs( acc - 0.9266 ) <= 0.005, "accuracy" );
  char buf[64];
  std::snprintf( buf, sizeof buf, "accuracy=%.6f target=0.9266+-0.005", acc );
  out.detail << buf;
}

void ptf_fidelity( outcome& out )
{
  std::vector<bnc_model> models = { reference_tan() };
  std::mt19937_64 rng( 1234 );
  for ( int k = 0; k < 50; ++k )
  {
    int const n = 2 + k % 11;
    models.push_back( random_tan( oracle::random_forest( n, rng ), 5000 + k ) );
  }
  std::size_t checked = 0;
  for ( auto const& m : models )
  {
    auto const p = bnc_to_ptf( m );
    for ( std::uint64_t idx = 0; idx < ( std::uint64_t{ 1 } << m.num_vars() ); ++idx )
    {
      auto const a = assignment::from_index( m.num_vars(), idx );
      out.require( p.form.sign( a ) == classify( m, a ), "sign agreement" );
      ++checked;
    }
  }

  /* reference TAN coefficient table, 1-based variable names */
  struct entry
  {
    term t;
    double value;
  };
  std::vector<entry> const table = {
      { {}, 0.11 },        { { 0 }, 1.87 },     { { 1 }, -2.53 },    { { 2 }, -1.71 },    { { 3 }, -2.82 },
      { { 4 }, 2.08 },     { { 5 }, 1.56 },     { { 6 }, -1.17 },    { { 7 }, -1.93 },    { { 8 }, 3.96 },
      { { 9 }, -1.94 },    { { 10 }, -0.35 },   { { 11 }, 2.87 },    { { 12 }, 0.10 },    { { 13 }, -1.20 },
      { { 0, 1 }, 3.03 },  { { 0, 2 }, -0.24 }, { { 1, 3 }, 3.80 },  { { 1, 4 }, -1.98 }, { { 2, 5 }, -2.24 },
      { { 2, 6 }, 1.55 },  { { 7, 8 }, 0.62 },  { { 7, 9 }, 4.31 },  { { 8, 10 }, -2.27 }, { { 8, 11 }, -3.31 },
      { { 9, 12 }, -0.54 }, { { 9, 13 }, 0.95 },
  };
  auto const ref = bnc_to_ptf( reference_tan() ).form.poly();
  double const scale = 1.87 / ref.coefficient( { 0 } ).get_d();
  double max_dev = 0, max_abs = 0, max_rel = 0;
  std::size_t matched = 0;
  for ( auto const& e : table )
  {
    double const got = ref.coefficient( e.t ).get_d() * scale;
    max_dev = std::max( max_dev, std::fabs( got - e.value ) );
    max_abs = std::max( max_abs, std::fabs( e.value ) );
    max_rel = std::max( max_rel, std::fabs( got - e.value ) / std::fabs( e.value ) );
    ++matched;
  }
  out.require( ref.size() == table.size(), "term support matches the table" );
  double const rel = max_dev / max_abs;
  out.require( rel <= 0.02, "coefficients within 2% after x1-normalization" );
  char buf[200];
  std::snprintf( buf, sizeof buf, "models=%zu inputs=%zu terms=%zu max_dev/max|coeff|=%.4f%% max_per_coeff=%.2f%%", models.size(), checked,
                 matched, 100 * rel, 100 * max_rel );
  out.detail << buf;
}

void gobdd_sandwich( outcome& out )
{
  std::size_t checked = 0;
  double worst = 0;
  for ( auto const& [name, m] : model_suite() )
  {
    auto const seq = best_ordering( moral_graph( m ) );
    for ( double eps : { 0.2, 0.1, 0.05 } )
    {
      auto const d = approx_input_gobdd( m, seq, eps );
      for ( std::uint64_t idx = 0; idx < ( std::uint64_t{ 1 } << m.num_vars() ); ++idx )
      {
        long double const pd = d.prob( assignment::from_index( m.num_vars(), idx ) );
        long double const p = input_mass( m, oracle::bits_of( m.num_vars(), idx ) );
        out.require( ( 1 - eps ) * pd <= p && p <= ( 1 + eps ) * pd, name + " eps=" + std::to_string( eps ) );
        worst = std::max( worst, static_cast<double>( std::fabs( p / pd - 1 ) / eps ) );
        ++checked;
      }
    }
  }
  char buf[120];
  std::snprintf( buf, sizeof buf, "assignments=%zu worst |P/P_D-1|/eps=%.3f", checked, worst );
  out.detail << buf;
}

void compilation( outcome& out )
{
  for ( auto const& [name, m] : model_suite() )
  {
    std::vector<std::size_t> sizes;
    out.detail << name << ":";
    for ( double eps : { 0.05, 0.1, 0.2 } )
    {
      compile_params params;
      params.epsilon = eps;
      try
      {
        auto const r = compile_with_report( m, params );
        auto const v = verify_compilation( m, r.diagram, error_metric::disagreement, eps );
        out.require( v.disagreement.get_d() <= eps, name + " disagreement" );
        out.require( r.report.monotonicity_checks > 0, name + " monotonicity checked" );
        sizes.push_back( r.diagram.size() );
        std::size_t distinguished = 0;
        for ( auto const& s : r.report.layers )
          distinguished += s.distinguished;
        char buf[120];
        std::snprintf( buf, sizeof buf, " eps=%.2f size=%zu distinguished=%zu err=%.2e", eps, r.diagram.size(), distinguished,
                       v.disagreement.get_d() );
        out.detail << buf;
      }
      catch ( std::logic_error const& e )
      {
        out.require( false, name + " monotonicity assertion: " + e.what() );
      }
    }
    for ( std::size_t i = 1; i < sizes.size(); ++i )
      out.require( sizes[i] <= sizes[i - 1], name + " size nonincreasing in eps" );
    out.detail << ";";
  }
}

void width_machinery( outcome& out )
{
  std::mt19937_64 rng( 77 );
  std::size_t graphs = 0;
  for ( int trial = 0; trial < 300; ++trial )
  {
    int const n = 1 + trial % 8;
    auto const g = oracle::random_graph( n, 0.15 + 0.1 * ( trial % 6 ), rng );
    auto const vs = pathwidth_exact( g );
    auto const pd = pathwidth_by_decomposition( g );
    auto const tw = treewidth_exact( g );
    out.require( vs.width == pd.width, "vs-search equals path-decomposition search" );
    out.require( validate( g, pd.witness ).valid, "path-decomposition witness" );
    out.require( validate( g, path_decomposition( vs.witness ) ).valid, "vs witness" );
    out.require( validate( g, tw.witness ).valid, "tree-decomposition witness" );
    out.require( validate( g, path_decomposition( heuristic_ordering( g ) ) ).valid, "heuristic decomposition" );
    ++graphs;
  }
  for ( int n = 2; n <= 12; ++n )
  {
    graph tree( n );
    for ( int v = 1; v < n; ++v )
      tree.add_edge( v, std::uniform_int_distribution<int>( 0, v - 1 )( rng ) );
    out.require( treewidth_exact( tree ).width == 1, "tree has tree-width 1" );
    graph clique( n );
    for ( int u = 0; u < n; ++u )
      for ( int v = u + 1; v < n; ++v )
        clique.add_edge( u, v );
    out.require( treewidth_exact( clique ).width == n - 1, "clique tree-width" );
    out.require( pathwidth_exact( clique ).width == n - 1, "clique path-width" );
  }
  out.detail << "random_graphs=" << graphs << " trees/cliques n=2..12";
}

void separation_suite( outcome& out )
{
  std::size_t witnesses = 0;
  for ( int k = 1; k <= 5; ++k )
  {
    int const n = 2 * k;
    for ( std::uint64_t idx = 0; idx < ( std::uint64_t{ 1 } << n ); ++idx )
    {
      auto const bits = oracle::bits_of( n, idx );
      int w = 0;
      bool full = false;
      for ( int j = 0; j < k; ++j )
      {
        w += bits[2 * j] + bits[2 * j + 1];
        full = full || ( bits[2 * j] && bits[2 * j + 1] );
      }
      bool const f = slice_function( assignment::from_index( n, idx ) );
      if ( w >= k + 1 )
        out.require( f, "slice above the middle" );
      else if ( w <= k - 1 )
        out.require( !f, "slice below the middle" );
      else
        out.require( f == !full, "middle slice" );
      for ( int i = 0; i < n; ++i )
        if ( !bits[i] )
          out.require( f <= slice_function( assignment::from_index( n, idx | ( std::uint64_t{ 1 } << i ) ) ), "monotone" );
    }
  }
  for ( int k = 2; k <= 5; ++k )
  {
    separation_instance const inst{ k };
    int const n = inst.num_vars();
    auto const general = qtf_general( inst );
    auto const positive = qtf_positive( inst );
    for ( std::uint64_t idx = 0; idx < ( std::uint64_t{ 1 } << n ); ++idx )
    {
      auto const a = assignment::from_index( n, idx );
      bool const f = slice_function( a );
      out.require( general.sign( a ) == f, "general QTF" );
      out.require( positive.decide( a ) == f, "positive QTF" );
    }
    auto const audit = mixed_term_audit( positive, inst );
    auto const* cert = std::get_if<mixed_term_certificate>( &audit );
    out.require( cert && cert->mixed_pairs == static_cast<std::size_t>( k * ( k - 1 ) / 2 ) && cert->represents, "certificate" );

    for ( int bi = 0; bi < k; ++bi )
      for ( int bj = bi + 1; bj < k; ++bj )
      {
        polynomial stripped( n );
        for ( auto const& [t, c] : positive.form.poly().terms() )
        {
          bool const mixed = t.size() == 2 && ( ( t[0] / 2 == bi && t[1] / 2 == bj ) || ( t[0] / 2 == bj && t[1] / 2 == bi ) );
          if ( !mixed )
            stripped.add( t, c );
        }
        threshold_ptf const candidate{ ptf( stripped ), positive.threshold };
        auto const r = mixed_term_audit( candidate, inst );
        auto const* w = std::get_if<mixed_term_witness>( &r );
        out.require( w != nullptr, "witness produced" );
        if ( !w )
          continue;
        out.require( w->block_i == bi && w->block_j == bj, "witness names the stripped pair" );
        bool any_wrong = false;
        for ( int q = 0; q < 4; ++q )
        {
          auto const bits = w->points[q].bits();
          std::vector<int> as_int( bits.begin(), bits.end() );
          rational const value = oracle::eval_terms( stripped, as_int );
          out.require( value == w->values[q], "witness values" );
          bool const decided = value >= candidate.threshold;
          bool const expected = slice_function( w->points[q] );
          any_wrong = any_wrong || decided != expected;
        }
        out.require( w->values[0] + w->values[1] == w->values[2] + w->values[3] + w->gamma_i + w->gamma_j, "four-point identity" );
        out.require( any_wrong && w->refutes, "witness refutes" );
        ++witnesses;
      }
  }
  out.detail << "k=1..5 exhaustive, witnesses=" << witnesses;
}

} // namespace

int main()
{
  std::vector<criterion> const criteria = {
      { "four-variable-fixture", 1, four_variable_fixture },
      { "tan-accuracy", 10, tan_accuracy },
      { "bnc-ptf-fidelity", 30, ptf_fidelity },
      { "gobdd-sandwich", 60 * 5, gobdd_sandwich },
      { "compilation", 120 * 5, compilation },
      { "width-machinery", 60, width_machinery },
      { "separation-suite", 30, separation_suite },
  };
  int failures = 0;
  for ( auto const& c : criteria )
  {
    outcome out;
    auto const t0 = std::chrono::steady_clock::now();
    try
    {
      c.run( out );
    }
    catch ( std::exception const& e )
    {
      out.require( false, std::string( "exception: " ) + e.what() );
    }
    double const secs = std::chrono::duration<double>( std::chrono::steady_clock::now() - t0 ).count();
    out.require( secs <= c.time_limit, "runtime limit" );
    std::printf( "%s %s (%.2f s, limit %.0f s) %s", out.pass ? "PASS" : "FAIL", c.name.c_str(), secs, c.time_limit, out.detail.str().c_str() );
    if ( !out.pass )
      std::printf( " | first failure: %s", out.first_failure.c_str() );
    std::printf( "\n" );
    std::fflush( stdout );
    failures += !out.pass;
  }
  return failures == 0 ? 0 : 1;
}
