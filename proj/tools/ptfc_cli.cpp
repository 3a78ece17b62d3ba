#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ptfc/bnc.hpp"
#include "ptfc/compile.hpp"
#include "ptfc/errors.hpp"
#include "ptfc/graphs.hpp"
#include "ptfc/io.hpp"
#include "ptfc/obdd.hpp"
#include "ptfc/ptf.hpp"
#include "ptfc/separation.hpp"

using namespace ptfc;

namespace
{

std::size_t node_budget()
{
  std::size_t budget = 10'000'000;
  if ( char const* env = std::getenv( "PTFC_NODE_BUDGET" ) )
  {
    try
    {
      std::size_t pos = 0;
      budget = std::stoull( env, &pos );
      if ( pos != std::string( env ).size() || budget == 0 )
        throw std::invalid_argument( env );
    }
    catch ( std::exception const& )
    {
      throw input_error( std::string( "PTFC_NODE_BUDGET must be a positive integer, got \"" ) + env + "\"" );
    }
  }
  return budget;
}

/* 1-based variable names, like the CSV header */
std::string show( polynomial const& p )
{
  std::string out;
  for ( auto const& [t, c] : p.terms() )
  {
    bool const negative = c < 0;
    rational const mag = negative ? rational( -c ) : c;
    if ( out.empty() )
      out += negative ? "-" : "";
    else
      out += negative ? " - " : " + ";
    bool const unit = mag == 1 && !t.empty();
    if ( !unit )
      out += to_exact_string( mag );
    for ( std::size_t i = 0; i < t.size(); ++i )
      out += ( i == 0 && unit ? "" : " " ) + std::string( "x" ) + std::to_string( t[i] + 1 );
  }
  return out.empty() ? "0" : out;
}

int run_compile( std::string const& bnc_path, double eps, std::string const& out_path, bool verify, std::string const& report_path,
                 std::string const& dot_path )
{
  auto const model = bnc_from_json( read_json_file( bnc_path ) );
  compile_params params;
  params.epsilon = eps;
  params.node_budget = node_budget();
  auto const result = compile_with_report( model, params );
  write_json_file( out_path, to_json( result.diagram ) );
  if ( !dot_path.empty() )
    write_text_file( dot_path, export_dot( result.diagram ) );

  auto const& r = result.report;
  std::cout << "compiled " << r.num_vars << " variables at epsilon " << eps << ": " << r.obdd_size << " nodes, width " << r.obdd_width
            << ", GOBDD width " << r.gobdd_width << ", error bound " << r.error_bound << "\n";

  json report = { { "compile", to_json( r ) } };
  if ( verify )
  {
    auto const v = verify_compilation( model, result.diagram, error_metric::disagreement, eps, &result.distribution );
    report["verification"] = to_json( v );
    std::cout << "verification: disagreement mass " << v.disagreement.get_d() << " (" << v.disagreeing_assignments << " of " << v.assignments
              << " inputs), GOBDD sandwich " << ( v.sandwich_holds ? "holds" : "fails" ) << ", " << ( v.passed() ? "PASS" : "FAIL" ) << "\n";
  }
  if ( !report_path.empty() )
    write_json_file( report_path, report );
  else if ( verify )
    std::cout << report["verification"].dump( 2 ) << "\n";
  return 0;
}

int run_ptf( std::string const& bnc_path, std::string const& out_path, int bits )
{
  auto const model = bnc_from_json( read_json_file( bnc_path ) );
  auto const p = bnc_to_ptf( model, bits );
  write_json_file( out_path, to_json( p.form ) );
  auto const g = primal_graph( hypergraph_of( p.form.poly() ) );
  std::cout << "log-odds polynomial: " << p.form.poly().size() << " terms, degree " << p.form.poly().degree() << ", " << g.num_edges()
            << " primal edges, tolerance " << to_exact_string( p.tolerance ) << "\n";
  return 0;
}

int run_width( std::string const& graph_path, bool exact, std::string const& dot_path )
{
  auto const g = graph_from_json( read_json_file( graph_path ) );
  auto const heuristic = heuristic_ordering( g );
  std::cout << "vertices " << g.num_vertices() << ", edges " << g.num_edges() << "\n";
  std::cout << "heuristic path-width (vertex separation) " << heuristic.value() << "\n";
  decomposition shown = path_decomposition( heuristic );
  if ( exact )
  {
    auto const tw = treewidth_exact( g );
    auto const pw = pathwidth_exact( g );
    std::cout << "tree-width " << tw.width << "\n";
    std::cout << "path-width " << pw.width << "\n";
    std::cout << "ordering";
    for ( int v : pw.witness.ordering )
      std::cout << " " << v;
    std::cout << "\n";
    shown = tw.witness;
  }
  if ( !dot_path.empty() )
    write_text_file( dot_path, to_dot( shown ) );
  return 0;
}

int run_obdd( std::string const& ptf_path, std::string const& ordering_arg, bool do_reduce, std::string const& dot_path, std::string const& out_path )
{
  auto const doc = ptf_from_json( read_json_file( ptf_path ) );
  ptf const form = doc.threshold ? threshold_ptf{ doc.form, *doc.threshold }.as_sign_form() : doc.form;
  ptf const base = form.domain() == encoding::zero_one ? form : convert_domain( form, encoding::zero_one );
  auto const g = primal_graph( hypergraph_of( base.poly() ) );
  separator_sequence const seq = ordering_arg == "auto" ? best_ordering( g ) : make_separator_sequence( g, ordering_from_json( read_json_file( ordering_arg ) ) );

  exact_obdd_options options;
  options.node_budget = node_budget();
  obdd d = build_exact_obdd( base, seq, options );
  if ( do_reduce )
    d = reduce( d );
  std::cout << "OBDD over " << d.num_vars() << " variables: " << d.size() << " nodes, width " << d.width() << ", " << count_models( d ).get_str()
            << " models\n";
  if ( !dot_path.empty() )
    write_text_file( dot_path, export_dot( d ) );
  if ( !out_path.empty() )
    write_json_file( out_path, to_json( d ) );
  return 0;
}

int run_sample( std::string const& bnc_path, std::size_t count, std::uint64_t seed, std::string const& out_path )
{
  auto const model = bnc_from_json( read_json_file( bnc_path ) );
  write_text_file( out_path, samples_to_csv( model.num_vars(), sample_many( model, count, seed ) ) );
  std::cout << "wrote " << count << " samples\n";
  return 0;
}

void print_audit( audit_result const& r )
{
  if ( auto const* c = std::get_if<mixed_term_certificate>( &r ) )
  {
    std::cout << "audit: certificate, " << c->mixed_pairs << " of " << c->required << " block pairs have mixed terms";
    if ( c->representation_checked )
      std::cout << ", candidate " << ( c->represents ? "represents" : "does not represent" ) << " f_n";
    std::cout << "\n";
    return;
  }
  auto const& w = std::get<mixed_term_witness>( r );
  std::cout << "audit: witness, blocks " << w.block_i + 1 << " and " << w.block_j + 1 << " share no mixed term\n";
  for ( int p = 0; p < 4; ++p )
    std::cout << "  " << to_string( w.points[p] ) << "  p = " << to_exact_string( w.values[p] ) << "  expected " << w.expected[p] << "  decided "
              << w.decided[p] << "\n";
  std::cout << "  identity " << ( w.identity_holds ? "holds" : "fails" ) << ", " << ( w.refutes ? "refutes the candidate" : "no refutation" ) << "\n";
}

int run_separation( int k, std::string const& audit_path, std::string const& out_path )
{
  separation_instance const inst{ k };
  auto const general = qtf_general( inst );
  std::cout << "f_n for n = " << inst.num_vars() << "\n";
  std::cout << "QTF: sgn(" << show( general.poly() ) << ")\n";
  if ( k == 2 )
    std::cout << "same function: sgn(" << show( four_variable_example().poly() ) << ")\n";

  auto const g = primal_graph( hypergraph_of( general.poly() ) );
  auto const d = build_exact_obdd( general, best_ordering( g ) );
  std::cout << "model count " << count_models( d ).get_str() << " of 2^" << inst.num_vars() << "\n";

  if ( k >= 2 )
  {
    auto const positive = qtf_positive( inst );
    std::cout << "positive QTF: " << show( positive.form.poly() ) << " >= " << to_exact_string( positive.threshold ) << " ("
              << positive.form.poly().size() << " terms)\n";
    if ( !out_path.empty() )
      write_json_file( out_path, to_json( positive.form, positive.threshold ) );
    if ( audit_path.empty() )
      print_audit( mixed_term_audit( positive, inst ) );
  }
  if ( !audit_path.empty() )
  {
    auto const doc = ptf_from_json( read_json_file( audit_path ) );
    print_audit( mixed_term_audit( { doc.form, doc.threshold.value_or( rational( 0 ) ) }, inst ) );
  }
  return 0;
}

int run_fixture( std::string const& dir )
{
  std::filesystem::create_directories( dir );
  auto const model = reference_tan();
  auto const path = ( std::filesystem::path( dir ) / "reference_tan.json" ).string();
  write_json_file( path, to_json( model ) );
  std::cout << "wrote " << path << "\n";
  return 0;
}

} // namespace

int main( int argc, char** argv )
{
  CLI::App app{ "Compile Bayesian network classifiers into polynomial threshold functions and OBDDs" };
  app.require_subcommand( 1 );

  std::string bnc_path, out_path, report_path, dot_path, graph_path, ptf_path, ordering_arg = "auto", audit_path;
  double eps = 0.1;
  bool verify = false, exact = false, do_reduce = false;
  int bits = 64, k = 2;
  std::size_t count = 0;
  std::uint64_t seed = 0;

  auto* compile_cmd = app.add_subcommand( "compile", "epsilon-approximate OBDD of a classifier" );
  compile_cmd->add_option( "--bnc", bnc_path, "classifier JSON" )->required();
  compile_cmd->add_option( "--eps", eps, "error bound in (0,1)" )->required();
  compile_cmd->add_option( "--out", out_path, "OBDD JSON output" )->required();
  compile_cmd->add_flag( "--verify", verify, "exhaustive verification (n <= 20)" );
  compile_cmd->add_option( "--report", report_path, "JSON report output" );
  compile_cmd->add_option( "--dot", dot_path, "Graphviz output" );

  auto* ptf_cmd = app.add_subcommand( "ptf", "log-odds polynomial of a classifier" );
  ptf_cmd->add_option( "--bnc", bnc_path, "classifier JSON" )->required();
  ptf_cmd->add_option( "--out", out_path, "PTF JSON output" )->required();
  ptf_cmd->add_option( "--bits", bits, "fraction bits of the coefficients" )->check( CLI::Range( 1, 100 ) );

  auto* width_cmd = app.add_subcommand( "width", "tree-width and path-width of a graph" );
  width_cmd->add_option( "--graph", graph_path, "graph JSON" )->required();
  width_cmd->add_flag( "--exact", exact, "exact search (tree-width n <= 16, path-width n <= 14)" );
  width_cmd->add_option( "--dot", dot_path, "decomposition as Graphviz" );

  auto* obdd_cmd = app.add_subcommand( "obdd", "exact OBDD of a PTF" );
  obdd_cmd->add_option( "--ptf", ptf_path, "PTF JSON" )->required();
  obdd_cmd->add_option( "--ordering", ordering_arg, "auto or an ordering JSON file" );
  obdd_cmd->add_flag( "--reduce", do_reduce, "apply the reduction rules" );
  obdd_cmd->add_option( "--dot", dot_path, "Graphviz output" );
  obdd_cmd->add_option( "--out", out_path, "OBDD JSON output" );

  auto* sample_cmd = app.add_subcommand( "sample", "draw labelled samples from a classifier" );
  sample_cmd->add_option( "--bnc", bnc_path, "classifier JSON" )->required();
  sample_cmd->add_option( "--count", count, "number of samples" )->required();
  sample_cmd->add_option( "--seed", seed, "random seed" )->required();
  sample_cmd->add_option( "--out", out_path, "CSV output" )->required();

  auto* sep_cmd = app.add_subcommand( "separation", "positive versus general QTF family" );
  sep_cmd->add_option( "--k", k, "half the number of variables" )->required()->check( CLI::Range( 1, 30 ) );
  sep_cmd->add_option( "--audit", audit_path, "candidate positive QTF (PTF JSON with threshold)" );
  sep_cmd->add_option( "--out", out_path, "write the positive QTF as PTF JSON" );

  auto* fixture_cmd = app.add_subcommand( "fixture-fig1", "write the 14-variable reference TAN" );
  fixture_cmd->add_option( "--out", out_path, "output directory" )->required();

  try
  {
    app.parse( argc, argv );
  }
  catch ( CLI::CallForHelp const& e )
  {
    return app.exit( e );
  }
  catch ( CLI::ParseError const& e )
  {
    app.exit( e );
    return 2;
  }

  try
  {
    if ( compile_cmd->parsed() )
      return run_compile( bnc_path, eps, out_path, verify, report_path, dot_path );
    if ( ptf_cmd->parsed() )
      return run_ptf( bnc_path, out_path, bits );
    if ( width_cmd->parsed() )
      return run_width( graph_path, exact, dot_path );
    if ( obdd_cmd->parsed() )
      return run_obdd( ptf_path, ordering_arg, do_reduce, dot_path, out_path );
    if ( sample_cmd->parsed() )
      return run_sample( bnc_path, count, seed, out_path );
    if ( sep_cmd->parsed() )
      return run_separation( k, audit_path, out_path );
    if ( fixture_cmd->parsed() )
      return run_fixture( out_path );
  }
  catch ( input_error const& e )
  {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  }
  catch ( capability_error const& e )
  {
    std::cerr << "capability error: " << e.what() << "\n";
    return 3;
  }
  catch ( std::exception const& e )
  {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
