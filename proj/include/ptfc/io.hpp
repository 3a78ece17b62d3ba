#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "bnc.hpp"
#include "compile.hpp"
#include "gobdd.hpp"
#include "graphs.hpp"
#include "obdd.hpp"
#include "ptf.hpp"

namespace ptfc
{

using json = nlohmann::json;

/// All variable indices in the JSON formats are 0-based.  Malformed
/// documents raise input_error.

/// { "n", "class_prior": [num, den] (= P(C=1)), "nodes": [{ "id", "parents",
///   "cpt": [{ "parent_bits", "c", "p1": [num, den] }] }] }
bnc_model bnc_from_json( json const& j );
json to_json( bnc_model const& m );

/// { "n", "encoding": "01"|"pm1", "terms": [{ "vars", "coeff" }] } with an
/// optional "threshold"; coefficients are exact decimals or "num/den".
struct ptf_document
{
  ptf form;
  std::optional<rational> threshold;
};
ptf_document ptf_from_json( json const& j );
json to_json( ptf const& p, std::optional<rational> const& threshold = std::nullopt );

/// { "n", "edges": [[v, ...], ...] }; hyperedges become cliques.
graph graph_from_json( json const& j );
json to_json( graph const& g );

/// A bare array or { "ordering": [...] }.
std::vector<int> ordering_from_json( json const& j );

json to_json( decomposition const& d );

/// { "n", "ordering", "nodes": [{ "id", "layer", "var", "lo", "hi", "sink" }],
///   "start", "layered" }.  Sinks have var null and lo = hi = -1.
obdd obdd_from_json( json const& j );
json to_json( obdd const& d );

/// As the OBDD format, one sink, plus "p" (0-edge probability, exact decimal)
/// on every inner node.
gobdd gobdd_from_json( json const& j );
json to_json( gobdd const& d );

json to_json( compile_report const& r );
json to_json( verification_report const& r );

/// Header x1,...,xn,c and one row per sample.
std::string samples_to_csv( int n, std::vector<std::pair<assignment, int>> const& samples );

std::string read_text_file( std::string const& path );
void write_text_file( std::string const& path, std::string const& text );
json read_json_file( std::string const& path );
void write_json_file( std::string const& path, json const& j );

} // namespace ptfc
