#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "bnc.hpp"
#include "numeric.hpp"

namespace ptfc
{

/// Sorted, duplicate-free variable indices of a monomial; empty is the constant.
using term = std::vector<int>;

/// Orders terms by degree, then lexicographically.
struct term_order
{
  bool operator()( term const& a, term const& b ) const
  {
    if ( a.size() != b.size() )
      return a.size() < b.size();
    return a < b;
  }
};

/// Sparse multilinear polynomial sum_I beta_I x_I with exact rational
/// coefficients.  Zero coefficients are never stored.
class polynomial
{
public:
  using term_map = std::map<term, rational, term_order>;

  explicit polynomial( int num_vars = 0 ) : n_( num_vars ) {}

  int num_vars() const noexcept { return n_; }
  term_map const& terms() const noexcept { return terms_; }
  std::size_t size() const noexcept { return terms_.size(); }
  int degree() const;

  /// Adds c * x_t.  Repeated variables collapse (x^2 = x over {0,1}).
  void add( term t, rational const& c );
  rational coefficient( term const& t ) const;
  rational constant() const { return coefficient( {} ); }

  rational eval( assignment const& a ) const;

  polynomial scaled( rational const& factor ) const;
  polynomial operator+( polynomial const& other ) const;
  polynomial operator-( polynomial const& other ) const;

  friend bool operator==( polynomial const&, polynomial const& ) = default;

private:
  int n_;
  term_map terms_;
};

enum class encoding
{
  zero_one,
  plus_minus_one
};

/// sgn(p(x)) with sgn = 1 on nonnegative values.  With the +-1 encoding the
/// polynomial is read in x' = 1 - 2x, so inputs are still given as 0/1 bits.
class ptf
{
public:
  ptf() = default;
  explicit ptf( polynomial p, encoding e = encoding::zero_one ) : poly_( std::move( p ) ), enc_( e ) {}

  polynomial const& poly() const noexcept { return poly_; }
  encoding domain() const noexcept { return enc_; }
  int num_vars() const noexcept { return poly_.num_vars(); }

  /// p evaluated at the image of the 0/1 input under the encoding.
  rational eval( assignment const& a ) const;
  bool sign( assignment const& a ) const { return eval( a ) >= 0; }

private:
  polynomial poly_;
  encoding enc_ = encoding::zero_one;
};

/// p(x) >= t.
struct threshold_ptf
{
  ptf form;
  rational threshold;

  bool decide( assignment const& a ) const { return form.eval( a ) >= threshold; }
  /// The same function as a plain sign representation of p - t.
  ptf as_sign_form() const;
};

/// Truth table indexed by assignment::to_index().
struct truth_table
{
  int num_vars = 0;
  std::vector<std::uint8_t> values;

  static truth_table from_function( int n, std::function<bool( assignment const& )> const& f );
  bool operator()( assignment const& a ) const { return values.at( a.to_index() ) != 0; }
};

rational eval( polynomial const& p, assignment const& a );
bool sign( polynomial const& p, assignment const& a );

/// The unique multilinear polynomial that equals f on {0,1}^n.
polynomial exact_representation( truth_table const& f, int max_vars = 20 );

/// Re-expresses the polynomial over the other encoding; the Boolean function
/// computed on 0/1 inputs is unchanged.
ptf convert_domain( ptf const& p, encoding target );

/// Nonnegative coefficients, no constant term, nonnegative threshold.
bool is_positive( ptf const& p, rational const& threshold );

struct literal
{
  int var;
  bool negated = false;
};
using dnf = std::vector<std::vector<literal>>;

/// Products for conjunctions, sums for disjunctions, threshold 1/2.
threshold_ptf monotone_dnf_to_positive_ptf( int num_vars, dnf const& formula );

/// Log-odds polynomial of a classifier, coefficients rounded to multiples of
/// 2^-frac_bits.  `tolerance` bounds |value| below which the rounded sign is
/// not trusted and decide() recomputes the exact odds.
struct log_odds_ptf
{
  ptf form;
  int frac_bits = 64;
  rational tolerance;
};

/// Expands log(p^0_1/p^0_0) + sum_i sum_config log-ratio * indicator product
/// into a multilinear polynomial over {0,1}.  Every term lies inside a family
/// {i} u parents(i).
log_odds_ptf bnc_to_ptf( bnc_model const& m, int frac_bits = 64 );

/// Sign of the log-odds polynomial with the exact-odds fallback near zero;
/// agrees with classify() everywhere.
bool decide( bnc_model const& m, log_odds_ptf const& p, assignment const& a );

/// Natural logarithm of a positive rational, correctly rounded to a multiple
/// of 2^-frac_bits.
rational log_on_grid( rational const& x, int frac_bits );

/// p scaled by the common denominator of its coefficients so that every
/// coefficient is an integer.
struct integer_form
{
  int num_vars = 0;
  int128 constant = 0;
  std::vector<std::pair<term, int128>> terms;
  integer scale;
};

/// Throws capability_error if sum |coefficients| does not fit in 120 bits.
integer_form to_integer_form( polynomial const& p );

} // namespace ptfc
