#include "ptfc/ptf.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <mpfr.h>

#include "ptfc/errors.hpp"

namespace ptfc
{

int polynomial::degree() const
{
  int d = 0;
  for ( auto const& [t, c] : terms_ )
    d = std::max( d, static_cast<int>( t.size() ) );
  return d;
}

void polynomial::add( term t, rational const& c )
{
  std::sort( t.begin(), t.end() );
  t.erase( std::unique( t.begin(), t.end() ), t.end() );
  for ( int v : t )
  {
    if ( v < 0 || v >= n_ )
      throw input_error( "term variable " + std::to_string( v ) + " outside [0, " + std::to_string( n_ ) + ")" );
  }
  if ( c == 0 )
    return;
  rational v = c;
  v.canonicalize();
  auto [it, inserted] = terms_.try_emplace( std::move( t ), v );
  if ( !inserted )
  {
    it->second += v;
    if ( it->second == 0 )
      terms_.erase( it );
  }
}

rational polynomial::coefficient( term const& t ) const
{
  auto it = terms_.find( t );
  return it == terms_.end() ? rational( 0 ) : it->second;
}

rational polynomial::eval( assignment const& a ) const
{
  if ( static_cast<int>( a.size() ) != n_ )
    throw input_error( "assignment has " + std::to_string( a.size() ) + " bits, polynomial has " + std::to_string( n_ ) + " variables" );
  rational value = 0;
  for ( auto const& [t, c] : terms_ )
  {
    if ( std::all_of( t.begin(), t.end(), [&]( int v ) { return a[v] != 0; } ) )
      value += c;
  }
  return value;
}

polynomial polynomial::scaled( rational const& factor ) const
{
  polynomial out( n_ );
  for ( auto const& [t, c] : terms_ )
    out.add( t, c * factor );
  return out;
}

polynomial polynomial::operator+( polynomial const& other ) const
{
  polynomial out = *this;
  out.n_ = std::max( n_, other.n_ );
  for ( auto const& [t, c] : other.terms_ )
    out.add( t, c );
  return out;
}

polynomial polynomial::operator-( polynomial const& other ) const
{
  return *this + other.scaled( -1 );
}

rational ptf::eval( assignment const& a ) const
{
  if ( enc_ == encoding::zero_one )
    return poly_.eval( a );
  if ( static_cast<int>( a.size() ) != poly_.num_vars() )
    throw input_error( "assignment length does not match the PTF" );
  rational value = 0;
  for ( auto const& [t, c] : poly_.terms() )
  {
    auto const ones = std::count_if( t.begin(), t.end(), [&]( int v ) { return a[v] != 0; } );
    value += ( ones % 2 ) ? rational( -c ) : c;
  }
  return value;
}

ptf threshold_ptf::as_sign_form() const
{
  auto p = convert_domain( form, encoding::zero_one ).poly();
  p.add( {}, -threshold );
  return ptf( std::move( p ) );
}

truth_table truth_table::from_function( int n, std::function<bool( assignment const& )> const& f )
{
  if ( n < 0 || n > 26 )
    throw capability_error( "truth tables are limited to 26 variables" );
  truth_table t;
  t.num_vars = n;
  t.values.resize( std::size_t{ 1 } << n );
  for ( std::uint64_t i = 0; i < t.values.size(); ++i )
    t.values[i] = f( assignment::from_index( n, i ) ) ? 1 : 0;
  return t;
}

rational eval( polynomial const& p, assignment const& a )
{
  return p.eval( a );
}

bool sign( polynomial const& p, assignment const& a )
{
  return p.eval( a ) >= 0;
}

polynomial exact_representation( truth_table const& f, int max_vars )
{
  int const n = f.num_vars;
  if ( n > max_vars )
    throw capability_error( "exact representation is limited to " + std::to_string( max_vars ) + " variables" );
  if ( f.values.size() != ( std::size_t{ 1 } << n ) )
    throw input_error( "truth table size does not match 2^n" );

  /* Moebius transform over the subset lattice */
  std::vector<std::int64_t> coeff( f.values.begin(), f.values.end() );
  for ( int i = 0; i < n; ++i )
  {
    std::uint64_t const bit = std::uint64_t{ 1 } << i;
    for ( std::uint64_t mask = 0; mask < coeff.size(); ++mask )
      if ( mask & bit )
        coeff[mask] -= coeff[mask ^ bit];
  }

  polynomial p( n );
  for ( std::uint64_t mask = 0; mask < coeff.size(); ++mask )
  {
    if ( coeff[mask] == 0 )
      continue;
    term t;
    for ( int i = 0; i < n; ++i )
      if ( mask >> i & 1u )
        t.push_back( i );
    p.add( std::move( t ), rational( static_cast<long>( coeff[mask] ) ) );
  }
  return p;
}

namespace
{

/* calls visit(J) for every J with required <= J <= full (as sorted vectors) */
template<typename Visit>
void for_each_superset( term const& full, std::vector<bool> const& required, Visit&& visit )
{
  std::vector<int> free_positions;
  for ( std::size_t j = 0; j < full.size(); ++j )
    if ( !required[j] )
      free_positions.push_back( static_cast<int>( j ) );

  for ( std::uint64_t mask = 0; mask < ( std::uint64_t{ 1 } << free_positions.size() ); ++mask )
  {
    term t;
    int extra = 0;
    std::vector<bool> chosen = required;
    for ( std::size_t k = 0; k < free_positions.size(); ++k )
      if ( mask >> k & 1u )
      {
        chosen[free_positions[k]] = true;
        ++extra;
      }
    for ( std::size_t j = 0; j < full.size(); ++j )
      if ( chosen[j] )
        t.push_back( full[j] );
    visit( std::move( t ), extra );
  }
}

} // namespace

ptf convert_domain( ptf const& p, encoding target )
{
  if ( p.domain() == target )
    return p;

  polynomial out( p.num_vars() );
  for ( auto const& [t, c] : p.poly().terms() )
  {
    std::vector<bool> none( t.size(), false );
    if ( target == encoding::plus_minus_one )
    {
      /* x = (1 - x') / 2 */
      rational const base = c / rational( integer( 1 ) << static_cast<unsigned>( t.size() ) );
      for_each_superset( t, none, [&]( term j, int size ) { out.add( std::move( j ), size % 2 ? rational( -base ) : base ); } );
    }
    else
    {
      /* x' = 1 - 2x */
      for_each_superset( t, none, [&]( term j, int size ) {
        rational f = c * rational( integer( 1 ) << static_cast<unsigned>( size ) );
        out.add( std::move( j ), size % 2 ? rational( -f ) : f );
      } );
    }
  }
  return ptf( std::move( out ), target );
}

bool is_positive( ptf const& p, rational const& threshold )
{
  if ( threshold < 0 )
    return false;
  for ( auto const& [t, c] : p.poly().terms() )
  {
    if ( t.empty() || c < 0 )
      return false;
  }
  return true;
}

threshold_ptf monotone_dnf_to_positive_ptf( int num_vars, dnf const& formula )
{
  polynomial p( num_vars );
  for ( auto const& conj : formula )
  {
    term t;
    for ( auto const& lit : conj )
    {
      if ( lit.negated )
        throw input_error( "monotone DNF contains the negated literal ~x" + std::to_string( lit.var ) );
      t.push_back( lit.var );
    }
    if ( t.empty() )
      throw input_error( "empty conjunction in monotone DNF" );
    p.add( std::move( t ), 1 );
  }
  return { ptf( std::move( p ) ), rational( 1, 2 ) };
}

rational log_on_grid( rational const& x, int frac_bits )
{
  if ( x <= 0 )
    throw precondition_error( "logarithm of a nonpositive number" );
  mpfr_prec_t const prec = frac_bits + 96 + static_cast<mpfr_prec_t>( bit_length( x ) );
  mpfr_t v;
  mpfr_init2( v, prec );
  mpfr_set_q( v, x.get_mpq_t(), MPFR_RNDN );
  mpfr_log( v, v, MPFR_RNDN );
  mpfr_mul_2ui( v, v, static_cast<unsigned long>( frac_bits ), MPFR_RNDN );
  integer z;
  mpfr_get_z( z.get_mpz_t(), v, MPFR_RNDN );
  mpfr_clear( v );
  rational r( z, integer( 1 ) << static_cast<unsigned>( frac_bits ) );
  r.canonicalize();
  return r;
}

log_odds_ptf bnc_to_ptf( bnc_model const& m, int frac_bits )
{
  if ( frac_bits < 8 || frac_bits > 1000 )
    throw input_error( "fractional bits must be in [8, 1000]" );
  int const n = m.num_vars();
  polynomial p( n );
  p.add( {}, log_on_grid( m.prior( 1 ) / m.prior( 0 ), frac_bits ) );

  for ( int i = 0; i < n; ++i )
  {
    auto const& parents = m.parents( i );
    term family = parents;
    family.push_back( i );
    std::sort( family.begin(), family.end() );
    auto const self_pos = static_cast<std::size_t>( std::find( family.begin(), family.end(), i ) - family.begin() );

    std::size_t const configs = std::size_t{ 1 } << parents.size();
    for ( std::size_t config = 0; config < configs; ++config )
    {
      rational const& q1 = m.node( i ).p1[config * 2 + 1];
      rational const& q0 = m.node( i ).p1[config * 2 + 0];
      for ( int value : { 0, 1 } )
      {
        rational const ratio = value ? rational( q1 / q0 ) : rational( ( 1 - q1 ) / ( 1 - q0 ) );
        rational const weight = log_on_grid( ratio, frac_bits );
        if ( weight == 0 )
          continue;

        /* prod_j (a_j ? x_j : 1 - x_j) over the family */
        std::vector<bool> required( family.size(), false );
        required[self_pos] = value == 1;
        for ( std::size_t j = 0; j < parents.size(); ++j )
        {
          auto const pos = static_cast<std::size_t>( std::find( family.begin(), family.end(), parents[j] ) - family.begin() );
          required[pos] = ( config >> j & 1u ) != 0;
        }
        for_each_superset( family, required, [&]( term t, int extra ) { p.add( std::move( t ), extra % 2 ? rational( -weight ) : weight ); } );
      }
    }
  }

  log_odds_ptf out;
  out.form = ptf( std::move( p ) );
  out.frac_bits = frac_bits;
  int const log_n = n > 1 ? static_cast<int>( std::ceil( std::log2( static_cast<double>( n ) ) ) ) : 0;
  int const exponent = frac_bits - 2 * m.precision() - log_n;
  out.tolerance = exponent >= 0 ? rational( integer( 1 ), integer( 1 ) << static_cast<unsigned>( exponent ) )
                                : rational( integer( 1 ) << static_cast<unsigned>( -exponent ) );
  return out;
}

bool decide( bnc_model const& m, log_odds_ptf const& p, assignment const& a )
{
  rational const v = p.form.eval( a );
  if ( abs( v ) < p.tolerance )
    return classify( m, a );
  return v >= 0;
}

namespace
{

int128 to_int128( integer const& z )
{
  integer mag = abs( z );
  integer const low_mask = ( integer( 1 ) << 64 ) - 1;
  integer const lo = mag & low_mask;
  integer const hi = mag >> 64;
  auto const lo64 = static_cast<std::uint64_t>( mpz_getlimbn( lo.get_mpz_t(), 0 ) );
  auto const hi64 = hi == 0 ? std::uint64_t{ 0 } : static_cast<std::uint64_t>( mpz_getlimbn( hi.get_mpz_t(), 0 ) );
  int128 const v = static_cast<int128>( ( static_cast<unsigned __int128>( hi64 ) << 64 ) | lo64 );
  return z < 0 ? -v : v;
}

} // namespace

integer_form to_integer_form( polynomial const& p )
{
  integer scale = 1;
  for ( auto const& [t, c] : p.terms() )
    mpz_lcm( scale.get_mpz_t(), scale.get_mpz_t(), c.get_den_mpz_t() );

  integer total = 0;
  std::vector<std::pair<term, integer>> scaled;
  for ( auto const& [t, c] : p.terms() )
  {
    integer v = c.get_num() * ( scale / c.get_den() );
    total += abs( v );
    scaled.emplace_back( t, std::move( v ) );
  }
  if ( mpz_sizeinbase( total.get_mpz_t(), 2 ) > 120 )
    throw capability_error( "polynomial coefficients do not fit the 128-bit partial-sum grid" );

  integer_form out;
  out.num_vars = p.num_vars();
  out.scale = scale;
  for ( auto& [t, v] : scaled )
  {
    if ( t.empty() )
      out.constant = to_int128( v );
    else
      out.terms.emplace_back( t, to_int128( v ) );
  }
  return out;
}

} // namespace ptfc
