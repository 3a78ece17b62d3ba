#include "ptfc/numeric.hpp"

#include <algorithm>
#include <cctype>

#include "ptfc/errors.hpp"

namespace ptfc
{

int bit_length( rational const& r )
{
  auto const num = static_cast<int>( mpz_sizeinbase( r.get_num_mpz_t(), 2 ) );
  auto const den = static_cast<int>( mpz_sizeinbase( r.get_den_mpz_t(), 2 ) );
  return std::max( num, den );
}

std::string to_exact_string( rational const& r )
{
  integer den = r.get_den();
  int twos = 0, fives = 0;
  while ( mpz_divisible_ui_p( den.get_mpz_t(), 2 ) )
  {
    den /= 2;
    ++twos;
  }
  while ( mpz_divisible_ui_p( den.get_mpz_t(), 5 ) )
  {
    den /= 5;
    ++fives;
  }
  if ( den != 1 )
  {
    return r.get_num().get_str() + "/" + r.get_den().get_str();
  }

  int const digits = std::max( twos, fives );
  integer scale;
  mpz_ui_pow_ui( scale.get_mpz_t(), 10, digits );
  integer scaled = r.get_num() * scale / r.get_den();
  bool const negative = scaled < 0;
  if ( negative )
    scaled = -scaled;
  std::string body = scaled.get_str();
  if ( digits > 0 )
  {
    if ( static_cast<int>( body.size() ) <= digits )
      body.insert( 0, std::string( digits - body.size() + 1, '0' ) );
    body.insert( body.size() - digits, "." );
  }
  return negative ? "-" + body : body;
}

rational parse_rational( std::string const& text )
{
  std::string s;
  std::copy_if( text.begin(), text.end(), std::back_inserter( s ), []( char c ) { return !std::isspace( static_cast<unsigned char>( c ) ); } );
  if ( s.empty() )
    throw input_error( "empty number" );

  try
  {
    if ( auto slash = s.find( '/' ); slash != std::string::npos )
    {
      rational r( integer( s.substr( 0, slash ), 10 ), integer( s.substr( slash + 1 ), 10 ) );
      if ( r.get_den() == 0 )
        throw input_error( "zero denominator in '" + text + "'" );
      r.canonicalize();
      return r;
    }

    long exponent = 0;
    if ( auto e = s.find_first_of( "eE" ); e != std::string::npos )
    {
      exponent = std::stol( s.substr( e + 1 ) );
      s = s.substr( 0, e );
    }
    bool negative = false;
    if ( !s.empty() && ( s[0] == '-' || s[0] == '+' ) )
    {
      negative = s[0] == '-';
      s = s.substr( 1 );
    }
    std::string digits = s;
    if ( auto dot = s.find( '.' ); dot != std::string::npos )
    {
      digits = s.substr( 0, dot ) + s.substr( dot + 1 );
      exponent -= static_cast<long>( s.size() - dot - 1 );
    }
    if ( digits.empty() || !std::all_of( digits.begin(), digits.end(), []( char c ) { return std::isdigit( static_cast<unsigned char>( c ) ); } ) )
      throw input_error( "not a number: '" + text + "'" );

    rational r{ integer( digits, 10 ) };
    integer power;
    mpz_ui_pow_ui( power.get_mpz_t(), 10, static_cast<unsigned long>( exponent < 0 ? -exponent : exponent ) );
    if ( exponent < 0 )
      r /= power;
    else
      r *= power;
    r.canonicalize();
    return negative ? rational( -r ) : r;
  }
  catch ( std::invalid_argument const& )
  {
    throw input_error( "not a number: '" + text + "'" );
  }
}

std::string to_string( int128 v )
{
  if ( v == 0 )
    return "0";
  bool const negative = v < 0;
  unsigned __int128 u = negative ? -static_cast<unsigned __int128>( v ) : static_cast<unsigned __int128>( v );
  std::string out;
  while ( u > 0 )
  {
    out.push_back( static_cast<char>( '0' + static_cast<int>( u % 10 ) ) );
    u /= 10;
  }
  if ( negative )
    out.push_back( '-' );
  std::reverse( out.begin(), out.end() );
  return out;
}

rational round_to_grid( rational const& x, int frac_bits )
{
  integer scale;
  mpz_ui_pow_ui( scale.get_mpz_t(), 2, static_cast<unsigned long>( frac_bits ) );
  rational scaled = x * scale;
  integer const twice_num = 2 * abs( scaled.get_num() ) + scaled.get_den();
  integer const den2 = 2 * scaled.get_den();
  integer rounded = twice_num / den2;
  if ( scaled < 0 )
    rounded = -rounded;
  rational r( rounded, scale );
  r.canonicalize();
  return r;
}

assignment::assignment( std::initializer_list<int> bits )
{
  bits_.reserve( bits.size() );
  for ( int b : bits )
    bits_.push_back( b ? 1 : 0 );
}

assignment assignment::from_index( std::size_t n, std::uint64_t index )
{
  assignment a( n );
  for ( std::size_t i = 0; i < n; ++i )
    a.bits_[i] = static_cast<std::uint8_t>( ( index >> i ) & 1u );
  return a;
}

std::uint64_t assignment::to_index() const
{
  std::uint64_t index = 0;
  for ( std::size_t i = 0; i < bits_.size() && i < 64; ++i )
    index |= static_cast<std::uint64_t>( bits_[i] ) << i;
  return index;
}

std::size_t assignment::weight() const
{
  return static_cast<std::size_t>( std::count( bits_.begin(), bits_.end(), 1 ) );
}

std::string to_string( assignment const& a )
{
  std::string s;
  for ( auto b : a.bits() )
    s.push_back( b ? '1' : '0' );
  return s;
}

} // namespace ptfc
