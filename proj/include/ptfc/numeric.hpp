#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace ptfc
{

using rational = mpq_class;
using integer = mpz_class;
using int128 = __int128;

/// Number of bits needed to write the larger of numerator and denominator.
int bit_length( rational const& r );

/// Exact decimal expansion when the reduced denominator has only the prime
/// factors 2 and 5, otherwise "num/den".
std::string to_exact_string( rational const& r );

/// Accepts "3", "-0.125", "1/3", "2.5e-3".
rational parse_rational( std::string const& text );

std::string to_string( int128 v );

/// Rounds x to the nearest multiple of 2^-frac_bits (ties away from zero).
rational round_to_grid( rational const& x, int frac_bits );

/// A point of {0,1}^n.
class assignment
{
public:
  assignment() = default;
  explicit assignment( std::size_t n ) : bits_( n, 0 ) {}
  explicit assignment( std::vector<std::uint8_t> bits ) : bits_( std::move( bits ) ) {}
  assignment( std::initializer_list<int> bits );

  /// Bit i of `index` becomes x_i.
  static assignment from_index( std::size_t n, std::uint64_t index );

  std::size_t size() const noexcept { return bits_.size(); }
  std::uint8_t operator[]( std::size_t i ) const { return bits_[i]; }
  void set( std::size_t i, bool value ) { bits_[i] = value ? 1 : 0; }
  std::uint64_t to_index() const;
  std::size_t weight() const;
  std::vector<std::uint8_t> const& bits() const noexcept { return bits_; }

  friend bool operator==( assignment const&, assignment const& ) = default;

private:
  std::vector<std::uint8_t> bits_;
};

std::string to_string( assignment const& a );

} // namespace ptfc
