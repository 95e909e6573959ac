// Exact integer primitives for lattice-point counts under x^a y^b <= N.
#pragma once

#include <cstdint>
#include <string>

namespace adlab {

using u64 = std::uint64_t;
__extension__ typedef unsigned __int128 u128;

/// Largest value representable in the counting layer.
inline constexpr u128 kU128Max = ~static_cast<u128>(0);

/// base^exp, saturating at kU128Max instead of wrapping.
u128 saturating_pow(u128 base, unsigned exp);

/// The unique z >= 0 with z^k <= n < (z+1)^k.
///
/// A floating-point estimate seeds the search; the answer is settled by
/// exact integer comparisons, so the result does not depend on rounding.
u128 ikth_root(u128 n, unsigned k);

/// Largest z >= 0 with z^b * m^a <= n (zero when m^a > n).
u128 floor_scaled_root(u128 n, u128 m, unsigned a, unsigned b);

/// #{k >= 1 : k == l (mod m), k <= z} for 1 <= l <= m.
u128 residue_count(u128 z, u64 l, u64 m);

/// Sawtooth t - floor(t) - 1/2; equals -1/2 at integers.
double psi_saw(double t);

/// Distance from t to the nearest integer.
double dist_to_int(double t);

std::string to_string(u128 v);
u128 parse_u128(const std::string& s);

/// A rational abscissa x = n / scale, where scale = M1^a M2^b.
///
/// Carrying the integer numerator lets summatory counts be exact; only the
/// smooth main term sees floating point.
class EvalPoint {
 public:
  EvalPoint(u128 n, u128 scale);

  u128 n() const { return n_; }
  u128 scale() const { return scale_; }
  double x() const;

 private:
  u128 n_;
  u128 scale_;
};

}  // namespace adlab
