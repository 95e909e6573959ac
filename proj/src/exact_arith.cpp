#include "adlab/exact_arith.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace adlab {

u128 saturating_pow(u128 base, unsigned exp) {
  u128 result = 1;
  for (unsigned i = 0; i < exp; ++i) {
    if (base != 0 && result > kU128Max / base) return kU128Max;
    result *= base;
  }
  return result;
}

namespace {

// z^k <= n without overflow.
bool pow_le(u128 z, unsigned k, u128 n) {
  u128 acc = 1;
  for (unsigned i = 0; i < k; ++i) {
    if (z != 0 && acc > n / z) return false;
    acc *= z;
  }
  return acc <= n;
}

}  // namespace

u128 ikth_root(u128 n, unsigned k) {
  if (k == 0) throw std::invalid_argument("ikth_root: k must be >= 1");
  if (k == 1 || n < 2) return n;

  const long double guess = std::pow(static_cast<long double>(n), 1.0L / k);
  u128 z = guess < 1 ? 0 : static_cast<u128>(guess);

  while (!pow_le(z, k, n)) --z;
  while (pow_le(z + 1, k, n)) ++z;
  return z;
}

u128 floor_scaled_root(u128 n, u128 m, unsigned a, unsigned b) {
  if (m == 0) throw std::invalid_argument("floor_scaled_root: m must be >= 1");
  const u128 ma = saturating_pow(m, a);
  if (ma > n) return 0;
  // z^b * m^a <= n  <=>  z^b <= floor(n / m^a) since z^b is an integer.
  return ikth_root(n / ma, b);
}

u128 residue_count(u128 z, u64 l, u64 m) {
  if (m == 0 || l == 0 || l > m) throw std::invalid_argument("residue_count: need 1 <= l <= m");
  if (z < l) return 0;
  return (z - l) / m + 1;
}

double psi_saw(double t) { return t - std::floor(t) - 0.5; }

double dist_to_int(double t) { return std::abs(t - std::nearbyint(t)); }

std::string to_string(u128 v) {
  if (v == 0) return "0";
  std::string s;
  while (v != 0) {
    s.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  std::reverse(s.begin(), s.end());
  return s;
}

u128 parse_u128(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("empty integer");
  u128 v = 0;
  for (char c : s) {
    if (c < '0' || c > '9') throw std::invalid_argument("not a non-negative integer: " + s);
    const u128 digit = static_cast<u128>(c - '0');
    if (v > (kU128Max - digit) / 10) throw std::out_of_range("integer overflow: " + s);
    v = v * 10 + digit;
  }
  return v;
}

EvalPoint::EvalPoint(u128 n, u128 scale) : n_(n), scale_(scale) {
  if (n == 0) throw std::invalid_argument("EvalPoint: N must be >= 1");
  if (scale == 0) throw std::invalid_argument("EvalPoint: scale must be >= 1");
}

double EvalPoint::x() const {
  // Split into integer and fractional parts to keep the quotient accurate.
  const u128 q = n_ / scale_;
  const u128 r = n_ % scale_;
  return static_cast<double>(q) + static_cast<double>(r) / static_cast<double>(scale_);
}

}  // namespace adlab
