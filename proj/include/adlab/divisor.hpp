// Congruence-restricted asymmetric divisor function and its coefficient sums.
#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "adlab/exact_arith.hpp"
#include "adlab/numeric.hpp"
#include "adlab/params.hpp"

namespace adlab {

/// tau(n) = #{(n1, n2) : n1^a n2^b = n, n1 == l1 (mod M1), n2 == l2 (mod M2)}.
u64 tau_point(u128 n, const Params& p);

inline constexpr u64 kDefaultSegment = u64{1} << 24;

/// Counts for n in (offset, offset + length]; entry i holds tau(offset + 1 + i).
std::vector<std::uint32_t> tau_segment(u64 offset, u64 length, const Params& p);

/// Counts for n = 0..nmax, entry 0 unused (always zero).
///
/// Built segment by segment; segments are processed by `threads` workers and
/// written to disjoint ranges, so the result does not depend on the thread count.
std::vector<std::uint32_t> tau_sieve(u64 nmax, const Params& p, unsigned threads = 1,
                                     u64 segment = kDefaultSegment);

/// Header of a binary sieve dump. All fields little-endian.
struct SieveDumpHeader {
  std::uint16_t version = 1;
  std::uint8_t a = 1;
  std::uint8_t b = 1;
  std::uint32_t m1 = 1;
  std::uint32_t m2 = 1;
  std::uint32_t l1 = 1;
  std::uint32_t l2 = 1;
  std::uint64_t offset = 0;
  std::uint64_t length = 0;
};

/// Writes "ADLB" + header + length little-endian u32 counts.
void write_sieve_dump(std::ostream& os, const Params& p, u64 offset,
                      const std::vector<std::uint32_t>& counts);

struct SieveDump {
  SieveDumpHeader header;
  std::vector<std::uint32_t> counts;
};

SieveDump read_sieve_dump(std::istream& is);

/// One factorisation n = h^a r^b with weight h^{-(a+2b)/(2(a+b))} r^{-(2a+b)/(2(a+b))}.
struct Decomposition {
  u64 h = 1;
  u64 r = 1;
  double weight = 1.0;
};

/// Exponents of the decomposition weight.
struct WeightExponents {
  double h_exp;  // (a + 2b) / (2(a + b))
  double r_exp;  // (2a + b) / (2(a + b))
};
WeightExponents weight_exponents(unsigned a, unsigned b);

/// Every (h, r) with h^a r^b = n, ordered by increasing h.
std::vector<Decomposition> decompositions(u128 n, unsigned a, unsigned b);

struct DecompositionSum {
  double value = 0.0;
  std::vector<Decomposition> witnesses;
};

/// g(n) = sum over n = h^a r^b of the decomposition weights.
DecompositionSum g_ab(u128 n, const Params& p);

/// g*(n): the cosine-twisted sum over ordered pairs of decompositions of n,
/// evaluated by explicit pair enumeration.
DecompositionSum g_star(u128 n, const Params& p);

/// Exact phase h*l1/M1 + r*l2/M2 reduced into [0, 1).
double congruence_phase(u64 h, u64 r, const Params& p);

/// g(n) for n = 0..x (entry 0 unused), by streaming all h^a r^b <= x.
std::vector<double> g_table(u64 x, unsigned a, unsigned b);

/// g*(n) for n = 0..x via |sum_j w_j e(h_j l1/M1 + r_j l2/M2)|^2 per n.
std::vector<double> g_star_table(u64 x, const Params& p);

/// sum_{n <= x} g(n), or sum_{n <= x} g(n) n^{-1/(2(a+b))} when weighted.
double g_partial_sum(u64 x, const Params& p, bool weighted);

/// Exact sum of g(n)^2 over lo < n <= hi.
double g_sq_range_sum(u64 lo, u64 hi, unsigned a, unsigned b);

/// Decay exponent of the tail sum_{n > y} g(n)^2, namely a / ((a+b) b).
double g_tail_exponent(unsigned a, unsigned b);

/// Empirical constant C for sum_{n>y} g^2 <= C y^{-exponent}: twice the largest
/// scaled partial tail over y in {1e2, 1e3, 1e4} summed to 1e6. Cached per (a, b).
double g_tail_constant(unsigned a, unsigned b);

inline constexpr u64 kDefaultTailRange = 1000;
inline constexpr u64 kMaxTailEntries = 20'000'000;

/// Bracket for sum_{n > y} g(n)^2.
///
/// value: exact partial tail over y < n <= y * range_factor (clamped to
/// kMaxTailEntries entries); lower = value; upper = max(value, C y^{-exponent}).
SeriesBracket g_tail_bracket(double y, const Params& p, u64 range_factor = kDefaultTailRange);

}  // namespace adlab
