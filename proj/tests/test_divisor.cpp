#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "adlab/divisor.hpp"
#include "adlab/hurwitz.hpp"
#include "oracles.hpp"

using namespace adlab;

namespace {

const Params kTrivial12 = Params::make(1, 2, 1, 1, 1, 1);

std::vector<Params> mixed_params() {
  return {Params::make(1, 2, 1, 1, 1, 1), Params::make(2, 3, 1, 1, 1, 1), Params::make(1, 4, 1, 1, 1, 1),
          Params::make(1, 2, 2, 3, 1, 2), Params::make(2, 3, 2, 3, 1, 2), Params::make(1, 4, 2, 3, 1, 2),
          Params::make(1, 1, 3, 4, 2, 1)};
}

}  // namespace

TEST_CASE("tau_point examples") {
  CHECK(tau_point(4, kTrivial12) == 2);
  CHECK(tau_point(1, kTrivial12) == 1);
  CHECK(tau_point(1, Params::make(2, 3, 5, 7, 1, 1)) == 1);
  CHECK(tau_point(4, Params::make(1, 2, 2, 2, 1, 1)) == 0);
}

TEST_CASE("tau_point matches the brute-force double loop") {
  for (const auto& p : mixed_params()) {
    const auto t = oracle::tau_table(20000, p);
    for (u64 n = 1; n <= 20000; ++n) REQUIRE(tau_point(n, p) == t[n]);
  }
}

TEST_CASE("tau_sieve examples") {
  const auto s = tau_sieve(100, kTrivial12);
  CHECK(std::accumulate(s.begin(), s.end(), u64{0}) == 153);
  const auto one = tau_sieve(1, kTrivial12);
  REQUIRE(one.size() == 2);
  CHECK(one[1] == 1);
  CHECK_THROWS_AS(tau_sieve(u64{1} << 41, kTrivial12), BudgetError);
}

TEST_CASE("tau_sieve agrees with tau_point at random indices") {
  SplitMix64 rng(5);
  for (const auto& p : mixed_params()) {
    const u64 nmax = 300000;
    const auto s = tau_sieve(nmax, p, 1, 4096);
    for (int i = 0; i < 1000; ++i) {
      const u64 n = 1 + rng.next() % nmax;
      REQUIRE(s[n] == tau_point(n, p));
    }
  }
}

TEST_CASE("tau_sieve is independent of thread count and segment size") {
  const Params p = Params::make(1, 2, 2, 3, 1, 2);
  const auto a = tau_sieve(200000, p, 1);
  const auto b = tau_sieve(200000, p, 3, 1000);
  CHECK(a == b);
}

TEST_CASE("tau_segment windows") {
  const Params p = Params::make(2, 3, 1, 1, 1, 1);
  const auto full = tau_sieve(5000, p);
  const auto seg = tau_segment(1234, 777, p);
  for (u64 i = 0; i < 777; ++i) REQUIRE(seg[i] == full[1235 + i]);
}

TEST_CASE("residue completeness") {
  for (unsigned ab = 0; ab < 3; ++ab) {
    const unsigned a = ab == 2 ? 2 : 1;
    const unsigned b = ab == 0 ? 2 : (ab == 1 ? 4 : 3);
    const auto full = tau_sieve(10000, Params::make(a, b, 1, 1, 1, 1));
    for (u64 m1 = 1; m1 <= 4; ++m1) {
      for (u64 m2 = 1; m2 <= 4; ++m2) {
        std::vector<u64> total(10001, 0);
        for (u64 l1 = 1; l1 <= m1; ++l1) {
          for (u64 l2 = 1; l2 <= m2; ++l2) {
            const auto s = tau_sieve(10000, Params::make(a, b, m1, m2, l1, l2));
            for (u64 n = 1; n <= 10000; ++n) total[n] += s[n];
          }
        }
        for (u64 n = 1; n <= 10000; ++n) REQUIRE(total[n] == full[n]);
      }
    }
  }
  // Spot check through the point evaluator.
  for (u64 n = 1; n <= 10000; n += 97) {
    u64 total = 0;
    for (u64 l1 = 1; l1 <= 3; ++l1)
      for (u64 l2 = 1; l2 <= 4; ++l2) total += tau_point(n, Params::make(1, 2, 3, 4, l1, l2));
    REQUIRE(total == tau_point(n, kTrivial12));
  }
}

TEST_CASE("sieve dump round trip") {
  const Params p = Params::make(1, 2, 2, 3, 1, 2);
  const auto seg = tau_segment(100, 50, p);
  std::stringstream ss;
  write_sieve_dump(ss, p, 100, seg);
  const std::string bytes = ss.str();
  CHECK(bytes.substr(0, 4) == "ADLB");
  CHECK(bytes.size() == 4 + 2 + 1 + 1 + 4 * 4 + 8 + 8 + 4 * 50);
  const SieveDump d = read_sieve_dump(ss);
  CHECK(d.header.version == 1);
  CHECK(d.header.a == 1);
  CHECK(d.header.b == 2);
  CHECK(d.header.m1 == 2);
  CHECK(d.header.l2 == 2);
  CHECK(d.header.offset == 100);
  CHECK(d.header.length == 50);
  CHECK(d.counts == seg);
  std::stringstream bad("XXXX");
  CHECK_THROWS(read_sieve_dump(bad));
}

TEST_CASE("decompositions and g_ab") {
  const auto ds = decompositions(4, 1, 2);
  REQUIRE(ds.size() == 2);
  CHECK(ds[0].h == 1);
  CHECK(ds[0].r == 2);
  CHECK(ds[1].h == 4);
  CHECK(ds[1].r == 1);
  CHECK(g_ab(1, kTrivial12).value == 1.0);
  const double g4 = std::pow(4.0, -5.0 / 6.0) + std::pow(2.0, -2.0 / 3.0);
  CHECK(g_ab(4, kTrivial12).value == doctest::Approx(g4).epsilon(1e-15));
  CHECK(g4 == doctest::Approx(0.944941).epsilon(1e-6));
  CHECK(g_ab(4, kTrivial12).witnesses.size() == 2);
  CHECK(g_ab(101, kTrivial12).value == doctest::Approx(std::pow(101.0, -5.0 / 6.0)).epsilon(1e-15));
  // Congruence data does not enter g.
  CHECK(g_ab(36, Params::make(1, 2, 2, 3, 1, 2)).value == g_ab(36, kTrivial12).value);
  for (u64 n = 1; n <= 3000; ++n) {
    for (const auto& d : decompositions(n, 2, 3)) {
      REQUIRE(d.h * d.h * d.r * d.r * d.r == n);
      REQUIRE(d.weight > 0.0);
    }
  }
}

TEST_CASE("g_star examples") {
  CHECK(g_star(1, Params::make(1, 2, 3, 5, 2, 4)).value == doctest::Approx(1.0));
  const double expect = std::pow(2.0, -10.0 / 3.0) + std::pow(2.0, -4.0 / 3.0) - 2.0 * std::pow(2.0, -7.0 / 3.0);
  const double got = g_star(4, Params::make(1, 2, 1, 2, 1, 1)).value;
  CHECK(got == doctest::Approx(expect).epsilon(1e-14));
  CHECK(got == doctest::Approx(0.09921).epsilon(1e-4));
  for (u64 n = 1; n <= 2000; ++n) {
    const double g = g_ab(n, kTrivial12).value;
    REQUIRE(g_star(n, kTrivial12).value == doctest::Approx(g * g).epsilon(1e-14));
  }
}

TEST_CASE("g_star symmetry, domination and table agreement") {
  const u64 x = 10000;
  for (const auto& p : mixed_params()) {
    const auto gs = g_star_table(x, p);
    const auto gm = g_star_table(x, p.mirrored());
    const auto g = g_table(x, p.a, p.b);
    for (u64 n = 1; n <= x; ++n) {
      REQUIRE(std::abs(gs[n] - gm[n]) <= 1e-12);
      REQUIRE(std::abs(gs[n]) <= g[n] * g[n] + 1e-12);
      if (n % 37 == 0) REQUIRE(std::abs(gs[n] - g_star(n, p).value) <= 1e-12);
    }
  }
}

TEST_CASE("g_partial_sum") {
  CHECK(g_partial_sum(1, kTrivial12, false) == doctest::Approx(1.0));
  const double four = 1.0 + std::pow(2.0, -5.0 / 6.0) + std::pow(3.0, -5.0 / 6.0) + g_ab(4, kTrivial12).value;
  CHECK(g_partial_sum(4, kTrivial12, false) == doctest::Approx(four).epsilon(1e-14));
  const double w4 = 1.0 + std::pow(2.0, -5.0 / 6.0 - 1.0 / 6.0) + std::pow(3.0, -5.0 / 6.0 - 1.0 / 6.0) +
                    g_ab(4, kTrivial12).value * std::pow(4.0, -1.0 / 6.0);
  CHECK(g_partial_sum(4, kTrivial12, true) == doctest::Approx(w4).epsilon(1e-14));
  const double X = 1e6;
  const double s = g_partial_sum(static_cast<u64>(X), kTrivial12, false);
  MESSAGE("sum_{n<=1e6} g / (X log X) = " << s / (X * std::log(X)));
  CHECK(s <= 3.0 * X * std::log(X));
  const auto g = g_table(100000, 2, 3);
  double acc = 0.0;
  for (u64 n = 1; n <= 100000; ++n) acc += g[n];
  CHECK(g_partial_sum(100000, Params::make(2, 3, 1, 1, 1, 1), false) == doctest::Approx(acc).epsilon(1e-12));
}

TEST_CASE("Dirichlet identity for g") {
  for (const auto& [a, b] : {std::pair{1u, 2u}, std::pair{2u, 3u}}) {
    const auto we = weight_exponents(a, b);
    const auto g = g_table(1000000, a, b);
    long double acc = 0.0L;
    for (u64 n = 1000000; n >= 1; --n) acc += g[n] / (static_cast<long double>(n) * n);
    const double expect = hurwitz_zeta(2.0 * a + we.h_exp, 1.0) * hurwitz_zeta(2.0 * b + we.r_exp, 1.0);
    // Tail beyond 1e6 is below sum_{n > X} n^{-2} * max g <= 1e-6 * 1.
    CHECK(std::abs(static_cast<double>(acc) - expect) < 2e-6);
  }
}

TEST_CASE("g tail bracket") {
  CHECK(g_tail_exponent(1, 2) == doctest::Approx(1.0 / 6.0));
  CHECK(g_tail_exponent(2, 3) == doctest::Approx(2.0 / 15.0));
  const auto b3 = g_tail_bracket(1e3, kTrivial12);
  const auto b4 = g_tail_bracket(1e4, kTrivial12);
  CHECK(b3.lower <= b3.value);
  CHECK(b3.value <= b3.upper);
  CHECK(b4.upper < b3.upper);
  CHECK(b3.tail_exponent == doctest::Approx(1.0 / 6.0));
  // Exact partial tails over equal-ratio ranges decay by about 10^{-1/6}.
  const double t3 = g_sq_range_sum(1000, 1000000, 1, 2);
  const double t4 = g_sq_range_sum(10000, 10000000, 1, 2);
  MESSAGE("tail ratio 1e4/1e3 = " << t4 / t3 << " vs " << std::pow(10.0, -1.0 / 6.0));
  CHECK(t4 / t3 == doctest::Approx(std::pow(10.0, -1.0 / 6.0)).epsilon(0.05));
  CHECK(g_tail_bracket(1e8, kTrivial12).upper < b4.upper);
  const auto g = g_table(20000, 1, 2);
  double direct = 0.0;
  for (u64 n = 101; n <= 20000; ++n) direct += g[n] * g[n];
  CHECK(g_sq_range_sum(100, 20000, 1, 2) == doctest::Approx(direct).epsilon(1e-12));
}
