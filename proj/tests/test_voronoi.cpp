#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "adlab/divisor.hpp"
#include "adlab/meansquare.hpp"
#include "adlab/voronoi.hpp"

using namespace adlab;

namespace {

const Params kTrivial12 = Params::make(1, 2, 1, 1, 1, 1);

}  // namespace

TEST_CASE("c1 and c2") {
  CHECK(c1(kTrivial12) == doctest::Approx(std::pow(2.0, 1.0 / 6.0) / std::sqrt(3.0)).epsilon(1e-15));
  CHECK(c1(kTrivial12) == doctest::Approx(0.648054).epsilon(1e-6));
  CHECK(c1(Params::make(1, 1, 1, 1, 1, 1)) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(c2(kTrivial12) == doctest::Approx(std::pow(2.0, -2.0 / 3.0) + std::pow(2.0, 1.0 / 3.0)).epsilon(1e-15));
  CHECK(c2(kTrivial12) == doctest::Approx(1.889882).epsilon(1e-6));
  CHECK(c2(Params::make(1, 1, 1, 1, 1, 1)) == doctest::Approx(2.0).epsilon(1e-15));
  for (const auto& [a, b] : {std::pair{1u, 2u}, std::pair{2u, 3u}, std::pair{1u, 4u}}) {
    const Params p = Params::make(a, b, 1, 1, 1, 1);
    CHECK(c1(p) == doctest::Approx(c1(p.mirrored())).epsilon(1e-15));
    CHECK(c2(p) == doctest::Approx(c2(p.mirrored())).epsilon(1e-15));
  }
}

TEST_CASE("truncation config and default z") {
  CHECK_THROWS(TruncationConfig{0.5, 2}.validate());
  CHECK_THROWS(TruncationConfig{10.0, 1}.validate());
  CHECK_NOTHROW(TruncationConfig{10.0, 2}.validate());
  const double x = 1e5;
  const double L = std::log(x);
  CHECK(default_z(x, kTrivial12) == doctest::Approx(std::min(1e6, std::max(1.0, std::pow(x, 0.5) * std::pow(L, -(2.0 + 4.0 + 1.0))))));
  CHECK(default_z(1e40, kTrivial12) == 1e6);
  CHECK(default_z(2.0, kTrivial12) >= 1.0);
}

TEST_CASE("delta_star basic forms") {
  CHECK(delta_star(1234.5, 0.5, kTrivial12) == 0.0);
  // Trivial congruences: each term is weight * cos(2 pi c2 (x n)^{1/3} - pi/4).
  const double x = 5432.1;
  const double z = 60.0;
  double direct = 0.0;
  for (u64 n = 1; n <= 60; ++n) {
    const double g = g_ab(n, kTrivial12).value;
    direct += g * std::cos(2.0 * std::numbers::pi * c2(kTrivial12) * std::cbrt(x * n) - std::numbers::pi / 4.0);
  }
  direct *= c1(kTrivial12) / std::numbers::pi * std::pow(x, 1.0 / 6.0);
  CHECK(delta_star(x, z, kTrivial12) == doctest::Approx(direct).epsilon(1e-11));
}

TEST_CASE("coefficient table ties to decompositions") {
  const Params p = Params::make(2, 3, 2, 3, 1, 2);
  const VoronoiTable t(p, 500.0);
  const double x = 777.0;
  for (const auto& term : t.terms()) {
    const auto ds = decompositions(term.n, p.a, p.b);
    bool found = false;
    for (const auto& d : ds) {
      if (d.h == term.h && d.r == term.r) {
        found = true;
        CHECK(term.weight == doctest::Approx(d.weight).epsilon(1e-15));
      }
    }
    CHECK(found);
    CHECK(t.amplitude(x) * term.weight ==
          doctest::Approx(c1(p) / std::numbers::pi * std::pow(x, 0.1) * term.weight).epsilon(1e-14));
    CHECK(term.offset == doctest::Approx(std::fmod(congruence_phase(term.h, term.r, p) + 0.125, 1.0)).epsilon(1e-14));
  }
  std::size_t count = 0;
  for (u64 n = 1; n <= 500; ++n) count += decompositions(n, 2, 3).size();
  CHECK(t.terms().size() == count);
}

TEST_CASE("delta_star symmetry under exchanging the two branches") {
  SplitMix64 rng(21);
  const std::vector<Params> ps = {Params::make(1, 2, 2, 3, 1, 2), Params::make(2, 3, 1, 1, 1, 1),
                                  Params::make(1, 4, 3, 2, 2, 1)};
  for (int i = 0; i < 100; ++i) {
    const Params& p = ps[i % ps.size()];
    const double x = 10.0 + 1e5 * rng.uniform();
    const double z = 1.0 + 2000.0 * rng.uniform();
    const double v = delta_star(x, z, p);
    const double m = delta_star(x, z, p.mirrored());
    REQUIRE(std::abs(v - m) <= 1e-10 * std::max(1.0, std::abs(v)));
  }
}

TEST_CASE("remainder") {
  const EvalPoint pt(54321, 1);
  CHECK(remainder(pt, 0.0, kTrivial12) == doctest::Approx(delta(pt, kTrivial12)).epsilon(1e-15));
  CHECK(remainder(pt, 100.0, kTrivial12) ==
        doctest::Approx(delta(pt, kTrivial12) - delta_star(54321.0, 100.0, kTrivial12)).epsilon(1e-12));
}

TEST_CASE("sign agreement of delta and delta_star") {
  const double z = 1000.0;
  const VoronoiTable t(kTrivial12, z);
  const auto mt = MainTermCoeffs::from(kTrivial12);
  int agree = 0;
  const int n = 1000;
  for (int i = 0; i < n; ++i) {
    const u64 N = 10000 + static_cast<u64>(10000.0 * (i + 0.5) / n);
    const EvalPoint pt(N, 1);
    if ((delta(pt, kTrivial12, mt) > 0) == (t(pt.x()) > 0)) ++agree;
  }
  MESSAGE("sign agreement rate on [1e4, 2e4]: " << static_cast<double>(agree) / n);
  CHECK(agree > 0.6 * n);
}

TEST_CASE("psi truncation") {
  for (int H : {2, 10, 100, 1000}) CHECK(std::abs(psi_truncated(0.5, H)) < 1e-15);
  CHECK(std::abs(psi_saw(0.25) - psi_truncated(0.25, 100)) <= 4.0 * psi_truncation_bound(0.25, 100));
  CHECK_THROWS(psi_truncated(0.3, 1));
  const double e10 = std::abs(psi_saw(1.0 / 3.0) - psi_truncated(1.0 / 3.0, 10));
  const double e100 = std::abs(psi_saw(1.0 / 3.0) - psi_truncated(1.0 / 3.0, 100));
  const double e1000 = std::abs(psi_saw(1.0 / 3.0) - psi_truncated(1.0 / 3.0, 1000));
  MESSAGE("u=1/3 errors: " << e10 << " " << e100 << " " << e1000);
  CHECK(e100 < e10);
  CHECK(e1000 < e100);
  CHECK(e10 * 10 == doctest::Approx(e100 * 100).epsilon(0.5));
  CHECK(e100 * 100 == doctest::Approx(e1000 * 1000).epsilon(0.5));
  CHECK(psi_truncation_bound(0.0, 10) == 1.0);
  CHECK(psi_truncation_bound(0.5, 10) == doctest::Approx(0.2));
}

TEST_CASE("psi truncation envelope on a grid") {
  for (int H : {10, 100}) {
    double worst = 0.0;
    for (int i = 1; i < 10000; ++i) {
      const double u = i / 10000.0;
      if (dist_to_int(u) < 1.0 / (10.0 * H)) continue;
      worst = std::max(worst, std::abs(psi_saw(u) - psi_truncated(u, H)) / psi_truncation_bound(u, H));
    }
    MESSAGE("H=" << H << " envelope constant " << worst);
    CHECK(worst <= 4.0);
  }
}

TEST_CASE("B-process window") {
  const auto w = BProcessWindow::make(0, 1, 1e4, kTrivial12);
  CHECK(w.c == doctest::Approx(16.0));
  CHECK(w.m_j == doctest::Approx(std::cbrt(1e4)));
  CHECK(w.m_next < w.m_j);
  CHECK(w.J >= 0);
  CHECK_THROWS(BProcessWindow::make(0, 0, 1e4, kTrivial12));
}

TEST_CASE("B-process check") {
  std::vector<double> consts;
  for (double x : {1e4, 1e5, 1e6}) {
    double worst = 0.0;
    int windows = 0;
    for (u64 h = 1; h <= 3; ++h) {
      for (unsigned j = 0; j < 3; ++j) {
        const auto w = BProcessWindow::make(j, h, x, kTrivial12);
        BProcessResult r;
        try {
          r = bprocess_check(w, kTrivial12);
        } catch (const std::invalid_argument&) {
          continue;
        }
        ++windows;
        CHECK(std::isfinite(r.diff));
        CHECK(r.diff == doctest::Approx(std::abs(r.lhs - r.rhs)));
        worst = std::max(worst, r.diff / std::log(w.m_j - w.m_next + 2.0));
      }
    }
    MESSAGE("x=" << x << ": windows " << windows << ", max diff / log(m_j - m_{j+1} + 2) = " << worst);
    consts.push_back(worst);
    CHECK(windows > 0);
  }
  CHECK(consts.back() <= 4.0 * std::max(consts.front(), 1.0));
  // Window with no admissible n1 is rejected.
  const Params odd = Params::make(1, 2, 1000, 1, 999, 1);
  CHECK_THROWS_AS(bprocess_check(BProcessWindow::make(2, 1, 1e4, odd), odd), std::invalid_argument);
}

TEST_CASE("mean square of delta_star against the diagonal prediction") {
  const double T = 1e5, z = 1e3;
  const VoronoiTable t(kTrivial12, z);
  const GaussLegendre& gl = gauss_legendre(16);
  const int pieces = 4000;
  CompensatedSum acc;
  for (int k = 0; k < pieces; ++k) {
    const double lo = T + T * k / pieces, hi = T + T * (k + 1) / pieces;
    acc.add(gl.integrate([&](double x) { const double v = t(x); return v * v; }, lo, hi));
  }
  const auto gs = g_star_table(1000, kTrivial12);
  double gsum = 0.0;
  for (u64 n = 1; n <= 1000; ++n) gsum += gs[n];
  const double c = c1(kTrivial12);
  const double predicted = c * c / (2.0 * std::numbers::pi * std::numbers::pi) * gsum * 0.75 *
                           (std::pow(2.0 * T, 4.0 / 3.0) - std::pow(T, 4.0 / 3.0));
  MESSAGE("mean square ratio actual/predicted = " << acc.value() / predicted);
  CHECK(acc.value() / predicted > 0.5);
  CHECK(acc.value() / predicted < 2.0);
}

TEST_CASE("remainder mean square at z = T^{1/2}") {
  const double T = 1e5;
  const auto r = remainder_meansquare(T, std::sqrt(T), kTrivial12);
  MESSAGE("E^2 / Delta^2 at z = T^{1/2}: " << r.ratio);
  CHECK(r.ratio <= 0.5);
  const auto r0 = remainder_meansquare(T, 0.0, kTrivial12);
  CHECK(r0.ratio == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("voronoi csv") {
  std::ostringstream os;
  write_voronoi_csv(os, {{1.0, 2.0, 3.0, -1.0}});
  CHECK(os.str() == "x,delta,delta_star,remainder\n1,2,3,-1\n");
}
