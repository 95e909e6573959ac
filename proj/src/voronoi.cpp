#include "adlab/voronoi.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "adlab/numeric.hpp"

namespace adlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double frac(double t) { return t - std::floor(t); }

// e(t) = exp(2 pi i t) with t reduced mod 1 first.
std::complex<double> unit(double t) { return std::polar(1.0, kTwoPi * frac(t)); }

}  // namespace

double c1(const Params& p) {
  const double a = p.a, b = p.b, s = a + b;
  return std::pow(a, b / (2 * s)) * std::pow(b, a / (2 * s)) / std::sqrt(s);
}

double c2(const Params& p) {
  const double a = p.a, b = p.b, s = a + b;
  return std::pow(a / b, b / s) + std::pow(b / a, a / s);
}

void TruncationConfig::validate() const {
  if (!(z >= 1.0)) throw std::invalid_argument("TruncationConfig: z must be >= 1");
  if (h_order < 2) throw std::invalid_argument("TruncationConfig: H must be >= 2");
}

double default_z(double x, const Params& p) {
  const double a = p.a, b = p.b;
  const double lx = std::log(x);
  double z = std::pow(x, a / b);
  if (lx > 1.0) z *= std::pow(lx, -(b + b * b / a + 1.0));
  return std::clamp(z, 1.0, 1e6);
}

VoronoiTable::VoronoiTable(const Params& p, double z)
    : params_(p), z_(z), c1_(c1(p)), c2_(c2(p)), inv_ab_(1.0 / (p.a + p.b)) {
  if (!(z >= 0.0) || !std::isfinite(z)) throw std::invalid_argument("VoronoiTable: z must be finite and >= 0");
  if (z < 1.0) return;
  const u64 zmax = static_cast<u64>(std::floor(z));
  for (u64 n = 1; n <= zmax; ++n) {
    // Only a thin subset of n has decompositions when a, b > 1; skip cheaply.
    for (const auto& d : decompositions(n, p.a, p.b)) {
      terms_.push_back({n, d.h, d.r, d.weight, std::pow(static_cast<double>(n), inv_ab_),
                        frac(congruence_phase(d.h, d.r, p) + 0.125)});
    }
  }
}

double VoronoiTable::amplitude(double x) const {
  return c1_ / std::numbers::pi * std::pow(x, 0.5 * inv_ab_);
}

double VoronoiTable::frequency(double x) const { return c2_ * std::pow(x, inv_ab_); }

double VoronoiTable::operator()(double x) const {
  if (terms_.empty()) return 0.0;
  const double f = frequency(x);
  CompensatedSum acc;
  for (const auto& t : terms_) acc.add(t.weight * std::cos(kTwoPi * (frac(f * t.root) - t.offset)));
  return amplitude(x) * acc.value();
}

double delta_star(double x, double z, const Params& p) { return VoronoiTable(p, z)(x); }

double remainder(const EvalPoint& pt, const VoronoiTable& table, const MainTermCoeffs& mt) {
  return delta(pt, table.params(), mt) - table(pt.x());
}

double remainder(const EvalPoint& pt, double z, const Params& p) {
  return remainder(pt, VoronoiTable(p, z), MainTermCoeffs::from(p));
}

double psi_truncated(double u, int h_order) {
  if (h_order < 2) throw std::invalid_argument("psi_truncated: H must be >= 2");
  const double v = frac(u);
  CompensatedSum acc;
  for (int h = 1; h <= h_order; ++h) {
    acc.add(std::sin(kTwoPi * frac(h * v)) / (std::numbers::pi * h));
  }
  return -acc.value();
}

double psi_truncation_bound(double u, int h_order) {
  const double d = dist_to_int(u);
  if (d == 0.0) return 1.0;
  return std::min(1.0, 1.0 / (h_order * d));
}

BProcessWindow BProcessWindow::make(unsigned j, u64 h, double x, const Params& p) {
  if (h == 0) throw std::invalid_argument("BProcessWindow: h must be >= 1");
  if (!(x > 1.0)) throw std::invalid_argument("BProcessWindow: x must exceed 1");
  BProcessWindow w;
  w.j = j;
  w.h = h;
  w.x = x;
  const double ab = static_cast<double>(p.a) * p.b;
  w.c = std::pow(2.0 * ab, ab);
  const double scale = static_cast<double>(p.scale());
  const double m0 = std::pow(scale * x, 1.0 / (p.a + p.b));
  w.m_j = m0 * std::pow(w.c, -static_cast<double>(j));
  w.m_next = w.m_j / w.c;
  const double L = std::log(x);
  const double jj = (L / (p.a + p.b) - std::log(L)) / std::log(w.c);
  w.J = std::max(0L, static_cast<long>(std::floor(jj)));
  return w;
}

BProcessResult bprocess_check(const BProcessWindow& w, const Params& p) {
  const double a = p.a, b = p.b, s = a + b;
  const double m1 = static_cast<double>(p.m1), m2 = static_cast<double>(p.m2);
  const double hd = static_cast<double>(w.h);
  const double x = w.x;
  BProcessResult res;

  // n1 ranges over (m_{j+1}, m_j] in the class l1 mod M1.
  const double n_lo = std::floor(w.m_next) + 1.0;
  const double n_hi = std::floor(w.m_j);
  const u64 first = static_cast<u64>(std::max(1.0, n_lo));
  u64 n1 = first + (p.l1 % p.m1 + p.m1 - first % p.m1) % p.m1;
  CompensatedSum lre, lim;
  const double h_l2 = congruence_phase(0, w.h, Params{p.a, p.b, 1, p.m2, 1, p.l2});
  for (; static_cast<double>(n1) <= n_hi; n1 += p.m1) {
    const double v = std::pow(std::pow(m1 / static_cast<double>(n1), a) * x, 1.0 / b);
    const auto e = unit(-hd * v + h_l2);
    lre.add(e.real());
    lim.add(e.imag());
    ++res.lhs_terms;
  }
  if (res.lhs_terms == 0) throw std::invalid_argument("bprocess_check: window holds no admissible n1");
  res.lhs = {lre.value(), lim.value()};

  // Dual variable r = f'(u) over the image of the window, u = n1 / M1.
  const double step = std::pow(2.0 * a * b, a * (a + b));
  res.r_lo = (a / b) * hd * std::pow(step, static_cast<double>(w.j)) * m1 / m2;
  res.r_hi = res.r_lo * step;
  const double amp = c1(p) * std::pow(x, 1.0 / (2 * s)) * std::pow(hd, b / (2 * s));
  const double freq = c2(p) * std::pow(x, 1.0 / s);
  const double rexp = (a + 2 * b) / (2 * s);
  CompensatedSum rre, rim;
  const double r_first = std::ceil(res.r_lo);
  const double r_last = std::floor(res.r_hi);
  for (double r = std::max(1.0, r_first); r <= r_last; r += 1.0) {
    double wgt = amp * std::pow(r, -rexp);
    if (r == res.r_lo || r == res.r_hi) wgt *= 0.5;
    const u64 ri = static_cast<u64>(r);
    const double phase = -frac(freq * std::pow(std::pow(hd, b) * std::pow(r, a), 1.0 / s)) + h_l2 +
                         congruence_phase(ri, 0, Params{p.a, p.b, p.m1, 1, p.l1, 1}) - 0.125;
    const auto e = wgt * unit(phase);
    rre.add(e.real());
    rim.add(e.imag());
    ++res.rhs_terms;
  }
  res.rhs = {rre.value(), rim.value()};
  res.diff = std::abs(res.lhs - res.rhs);
  return res;
}

void write_voronoi_csv(std::ostream& os, const std::vector<VoronoiRow>& rows) {
  os << "x,delta,delta_star,remainder\n";
  for (const auto& r : rows) {
    os << fmt15(r.x) << ',' << fmt15(r.delta) << ',' << fmt15(r.delta_star) << ',' << fmt15(r.remainder)
       << '\n';
  }
}

}  // namespace adlab
