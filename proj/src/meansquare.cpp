#include "adlab/meansquare.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

#include "adlab/divisor.hpp"
#include "adlab/voronoi.hpp"

namespace adlab {

namespace {

constexpr int kMaxSeriesTerms = 24;
constexpr double kMaxStep = 0.1;  // largest (x1 - x0)/x0 handled by one series

// Coefficients u_k of M(x0 (1 + s)) - M(x0) = sum_{k>=1} u_k s^k, plus M(x0).
double series_coeffs(const MainTermCoeffs& mt, double x0, int K, std::array<double, kMaxSeriesTerms + 1>& u) {
  if (mt.log_case) {
    const double l0 = std::log(x0);
    u[1] = x0 * (l0 + 1.0 - mt.log_shift);
    double sign = 1.0;
    for (int k = 2; k <= K; ++k) {
      u[k] = x0 * sign / (static_cast<double>(k) * (k - 1));
      sign = -sign;
    }
    return x0 * (l0 - mt.log_shift) + mt.c0;
  }
  const double pa = std::pow(x0, mt.inv_a);
  const double pb = std::pow(x0, mt.inv_b);
  double ba = 1.0, bb = 1.0;  // binomial(inv_a, k), binomial(inv_b, k)
  for (int k = 1; k <= K; ++k) {
    ba *= (mt.inv_a - k + 1) / k;
    bb *= (mt.inv_b - k + 1) / k;
    u[k] = mt.cA * pa * ba + mt.cB * pb * bb;
  }
  return mt.cA * pa + mt.cB * pb + mt.c0;
}

double series_piece(double A, const MainTermCoeffs& mt, double x0, double x1) {
  const double tau = (x1 - x0) / x0;
  if (tau <= 0.0) return 0.0;
  int K = static_cast<int>(std::ceil(std::log(1e-18) / std::log(tau)));
  K = std::clamp(K, 1, kMaxSeriesTerms);
  std::array<double, kMaxSeriesTerms + 1> e{};
  e[0] = A - series_coeffs(mt, x0, K, e);
  double tp = 1.0;
  for (int k = 1; k <= K; ++k) {
    tp *= tau;
    e[k] = -e[k] * tp;
  }
  CompensatedSum acc;
  for (int j = 0; j <= K; ++j) {
    acc.add(e[j] * e[j] / (2 * j + 1));
    for (int k = j + 1; k <= K; ++k) acc.add(2.0 * e[j] * e[k] / (j + k + 1));
  }
  return x0 * tau * acc.value();
}

}  // namespace

double power_square_antiderivative(double A, const MainTermCoeffs& mt, double x0, double x1) {
  if (!(x0 >= 1.0 && x1 >= x0)) throw std::invalid_argument("power_square_antiderivative: need 1 <= x0 <= x1");
  // Terms cancel when A is close to M(x); sum them in extended precision.
  using ld = long double;
  const ld K = static_cast<ld>(A) - mt.c0;
  const ld h = static_cast<ld>(x1) - x0;
  const ld dl = std::log1p(h / x0);
  // (x1^{e+1} - x0^{e+1}) / (e + 1)
  auto pint = [&](ld e) { return std::pow(static_cast<ld>(x0), e + 1) * std::expm1((e + 1) * dl) / (e + 1); };
  ld acc = K * K * h;
  if (mt.log_case) {
    const ld s = mt.log_shift;
    // x^n (al L^2 + be L + ga) between x0 and x1, L = log x, without subtracting endpoints.
    const ld L0 = std::log(static_cast<ld>(x0)), L1 = L0 + dl;
    auto diff = [&](ld n, ld al, ld be, ld ga) {
      const ld p1 = al * L1 * L1 + be * L1 + ga;
      return std::pow(static_cast<ld>(x0), n) * (std::expm1(n * dl) * p1 + dl * (al * (L1 + L0) + be));
    };
    const ld int_f = diff(2, 0, 0.5L, -0.25L) - s * pint(1);
    const ld int_f2 = diff(3, 1.0L / 3, -2.0L / 9, 2.0L / 27) - 2 * s * diff(3, 0, 1.0L / 3, -1.0L / 9) + s * s * pint(2);
    acc += -2 * K * int_f + int_f2;
    return static_cast<double>(acc);
  }
  const ld p = mt.inv_a, q = mt.inv_b, cA = mt.cA, cB = mt.cB;
  acc += -2 * K * cA * pint(p) - 2 * K * cB * pint(q) + cA * cA * pint(2 * p) + 2 * cA * cB * pint(p + q) +
         cB * cB * pint(2 * q);
  return static_cast<double>(acc);
}

double interval_square(double A, const MainTermCoeffs& mt, double x0, double x1) {
  if (!(x0 > 0.0 && x1 >= x0)) throw std::invalid_argument("interval_square: need 0 < x0 <= x1");
  CompensatedSum acc;
  double lo = x0;
  while (lo < x1) {
    const double hi = std::min(x1, lo * (1.0 + kMaxStep));
    acc.add(series_piece(A, mt, lo, hi));
    lo = hi;
  }
  return acc.value();
}

DeltaSqIntegrator::DeltaSqIntegrator(const Params& p) : mt_(MainTermCoeffs::from(p)) {
  level_ = static_cast<double>(summatory_exact(p.scale(), p));
}

void DeltaSqIntegrator::advance(double x) {
  if (x <= x_) return;
  acc_.add(interval_square(level_, mt_, x_, x));
  x_ = x;
}

namespace {

u64 checked_n(double T, const Params& p) {
  const long double n = std::floor(static_cast<long double>(T) * static_cast<long double>(p.scale()));
  if (!(n <= static_cast<long double>(kMaxIntegralN))) {
    throw BudgetError("N = M1^a M2^b T exceeds the integration budget 2^36");
  }
  return static_cast<u64>(n);
}

}  // namespace

std::vector<double> integral_delta_sq_grid(const std::vector<double>& Ts, const Params& p) {
  if (Ts.empty()) return {};
  for (std::size_t i = 0; i < Ts.size(); ++i) {
    if (!(Ts[i] >= 1.0)) throw std::invalid_argument("integral_delta_sq: T must be >= 1");
    if (i > 0 && Ts[i] < Ts[i - 1]) throw std::invalid_argument("integral_delta_sq: grid must be increasing");
  }
  const u64 n_hi = checked_n(Ts.back(), p);
  const u64 scale = static_cast<u64>(p.scale());
  const double scale_d = static_cast<double>(scale);

  DeltaSqIntegrator it(p);
  std::vector<double> out;
  out.reserve(Ts.size());
  std::size_t idx = 0;
  JumpStream jumps(scale, std::max(n_hi, scale), p);
  while (auto j = jumps.next()) {
    const double xj = static_cast<double>(j->n) / scale_d;
    while (idx < Ts.size() && Ts[idx] <= xj) {
      it.advance(Ts[idx++]);
      out.push_back(it.value());
    }
    if (idx == Ts.size()) break;
    it.advance(xj);
    it.jump(j->height);
  }
  while (idx < Ts.size()) {
    it.advance(Ts[idx++]);
    out.push_back(it.value());
  }
  return out;
}

double integral_delta_sq(double T, const Params& p) { return integral_delta_sq_grid({T}, p).front(); }

double cstar_prefactor(const Params& p) {
  const double a = p.a, b = p.b, s = a + b;
  return std::pow(a, b / s) * std::pow(b, a / s) / (2.0 * (s + 1.0) * std::numbers::pi * std::numbers::pi);
}

SeriesBracket cstar(const Params& p, u64 nmax) {
  if (nmax < 1) throw std::invalid_argument("cstar: nmax must be >= 1");
  const auto gs = g_star_table(nmax, p);
  CompensatedSum acc, last_decade;
  for (u64 n = 1; n <= nmax; ++n) {
    acc.add(gs[n]);
    if (n > nmax / 10) last_decade.add(gs[n]);
  }
  const double pref = cstar_prefactor(p);
  const SeriesBracket tail = g_tail_bracket(static_cast<double>(nmax), p);
  // Geometric continuation of the last decade at the known decay rate.
  double estimate = 0.0;
  if (nmax >= 10) {
    const double r = std::pow(10.0, -tail.tail_exponent);
    estimate = last_decade.value() * r / (1.0 - r);
  }
  // 0 <= g* <= g^2, and g* = g^2 with trivial congruences.
  const double floor_tail = p.trivial_congruences() ? tail.lower : 0.0;
  SeriesBracket out;
  out.lower = pref * (acc.value() + floor_tail);
  out.upper = pref * (acc.value() + tail.upper);
  out.value = std::clamp(pref * (acc.value() + estimate), out.lower, out.upper);
  out.terms_used = static_cast<std::int64_t>(nmax);
  out.tail_exponent = tail.tail_exponent;
  return out;
}

namespace {

FitResult fit_line(const std::vector<MeanSquareRow>& rows, std::size_t count) {
  const auto n = static_cast<Eigen::Index>(count);
  Eigen::MatrixXd X(n, 2);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(rows[i].integral > 0.0 && rows[i].T > 0.0)) {
      throw std::invalid_argument("exponent_fit: T and integral must be positive");
    }
    X(i, 0) = 1.0;
    X(i, 1) = std::log(rows[i].T);
    y(i) = std::log(rows[i].integral);
  }
  const Eigen::Vector2d beta = X.colPivHouseholderQr().solve(y);
  FitResult f;
  f.intercept = beta(0);
  f.slope = beta(1);
  if (n > 2) {
    const double rss = (y - X * beta).squaredNorm();
    const Eigen::Matrix2d cov = (X.transpose() * X).inverse() * (rss / static_cast<double>(n - 2));
    f.stderr_ = std::sqrt(std::max(0.0, cov(1, 1)));
  }
  return f;
}

}  // namespace

FitResult exponent_fit(const std::vector<MeanSquareRow>& rows) {
  if (rows.size() < 4) throw std::invalid_argument("exponent_fit: need at least 4 rows");
  const auto [lo, hi] = std::minmax_element(rows.begin(), rows.end(),
                                            [](const auto& l, const auto& r) { return l.T < r.T; });
  if (hi->T < 100.0 * lo->T) throw std::invalid_argument("exponent_fit: rows must span at least 2 decades of T");
  return fit_line(rows, rows.size());
}

namespace {

constexpr int kGaussOrder = 8;
constexpr int kChebDegree = 32;
constexpr double kBlockCycles = 4.0;

// Chebyshev interpolant of Delta* on [lo, hi].
struct ChebBlock {
  double lo = 0.0;
  double hi = 0.0;
  std::array<double, kChebDegree> c{};

  void fit(const VoronoiTable& t, double l, double h) {
    lo = l;
    hi = h;
    std::array<double, kChebDegree> f{};
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    for (int j = 0; j < kChebDegree; ++j) {
      f[j] = t(mid + half * std::cos(std::numbers::pi * (j + 0.5) / kChebDegree));
    }
    for (int k = 0; k < kChebDegree; ++k) {
      double s = 0.0;
      for (int j = 0; j < kChebDegree; ++j) s += f[j] * std::cos(std::numbers::pi * k * (j + 0.5) / kChebDegree);
      c[k] = 2.0 * s / kChebDegree;
    }
  }

  double operator()(double x) const {
    const double t = (2.0 * x - lo - hi) / (hi - lo);
    double b1 = 0.0, b2 = 0.0;
    for (int k = kChebDegree - 1; k >= 1; --k) {
      const double b0 = 2.0 * t * b1 - b2 + c[k];
      b2 = b1;
      b1 = b0;
    }
    return t * b1 - b2 + 0.5 * c[0];
  }
};

}  // namespace

std::vector<RemainderMeanSquare> remainder_meansquare(double T, const std::vector<double>& zs, const Params& p) {
  if (!(T >= 1.0)) throw std::invalid_argument("remainder_meansquare: T must be >= 1");
  std::vector<VoronoiTable> tables;
  double zmax = 0.0;
  for (double z : zs) {
    tables.emplace_back(p, z);
    if (!tables.back().terms().empty()) zmax = std::max(zmax, z);
  }
  const MainTermCoeffs mt = MainTermCoeffs::from(p);
  const double s = p.a + p.b;
  const double c2v = c2(p);
  // Cycles per unit x of the fastest term at abscissa x.
  auto fmax = [&](double x) {
    return zmax < 1.0 ? 0.0 : c2v * std::pow(zmax, 1.0 / s) * std::pow(x, 1.0 / s - 1.0) / s;
  };

  const u64 n_lo = checked_n(T, p);
  const u64 n_hi = checked_n(2.0 * T, p);
  const double scale_d = static_cast<double>(p.scale());
  const double x_end = 2.0 * T;
  double level = static_cast<double>(summatory_exact(n_lo, p));

  const GaussLegendre& gl = gauss_legendre(kGaussOrder);
  std::vector<ChebBlock> blocks(tables.size());
  double block_hi = T;  // blocks cover [T, block_hi)
  std::vector<CompensatedSum> e2(tables.size());
  CompensatedSum d2;
  std::vector<double> star(tables.size());

  auto ensure_block = [&](double x) {
    while (x >= block_hi && block_hi < x_end) {
      const double lo = block_hi;
      const double f = fmax(lo);
      double hi = f > 0.0 ? lo + kBlockCycles / f : x_end;
      hi = std::min(hi, x_end);
      for (std::size_t i = 0; i < tables.size(); ++i) blocks[i].fit(tables[i], lo, hi);
      block_hi = hi;
    }
  };

  auto integrate = [&](double x0, double x1) {
    if (x1 <= x0) return;
    const int pieces = std::max(1, static_cast<int>(std::ceil(fmax(x0) * (x1 - x0))));
    const double w = (x1 - x0) / pieces;
    for (int k = 0; k < pieces; ++k) {
      const double lo = x0 + k * w;
      const double mid = lo + 0.5 * w, half = 0.5 * w;
      for (int i = 0; i < kGaussOrder; ++i) {
        const double x = mid + half * gl.nodes[i];
        const double wt = half * gl.weights[i];
        const double d = level - mt(x);
        d2.add(wt * d * d);
        if (zmax >= 1.0) ensure_block(x);
        for (std::size_t t = 0; t < tables.size(); ++t) {
          const double e = tables[t].terms().empty() ? d : d - blocks[t](x);
          e2[t].add(wt * e * e);
        }
      }
    }
  };

  double x_prev = T;
  JumpStream jumps(n_lo, n_hi, p);
  while (auto j = jumps.next()) {
    const double xj = static_cast<double>(j->n) / scale_d;
    integrate(x_prev, xj);
    level += j->height;
    x_prev = xj;
  }
  integrate(x_prev, x_end);

  std::vector<RemainderMeanSquare> out(tables.size());
  for (std::size_t i = 0; i < tables.size(); ++i) {
    out[i].e2 = e2[i].value();
    out[i].d2 = d2.value();
    out[i].ratio = out[i].d2 > 0.0 ? out[i].e2 / out[i].d2 : 0.0;
  }
  return out;
}

RemainderMeanSquare remainder_meansquare(double T, double z, const Params& p) {
  return remainder_meansquare(T, std::vector<double>{z}, p).front();
}

double eval_S_ab(double T, double cap, const Params& p) {
  if (!(T >= 1.0)) throw std::invalid_argument("eval_S_ab: T must be >= 1");
  if (cap > kMaxSabCap) throw BudgetError("eval_S_ab: cap exceeds 1e8");
  if (cap < 1.0) return 0.0;
  const double s = p.a + p.b;
  const auto we = weight_exponents(p.a, p.b);
  const u64 c = static_cast<u64>(std::floor(cap));
  struct Node {
    double rho;
    u64 n;
    double w;
  };
  std::vector<Node> nodes;
  for (u64 r = 1; saturating_pow(r, p.b) <= c; ++r) {
    const u64 rb = static_cast<u64>(saturating_pow(r, p.b));
    for (u64 h = 1;; ++h) {
      const u128 n = saturating_pow(h, p.a) * rb;
      if (n > c) break;
      const double nd = static_cast<double>(n);
      nodes.push_back({std::pow(nd, 1.0 / s), static_cast<u64>(n),
                       std::pow(static_cast<double>(h), -we.h_exp) * std::pow(static_cast<double>(r), -we.r_exp)});
    }
  }
  std::sort(nodes.begin(), nodes.end(), [](const Node& l, const Node& r) { return l.n < r.n; });
  const double kernel_cap = std::pow(T, 1.0 / s);
  CompensatedSum acc;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    CompensatedSum row;
    for (std::size_t j = i + 1; j < nodes.size(); ++j) {
      if (nodes[j].n == nodes[i].n) continue;
      const double d = nodes[j].rho - nodes[i].rho;
      if (d >= 0.1 * std::sqrt(nodes[i].rho * nodes[j].rho)) break;
      row.add(nodes[j].w * std::min(kernel_cap, 1.0 / d));
    }
    acc.add(2.0 * nodes[i].w * row.value());  // ordered pairs (i, j) and (j, i)
  }
  return acc.value();
}

double meansquare_exponent(const Params& p) {
  return (1.0 + p.a + p.b) / static_cast<double>(p.a + p.b);
}

std::vector<double> doubling_grid(double t_min, double t_max) {
  if (!(t_min >= 1.0 && t_max >= t_min)) throw std::invalid_argument("doubling_grid: need 1 <= t_min <= t_max");
  std::vector<double> out;
  for (double t = t_min; t <= t_max; t *= 2.0) out.push_back(t);
  if (out.back() < t_max) out.push_back(t_max);
  return out;
}

MeanSquareReport meansquare_report(const Params& p, const std::vector<double>& Ts, u64 cstar_nmax) {
  const auto t0 = std::chrono::steady_clock::now();
  MeanSquareReport r;
  r.params = p;
  const auto integrals = integral_delta_sq_grid(Ts, p);
  const double ex = meansquare_exponent(p);
  for (std::size_t i = 0; i < Ts.size(); ++i) {
    MeanSquareRow row;
    row.T = Ts[i];
    row.integral = integrals[i];
    row.ratio = integrals[i] / std::pow(Ts[i], ex);
    r.rows.push_back(row);
    if (i >= 1) r.rows.back().fitted_exponent = fit_line(r.rows, r.rows.size()).slope;
  }
  r.cstar = cstar(p, cstar_nmax);
  if (r.rows.size() >= 4 && Ts.back() >= 100.0 * Ts.front()) {
    const FitResult f = exponent_fit(r.rows);
    r.slope = f.slope;
    r.slope_stderr = f.stderr_;
  } else if (r.rows.size() >= 2) {
    r.slope = fit_line(r.rows, r.rows.size()).slope;
    r.slope_stderr = std::numeric_limits<double>::quiet_NaN();
  } else {
    r.slope = r.slope_stderr = std::numeric_limits<double>::quiet_NaN();
  }
  r.runtime_sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

namespace {

using ojson = nlohmann::ordered_json;

ojson num(double v) { return std::isfinite(v) ? ojson(v) : ojson(nullptr); }

double get_num(const ojson& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

}  // namespace

void write_report_json(std::ostream& os, const MeanSquareReport& r) {
  ojson j;
  j["params"] = {{"a", r.params.a},   {"b", r.params.b},   {"M1", r.params.m1},
                 {"M2", r.params.m2}, {"l1", r.params.l1}, {"l2", r.params.l2}};
  j["cstar"] = {{"value", num(r.cstar.value)},
                {"lower", num(r.cstar.lower)},
                {"upper", num(r.cstar.upper)},
                {"terms", r.cstar.terms_used},
                {"tail_exponent", num(r.cstar.tail_exponent)}};
  j["rows"] = ojson::array();
  for (const auto& row : r.rows) {
    j["rows"].push_back({{"T", num(row.T)},
                         {"integral", num(row.integral)},
                         {"ratio", num(row.ratio)},
                         {"fitted_exponent", row.fitted_exponent ? num(*row.fitted_exponent) : ojson(nullptr)}});
  }
  j["slope"] = num(r.slope);
  j["slope_stderr"] = num(r.slope_stderr);
  j["runtime_sec"] = num(r.runtime_sec);
  os << j.dump(2) << '\n';
}

MeanSquareReport read_report_json(std::istream& is) {
  const ojson j = ojson::parse(is);
  MeanSquareReport r;
  const auto& pj = j.at("params");
  r.params = Params::make(pj.at("a").get<unsigned>(), pj.at("b").get<unsigned>(), pj.at("M1").get<u64>(),
                          pj.at("M2").get<u64>(), pj.at("l1").get<u64>(), pj.at("l2").get<u64>());
  const auto& cj = j.at("cstar");
  r.cstar.value = get_num(cj.at("value"));
  r.cstar.lower = get_num(cj.at("lower"));
  r.cstar.upper = get_num(cj.at("upper"));
  r.cstar.terms_used = cj.at("terms").get<std::int64_t>();
  if (cj.contains("tail_exponent")) r.cstar.tail_exponent = get_num(cj.at("tail_exponent"));
  for (const auto& rj : j.at("rows")) {
    MeanSquareRow row;
    row.T = get_num(rj.at("T"));
    row.integral = get_num(rj.at("integral"));
    row.ratio = get_num(rj.at("ratio"));
    if (rj.contains("fitted_exponent") && !rj.at("fitted_exponent").is_null()) {
      row.fitted_exponent = rj.at("fitted_exponent").get<double>();
    }
    r.rows.push_back(row);
  }
  r.slope = get_num(j.at("slope"));
  r.slope_stderr = get_num(j.at("slope_stderr"));
  r.runtime_sec = get_num(j.at("runtime_sec"));
  return r;
}

void write_report_csv(std::ostream& os, const MeanSquareReport& r) {
  os << "T,integral,ratio,fitted_exponent\n";
  for (const auto& row : r.rows) {
    os << fmt15(row.T) << ',' << fmt15(row.integral) << ',' << fmt15(row.ratio) << ','
       << (row.fitted_exponent ? fmt15(*row.fitted_exponent) : std::string()) << '\n';
  }
}

}  // namespace adlab
