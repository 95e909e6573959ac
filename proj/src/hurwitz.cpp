#include "adlab/hurwitz.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

#include "adlab/numeric.hpp"

namespace adlab {

namespace {

constexpr std::array<double, 30> kBernoulliOverFactorial = {
    8.33333333333333333333e-2,  -1.38888888888888888889e-3, 3.30687830687830687831e-5,
    -8.26719576719576719577e-7, 2.08767569878680989792e-8,  -5.28419013868749318485e-10,
    1.33825365306846788328e-11, -3.38968029632258286683e-13, 8.58606205627784456414e-15,
    -2.17486869855806187304e-16, 5.5090028283602295152e-18, -1.39544646858125233407e-19,
    3.53470703962946747169e-21, -8.9535174270375468504e-23, 2.26795245233768306031e-24,
    -5.74479066887220244526e-26, 1.45517247561486490187e-27, -3.68599494066531017818e-29,
    9.33673425709504467203e-31, -2.36502241570062993456e-32, 5.99067176248213430466e-34,
    -1.51745488446829026171e-35, 3.84375812545418823223e-37, -9.73635307264669103527e-39,
    2.46624704420068095711e-40, -6.24707674182074369315e-42, 1.58240302446449142975e-43,
    -4.00827368594893596853e-45, 1.01530758555695563116e-46, -2.57180415824187174992e-48,
};

constexpr int kMaxShift = 1 << 22;

struct EmResult {
  double value;
  double first_omitted;
};

EmResult euler_maclaurin(double s_in, double alpha_in, int shift, int pairs) {
  // Extended precision: for s < 0 the direct terms grow like n^{-s} and cancel
  // against the integral term.
  const long double s = s_in, alpha = alpha_in;
  long double direct = 0.0L;
  if (s > 0) {
    for (int k = shift - 1; k >= 0; --k) direct += std::pow(k + alpha, -s);
  } else {
    for (int k = 0; k < shift; ++k) direct += std::pow(k + alpha, -s);
  }

  const long double w = shift + alpha;
  long double tail = std::pow(w, 1.0L - s) / (s - 1.0L) + 0.5L * std::pow(w, -s);

  // Term j: B_{2j}/(2j)! * s (s+1) ... (s+2j-2) * w^{-s-2j+1}.
  long double rising = s;  // s (s+1) ... (s+2j-2)
  long double wpow = std::pow(w, -s - 1.0L);
  const long double inv_w2 = 1.0L / (w * w);
  long double corr = 0.0L;
  for (int j = 1; j <= pairs; ++j) {
    corr += kBernoulliOverFactorial[j - 1] * rising * wpow;
    rising *= (s + 2 * j - 1) * (s + 2 * j);
    wpow *= inv_w2;
  }
  // With the full table in use, the last kept term stands in for the first omitted one.
  const long double omitted = pairs < static_cast<int>(kBernoulliOverFactorial.size())
                                  ? std::abs(kBernoulliOverFactorial[pairs] * rising * wpow)
                                  : std::abs(kBernoulliOverFactorial[pairs - 1] * rising * wpow / inv_w2);
  return {static_cast<double>(direct + (tail + corr)), static_cast<double>(omitted)};
}

}  // namespace

void PrecisionConfig::validate() const {
  if (!(target_rel_error > 1e-16 && target_rel_error < 1e-6)) {
    throw std::invalid_argument("PrecisionConfig: target_rel_error must lie in (1e-16, 1e-6)");
  }
  if (euler_maclaurin_terms < 1 || euler_maclaurin_terms > 30) {
    throw std::invalid_argument("PrecisionConfig: euler_maclaurin_terms must lie in [1, 30]");
  }
  if (shift_threshold < 1) throw std::invalid_argument("PrecisionConfig: shift_threshold must be >= 1");
}

double bernoulli_over_factorial(int k) {
  if (k < 1 || k > static_cast<int>(kBernoulliOverFactorial.size())) {
    throw std::out_of_range("bernoulli_over_factorial: k must lie in [1, 30]");
  }
  return kBernoulliOverFactorial[k - 1];
}

double hurwitz_zeta(double s, double alpha, const PrecisionConfig& cfg) {
  cfg.validate();
  if (s == 1.0) throw std::domain_error("hurwitz_zeta: pole at s = 1");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::domain_error("hurwitz_zeta: alpha must lie in (0, 1]");
  if (!std::isfinite(s)) throw std::domain_error("hurwitz_zeta: s must be finite");

  // The Bernoulli corrections vanish identically for s = 0, -1, ..., so
  // those cases are exact at any shift.
  int shift = cfg.shift_threshold;
  for (;;) {
    const EmResult r = euler_maclaurin(s, alpha, shift, cfg.euler_maclaurin_terms);
    if (r.first_omitted <= cfg.target_rel_error * std::abs(r.value) * 0.1 || shift >= kMaxShift) {
      return r.value;
    }
    shift *= 2;
  }
}

double zeta0_closed(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::domain_error("zeta0_closed: alpha must lie in (0, 1]");
  return 0.5 - alpha;
}

double digamma(double alpha, const PrecisionConfig& cfg) {
  cfg.validate();
  if (!(alpha > 0.0)) throw std::domain_error("digamma: alpha must be positive");
  CompensatedSum shift_sum;
  double x = alpha;
  while (x < cfg.shift_threshold) {
    shift_sum.add(-1.0 / x);
    x += 1.0;
  }
  // psi(x) ~ ln x - 1/(2x) - sum_k B_{2k} / (2k x^{2k}); B_{2k}/(2k) = (B_{2k}/(2k)!) (2k-1)!.
  CompensatedSum asym;
  asym.add(std::log(x));
  asym.add(-0.5 / x);
  const double inv_x2 = 1.0 / (x * x);
  double xpow = inv_x2;
  double fact = 1.0;  // (2k-1)!
  for (int k = 1; k <= cfg.euler_maclaurin_terms; ++k) {
    if (k > 1) fact *= (2.0 * k - 2) * (2.0 * k - 1);
    asym.add(-kBernoulliOverFactorial[k - 1] * fact * xpow);
    xpow *= inv_x2;
  }
  asym.add(shift_sum);
  return asym.value();
}

}  // namespace adlab
