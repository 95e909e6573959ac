// Real-argument Hurwitz zeta and digamma.
#pragma once

namespace adlab {

struct PrecisionConfig {
  double target_rel_error = 1e-13;
  /// Number of Bernoulli pairs kept in the Euler-Maclaurin tail.
  int euler_maclaurin_terms = 12;
  /// Terms summed directly before the asymptotic tail takes over.
  int shift_threshold = 16;

  /// Throws std::invalid_argument if any field is outside its allowed range.
  void validate() const;
};

/// zeta(s, alpha) = sum_{n>=0} (n + alpha)^{-s}, continued to all real s != 1.
///
/// Shifted Euler-Maclaurin: the first N terms are summed directly and the
/// remainder is replaced by the integral, the half term and the Bernoulli
/// corrections. N starts at cfg.shift_threshold and doubles until the first
/// omitted correction falls below the relative target.
double hurwitz_zeta(double s, double alpha, const PrecisionConfig& cfg = {});

/// zeta(0, alpha) = 1/2 - alpha.
double zeta0_closed(double alpha);

/// Digamma function psi(alpha) for alpha > 0.
double digamma(double alpha, const PrecisionConfig& cfg = {});

/// B_{2k} / (2k)! for k = 1..30.
double bernoulli_over_factorial(int k);

}  // namespace adlab
