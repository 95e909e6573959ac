// Summatory function, its smooth main term, and the error term Delta.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "adlab/exact_arith.hpp"
#include "adlab/hurwitz.hpp"
#include "adlab/params.hpp"

namespace adlab {

/// Coefficients of the residue sum of zeta(as, l1)zeta(bs, l2) x^s / s.
///
/// For a != b: M(x) = cA x^{1/a} + cB x^{1/b} + c0 with cA = zeta(b/a, lambda2),
/// cB = zeta(a/b, lambda1), c0 = (1/2 - lambda1)(1/2 - lambda2).
/// For a = b = 1 the poles merge and M(x) = x (log x - log_shift) + c0 with
/// log_shift = 1 + digamma(lambda1) + digamma(lambda2).
struct MainTermCoeffs {
  double cA = 0.0;
  double cB = 0.0;
  double c0 = 0.0;
  double inv_a = 1.0;  // exponent of the cA term
  double inv_b = 1.0;  // exponent of the cB term
  bool log_case = false;
  double log_shift = 0.0;

  static MainTermCoeffs from(const Params& p, const PrecisionConfig& cfg = {});

  double operator()(double x) const;
};

double main_term(double x, const Params& p);

/// S(N) = sum_{n <= N} tau(n) by the hyperbola split Sigma1 + Sigma2 - Sigma3.
/// Integer-exact.
u128 summatory_exact(u128 n, const Params& p);
inline u128 summatory_exact(const EvalPoint& pt, const Params& p) { return summatory_exact(pt.n(), p); }

/// Delta at x = N / (M1^a M2^b): S(N) - M(x). Right-continuous at jumps.
double delta(const EvalPoint& pt, const Params& p, const MainTermCoeffs& mt);
double delta(const EvalPoint& pt, const Params& p);

/// F12 + F21: the two hyperbola branches written as sawtooth sums.
double psi_sum_delta(const EvalPoint& pt, const Params& p);

struct Jump {
  u128 n;
  std::uint32_t height;  // tau(n) > 0
};

/// Increasing stream of every N <= M1^a M2^b * t_max with tau(N) > 0.
/// Backed by the segmented sieve; holds one segment at a time.
class JumpStream {
 public:
  JumpStream(double t_max, const Params& p, u64 segment = u64{1} << 20);
  JumpStream(u64 n_lo, u64 n_hi, const Params& p, u64 segment = u64{1} << 20);

  std::optional<Jump> next();

  u64 n_max() const { return n_hi_; }

 private:
  bool refill();

  Params params_;
  u64 n_hi_;
  u64 segment_;
  u64 seg_offset_;
  std::vector<std::uint32_t> buf_;
  std::size_t pos_ = 0;
};

struct DeltaRow {
  u128 n;
  double x;
  u128 summatory;
  double main_term;
  double delta;
};

DeltaRow delta_row(const EvalPoint& pt, const Params& p, const MainTermCoeffs& mt);

/// Columns n,x,summatory,main_term,delta with 15 significant digits.
void write_delta_csv(std::ostream& os, const std::vector<DeltaRow>& rows);

/// %.15g formatting shared by every CSV emitter.
std::string fmt15(double v);

}  // namespace adlab
