// Exact mean square of Delta, the constant c*, and the verification report.
#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "adlab/error_term.hpp"
#include "adlab/numeric.hpp"
#include "adlab/params.hpp"

namespace adlab {

/// Largest N = M1^a M2^b T accepted by the jump walk.
inline constexpr u64 kMaxIntegralN = u64{1} << 36;

/// Integral of (A - cA x^{1/a} - cB x^{1/b} - c0)^2 over [x0, x1], expanded into
/// the six power terms and integrated term by term. The log case uses
/// A - x(log x - shift) - c0 and its own expansion.
double power_square_antiderivative(double A, const MainTermCoeffs& mt, double x0, double x1);

/// Same integral, evaluated as a polynomial in s = (x - x0)/x0 around the left
/// endpoint. Stable when A and M(x) are large and nearly equal.
double interval_square(double A, const MainTermCoeffs& mt, double x0, double x1);

/// Walks the jumps of S and accumulates the integral of Delta^2 from x = 1.
class DeltaSqIntegrator {
 public:
  explicit DeltaSqIntegrator(const Params& p);

  /// Integrates up to x with the current step value (x >= position()).
  void advance(double x);
  /// Adds a jump of S at the current position.
  void jump(double height) { level_ += height; }

  double position() const { return x_; }
  double level() const { return level_; }
  double value() const { return acc_.value(); }

 private:
  MainTermCoeffs mt_;
  double x_ = 1.0;
  double level_ = 0.0;
  CompensatedSum acc_;
};

/// Integral of Delta^2(M1^a M2^b x) over [1, T].
double integral_delta_sq(double T, const Params& p);

/// The same integral at every T of an increasing grid, in one pass over the jumps.
std::vector<double> integral_delta_sq_grid(const std::vector<double>& Ts, const Params& p);

/// a^{b/(a+b)} b^{a/(a+b)} / (2(a+b+1) pi^2).
double cstar_prefactor(const Params& p);

/// prefactor * sum_n g*(n): partial sum to nmax plus a power-law tail estimate,
/// bracketed below by the partial sum and above by the g^2 tail bound.
SeriesBracket cstar(const Params& p, u64 nmax);

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double stderr_ = 0.0;
};

struct MeanSquareRow {
  double T = 0.0;
  double integral = 0.0;
  double ratio = 0.0;
  std::optional<double> fitted_exponent;  // slope over rows up to this one
};

/// Least-squares line through (log T, log I).
FitResult exponent_fit(const std::vector<MeanSquareRow>& rows);

struct RemainderMeanSquare {
  double e2 = 0.0;
  double d2 = 0.0;
  double ratio = 0.0;
};

/// Integrals of E^2 and Delta^2 over [T, 2T] and their ratio.
///
/// Both integrands are sampled with Gauss-Legendre nodes inside every interval
/// between consecutive jumps. Delta* is replaced by a Chebyshev interpolant on
/// blocks spanning a bounded number of phase cycles of its fastest term.
RemainderMeanSquare remainder_meansquare(double T, double z, const Params& p);

/// Same for several cutoffs over one shared pass of the jumps.
std::vector<RemainderMeanSquare> remainder_meansquare(double T, const std::vector<double>& zs,
                                                      const Params& p);

inline constexpr double kMaxSabCap = 1e8;

/// Truncated S_{a,b}(T) over n1, n2 <= cap, kernel min(T^{1/(a+b)}, |n1^{1/(a+b)} - n2^{1/(a+b)}|^{-1}).
double eval_S_ab(double T, double cap, const Params& p);

struct MeanSquareReport {
  Params params;
  std::vector<MeanSquareRow> rows;
  SeriesBracket cstar;
  double slope = 0.0;
  double slope_stderr = 0.0;
  double runtime_sec = 0.0;
};

/// Growth exponent (1 + a + b)/(a + b) of I(T).
double meansquare_exponent(const Params& p);

/// Powers of two from t_min up to t_max (t_max included if it is not a power of two).
std::vector<double> doubling_grid(double t_min, double t_max);

MeanSquareReport meansquare_report(const Params& p, const std::vector<double>& Ts, u64 cstar_nmax);

void write_report_json(std::ostream& os, const MeanSquareReport& r);
MeanSquareReport read_report_json(std::istream& is);
/// Columns T,integral,ratio,fitted_exponent.
void write_report_csv(std::ostream& os, const MeanSquareReport& r);

}  // namespace adlab
