// Truncated Voronoi-type cosine expansion of Delta, the sawtooth Fourier
// truncation, and a numerical check of the stationary-phase transform.
#pragma once

#include <complex>
#include <iosfwd>
#include <vector>

#include "adlab/divisor.hpp"
#include "adlab/error_term.hpp"
#include "adlab/params.hpp"

namespace adlab {

/// a^{b/(2(a+b))} b^{a/(2(a+b))} (a+b)^{-1/2}; symmetric in (a, b).
double c1(const Params& p);
/// (a/b)^{b/(a+b)} + (b/a)^{a/(a+b)}; symmetric in (a, b).
double c2(const Params& p);

struct TruncationConfig {
  double z = 1.0;
  int h_order = 2;

  void validate() const;
};

/// Default cutoff x^{a/b} (log x)^{-(b + b^2/a + 1)}, clamped to [1, 1e6].
double default_z(double x, const Params& p);

/// Coefficient table of Delta*(x; z) for one (p, z).
///
/// Each decomposition n = h^a r^b <= z contributes
///   weight * cos(2 pi c2 (x n)^{1/(a+b)} - 2 pi (h l1/M1 + r l2/M2 + 1/8)),
/// all scaled by (c1 / pi) x^{1/(2(a+b))}. Terms are sorted by n.
class VoronoiTable {
 public:
  struct Term {
    u64 n;
    u64 h;
    u64 r;
    double weight;
    double root;    // n^{1/(a+b)}
    double offset;  // (h l1/M1 + r l2/M2 + 1/8) mod 1
  };

  VoronoiTable(const Params& p, double z);

  double operator()(double x) const;

  /// Amplitude (c1/pi) x^{1/(2(a+b))}.
  double amplitude(double x) const;
  /// c2 x^{1/(a+b)}: the phase of term n is frequency(x) * root(n) cycles.
  double frequency(double x) const;

  const std::vector<Term>& terms() const { return terms_; }
  const Params& params() const { return params_; }
  double z() const { return z_; }

 private:
  Params params_;
  double z_;
  double c1_;
  double c2_;
  double inv_ab_;
  std::vector<Term> terms_;
};

double delta_star(double x, double z, const Params& p);

/// E(x) = Delta(x) - Delta*(x; z).
double remainder(const EvalPoint& pt, const VoronoiTable& table, const MainTermCoeffs& mt);
double remainder(const EvalPoint& pt, double z, const Params& p);

/// Fourier truncation of the sawtooth: -sum_{h=1..H} sin(2 pi h u) / (pi h).
double psi_truncated(double u, int h_order);
/// Envelope min(1, 1/(H ||u||)) of the truncation error.
double psi_truncation_bound(double u, int h_order);

/// One dyadic-style window of the n1-sum in the first hyperbola branch.
struct BProcessWindow {
  unsigned j = 0;
  u64 h = 1;
  double x = 1.0;
  double c = 1.0;       // (2ab)^{ab}
  double m_j = 0.0;     // (M1^a M2^b x)^{1/(a+b)} c^{-j}
  double m_next = 0.0;  // m_{j+1}
  long J = 0;           // (L/(a+b) - log L) / log c with L = log x

  static BProcessWindow make(unsigned j, u64 h, double x, const Params& p);
};

struct BProcessResult {
  std::complex<double> lhs;
  std::complex<double> rhs;
  double diff = 0.0;
  long lhs_terms = 0;
  long rhs_terms = 0;
  double r_lo = 0.0;  // (a/b) h (2ab)^{a(a+b)j} M1/M2
  double r_hi = 0.0;  // same with j + 1
};

/// Direct exponential sum over the window against its stationary-phase dual
/// sum (half weight on integer endpoints).
BProcessResult bprocess_check(const BProcessWindow& w, const Params& p);

struct VoronoiRow {
  double x;
  double delta;
  double delta_star;
  double remainder;
};

/// Columns x,delta,delta_star,remainder with 15 significant digits.
void write_voronoi_csv(std::ostream& os, const std::vector<VoronoiRow>& rows);

}  // namespace adlab
