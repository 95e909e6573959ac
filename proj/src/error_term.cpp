#include "adlab/error_term.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "adlab/divisor.hpp"

namespace adlab {

MainTermCoeffs MainTermCoeffs::from(const Params& p, const PrecisionConfig& cfg) {
  MainTermCoeffs m;
  const double l1 = p.lambda1();
  const double l2 = p.lambda2();
  m.c0 = zeta0_closed(l1) * zeta0_closed(l2);
  m.inv_a = 1.0 / p.a;
  m.inv_b = 1.0 / p.b;
  if (p.a == p.b) {
    // gcd(a, b) = 1 forces a = b = 1: double pole at s = 1.
    m.log_case = true;
    m.log_shift = 1.0 + digamma(l1, cfg) + digamma(l2, cfg);
    return m;
  }
  m.cA = hurwitz_zeta(static_cast<double>(p.b) / p.a, l2, cfg);
  m.cB = hurwitz_zeta(static_cast<double>(p.a) / p.b, l1, cfg);
  return m;
}

double MainTermCoeffs::operator()(double x) const {
  if (log_case) return x * (std::log(x) - log_shift) + c0;
  return cA * std::pow(x, inv_a) + cB * std::pow(x, inv_b) + c0;
}

double main_term(double x, const Params& p) { return MainTermCoeffs::from(p)(x); }

u128 summatory_exact(u128 n, const Params& p) {
  if (n == 0) return 0;
  const unsigned ab = p.a + p.b;
  // Pairs with n1 <= R or n2 <= R cover the region; R = floor(N^{1/(a+b)}).
  const u128 root = ikth_root(n, ab);

  u128 sigma1 = 0;
  for (u128 n1 = p.l1; n1 <= root; n1 += p.m1) {
    sigma1 += residue_count(floor_scaled_root(n, n1, p.a, p.b), p.l2, p.m2);
  }
  u128 sigma2 = 0;
  for (u128 n2 = p.l2; n2 <= root; n2 += p.m2) {
    sigma2 += residue_count(floor_scaled_root(n, n2, p.b, p.a), p.l1, p.m1);
  }
  const u128 sigma3 = residue_count(root, p.l1, p.m1) * residue_count(root, p.l2, p.m2);
  return sigma1 + sigma2 - sigma3;
}

double delta(const EvalPoint& pt, const Params& p, const MainTermCoeffs& mt) {
  return static_cast<double>(summatory_exact(pt.n(), p)) - mt(pt.x());
}

double delta(const EvalPoint& pt, const Params& p) { return delta(pt, p, MainTermCoeffs::from(p)); }

namespace {

// floor((z - l) / m) for unsigned z, possibly negative.
long double floor_shift_div(u128 z, u64 l, u64 m) {
  if (z >= l) return static_cast<long double>((z - l) / m);
  return -static_cast<long double>((l - z + m - 1) / m);
}

// psi(Z/m - l/m) where Z = (n / k^e_k)^{1/e_z}; the integer part comes from the
// exact root so the sawtooth never jumps on the wrong side of an integer.
double branch_psi(u128 n, u128 k, unsigned e_k, unsigned e_z, u64 m, u64 l) {
  const double nd = static_cast<double>(n);
  const double z = std::pow(nd / std::pow(static_cast<double>(k), e_k), 1.0 / e_z);
  const double t = z / static_cast<double>(m) - static_cast<double>(l) / static_cast<double>(m);
  const long double whole = floor_shift_div(floor_scaled_root(n, k, e_k, e_z), l, m);
  return static_cast<double>(static_cast<long double>(t) - whole) - 0.5;
}

}  // namespace

double psi_sum_delta(const EvalPoint& pt, const Params& p) {
  const u128 n = pt.n();
  const u128 root = ikth_root(n, p.a + p.b);
  double f12 = 0.0;
  for (u128 n1 = p.l1; n1 <= root; n1 += p.m1) f12 -= branch_psi(n, n1, p.a, p.b, p.m2, p.l2);
  double f21 = 0.0;
  for (u128 n2 = p.l2; n2 <= root; n2 += p.m2) f21 -= branch_psi(n, n2, p.b, p.a, p.m1, p.l1);
  return f12 + f21;
}

JumpStream::JumpStream(double t_max, const Params& p, u64 segment)
    : params_(p), segment_(segment), seg_offset_(0) {
  if (!(t_max >= 1.0)) throw std::invalid_argument("JumpStream: t_max must be >= 1");
  const long double hi = std::floor(static_cast<long double>(t_max) * static_cast<long double>(p.scale()));
  if (hi >= static_cast<long double>(u64{1} << 62)) throw BudgetError("JumpStream: range exceeds 2^62");
  n_hi_ = static_cast<u64>(hi);
}

JumpStream::JumpStream(u64 n_lo, u64 n_hi, const Params& p, u64 segment)
    : params_(p), n_hi_(n_hi), segment_(segment), seg_offset_(n_lo) {}

bool JumpStream::refill() {
  if (seg_offset_ >= n_hi_) return false;
  const u64 len = std::min(segment_, n_hi_ - seg_offset_);
  buf_ = tau_segment(seg_offset_, len, params_);
  pos_ = 0;
  seg_offset_ += len;
  return true;
}

std::optional<Jump> JumpStream::next() {
  for (;;) {
    while (pos_ < buf_.size()) {
      const std::size_t i = pos_++;
      if (buf_[i] != 0) {
        const u64 base = seg_offset_ - buf_.size();
        return Jump{static_cast<u128>(base) + i + 1, buf_[i]};
      }
    }
    if (!refill()) return std::nullopt;
  }
}

DeltaRow delta_row(const EvalPoint& pt, const Params& p, const MainTermCoeffs& mt) {
  DeltaRow r;
  r.n = pt.n();
  r.x = pt.x();
  r.summatory = summatory_exact(pt.n(), p);
  r.main_term = mt(r.x);
  r.delta = static_cast<double>(r.summatory) - r.main_term;
  return r;
}

std::string fmt15(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

void write_delta_csv(std::ostream& os, const std::vector<DeltaRow>& rows) {
  os << "n,x,summatory,main_term,delta\n";
  for (const auto& r : rows) {
    os << to_string(r.n) << ',' << fmt15(r.x) << ',' << to_string(r.summatory) << ','
       << fmt15(r.main_term) << ',' << fmt15(r.delta) << '\n';
  }
}

}  // namespace adlab
