#include "adlab/params.hpp"

#include <numeric>
#include <sstream>

namespace adlab {

void check_residues_and_gcd(const Params& p) {
  if (p.a == 0 || p.b == 0) throw ParamError("exponents a and b must be positive integers");
  if (std::gcd(p.a, p.b) != 1) {
    std::ostringstream os;
    os << "gcd(a,b)=1 is required, got gcd(" << p.a << "," << p.b << ")=" << std::gcd(p.a, p.b);
    throw ParamError(os.str());
  }
  if (p.m1 == 0 || p.m2 == 0) throw ParamError("moduli m1 and m2 must be positive integers");
  if (p.l1 < 1 || p.l1 > p.m1) throw ParamError("residue l1 must satisfy 1 <= l1 <= m1");
  if (p.l2 < 1 || p.l2 > p.m2) throw ParamError("residue l2 must satisfy 1 <= l2 <= m2");
}

Params Params::make(unsigned a, unsigned b, u64 m1, u64 m2, u64 l1, u64 l2) {
  Params p{a, b, m1, m2, l1, l2};
  if (a > b) throw ParamError("exponents must satisfy 1 <= a <= b");
  check_residues_and_gcd(p);
  (void)p.scale();
  return p;
}

Params Params::mirrored() const { return Params{b, a, m2, m1, l2, l1}; }

u128 Params::scale() const {
  const u128 s1 = saturating_pow(m1, a);
  const u128 s2 = saturating_pow(m2, b);
  if (s1 == kU128Max || s2 == kU128Max || (s2 != 0 && s1 > kU128Max / s2)) {
    throw BudgetError("M1^a M2^b overflows the 128-bit counting range");
  }
  return s1 * s2;
}

std::string Params::describe() const {
  std::ostringstream os;
  os << "a=" << a << " b=" << b << " M1=" << m1 << " M2=" << m2 << " l1=" << l1 << " l2=" << l2;
  return os.str();
}

}  // namespace adlab
