// Problem instance for the congruence-restricted divisor function.
#pragma once

#include <stdexcept>
#include <string>

#include "adlab/exact_arith.hpp"

namespace adlab {

/// Thrown when a parameter set violates an instance invariant.
class ParamError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when a request exceeds a configured size or integer-width budget.
class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Counts pairs (n1, n2) with n1^a n2^b = n, n1 == l1 (mod m1), n2 == l2 (mod m2).
struct Params {
  unsigned a = 1;
  unsigned b = 1;
  u64 m1 = 1;
  u64 m2 = 1;
  u64 l1 = 1;
  u64 l2 = 1;

  /// Validated construction: 1 <= a <= b, gcd(a, b) = 1, 1 <= l_i <= m_i.
  static Params make(unsigned a, unsigned b, u64 m1, u64 m2, u64 l1, u64 l2);

  /// Same instance with the roles of (a, m1, l1) and (b, m2, l2) exchanged.
  /// The result may have a > b; every algorithm accepts that ordering.
  Params mirrored() const;

  double lambda1() const { return static_cast<double>(l1) / static_cast<double>(m1); }
  double lambda2() const { return static_cast<double>(l2) / static_cast<double>(m2); }

  /// M1^a M2^b; throws BudgetError if it does not fit 128 bits.
  u128 scale() const;

  bool trivial_congruences() const { return m1 == 1 && m2 == 1; }

  std::string describe() const;
};

/// Checks the invariants shared by every ordering (coprime, residues in range).
void check_residues_and_gcd(const Params& p);

}  // namespace adlab
