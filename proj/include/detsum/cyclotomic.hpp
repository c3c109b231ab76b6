// Exact arithmetic in Z[zeta_p] for prime p.

#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace detsum {

/// Element of Z[zeta_p] held as p integer coefficients of 1, zeta, ..., zeta^{p-1}
/// in canonical form (coefficient of zeta^{p-1} is zero). All arithmetic is
/// overflow checked and throws std::overflow_error instead of wrapping.
class CycInt {
 public:
  /// Throws std::invalid_argument unless p is prime.
  explicit CycInt(std::uint32_t p);
  CycInt(std::uint32_t p, std::int64_t integer);

  /// zeta_p^k for any integer k.
  static CycInt zeta_pow(std::uint32_t p, std::int64_t k);
  /// sum_k counts[k] * zeta^k, counts.size() == p.
  static CycInt from_exponent_counts(std::uint32_t p, std::span<const std::int64_t> counts);

  std::uint32_t p() const { return p_; }
  /// Canonical coefficients (length p, last entry zero).
  const std::vector<std::int64_t>& coeffs() const { return c_; }

  CycInt& operator+=(const CycInt& o);
  CycInt& operator-=(const CycInt& o);
  CycInt& operator*=(const CycInt& o);
  friend CycInt operator+(CycInt a, const CycInt& b) { return a += b; }
  friend CycInt operator-(CycInt a, const CycInt& b) { return a -= b; }
  friend CycInt operator*(CycInt a, const CycInt& b) { return a *= b; }
  CycInt operator-() const;
  friend bool operator==(const CycInt& a, const CycInt& b) {
    return a.p_ == b.p_ && a.c_ == b.c_;
  }

  CycInt scale(std::int64_t k) const;
  /// Complex conjugation, zeta^k -> zeta^{-k}.
  CycInt conj() const;
  /// a * conj(a).
  CycInt norm_sq() const;

  std::complex<double> eval() const;
  bool is_real() const;
  bool is_integer() const;
  /// Throws std::domain_error if not a rational integer.
  std::int64_t as_integer() const;

  /// "c0 + c1*zeta + c2*zeta^2 ..." with zero terms dropped; "0" for zero.
  std::string to_string() const;

 private:
  void canonicalize();
  void require_same(const CycInt& o) const;

  std::uint32_t p_;
  std::vector<std::int64_t> c_;
};

/// value = num / q^k; used for normalized transforms without rationals.
struct ScaledCyc {
  CycInt num;
  unsigned k = 0;
};

/// Exact a.num / q^a.k == b.num / q^b.k.
bool scaled_equal(const ScaledCyc& a, const ScaledCyc& b, std::uint32_t q);

namespace checked {
std::int64_t add(std::int64_t a, std::int64_t b);
std::int64_t sub(std::int64_t a, std::int64_t b);
std::int64_t mul(std::int64_t a, std::int64_t b);
}  // namespace checked

}  // namespace detsum
