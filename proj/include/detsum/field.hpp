// Finite fields F_{p^n} of odd characteristic with table-driven arithmetic.
//
// Elements are stored by their integer index sum(c_i * p^i), where c_i is the
// coefficient of x^i in the canonical representative modulo the field modulus.
// The index is a bijection F_q <-> [0, q) and is what every table is keyed on.

#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace detsum {

/// One element of F_q, identified by its canonical index.
struct FqElem {
  std::uint32_t value = 0;

  constexpr std::uint32_t idx() const { return value; }
  friend constexpr auto operator<=>(FqElem, FqElem) = default;
};

/// Default cap on q for table construction.
inline constexpr std::uint64_t kDefaultTableBudget = std::uint64_t{1} << 16;

/// Above this order the dense q*q add/mul tables are not built.
inline constexpr std::uint32_t kDenseTableLimit = 512;

bool is_prime(std::uint64_t v);

/// Immutable context for F_{p^n}. Copies share the same tables, so a context
/// can be handed to concurrent workers by value.
class FieldCtx {
 public:
  /// Builds F_{p^n} with the lexicographically smallest monic irreducible
  /// modulus. Throws std::invalid_argument on even or non-prime p, n == 0, or
  /// q above `budget`.
  static FieldCtx make(std::uint32_t p, std::uint32_t n,
                       std::uint64_t budget = kDefaultTableBudget);

  /// Accepts "q" or "p^n" ("9", "3^2").
  static FieldCtx from_order_string(std::string_view spec,
                                    std::uint64_t budget = kDefaultTableBudget);

  std::uint32_t p() const { return t_->p; }
  std::uint32_t n() const { return t_->n; }
  std::uint32_t q() const { return t_->q; }

  /// Monic modulus, constant term first, length n + 1.
  const std::vector<std::uint32_t>& modulus() const { return t_->modulus; }

  /// Smallest-index element of multiplicative order q - 1.
  FqElem generator() const { return FqElem{t_->generator}; }

  FqElem zero() const { return FqElem{0}; }
  FqElem one() const { return FqElem{1}; }
  FqElem elem(std::uint32_t index) const;
  /// Image of an integer in the prime subfield.
  FqElem from_int(std::int64_t v) const;
  FqElem from_coeffs(std::span<const std::uint32_t> coeffs) const;
  std::vector<std::uint32_t> coeffs(FqElem a) const;

  FqElem add(FqElem a, FqElem b) const {
    if (!t_->add.empty()) return FqElem{t_->add[a.value * t_->q + b.value]};
    return add_digits(a, b, false);
  }
  FqElem sub(FqElem a, FqElem b) const { return add(a, neg(b)); }
  FqElem neg(FqElem a) const { return FqElem{t_->neg[a.value]}; }
  FqElem mul(FqElem a, FqElem b) const {
    if (!t_->mul.empty()) return FqElem{t_->mul[a.value * t_->q + b.value]};
    return mul_log(a, b);
  }
  /// Throws std::domain_error for a == 0.
  FqElem inv(FqElem a) const;
  FqElem div(FqElem a, FqElem b) const { return mul(a, inv(b)); }
  /// a^e with a^0 == 1 (including 0^0); negative e inverts first.
  FqElem pow(FqElem a, std::int64_t e) const;

  /// Absolute trace to F_p, as a residue in [0, p).
  std::uint32_t trace(FqElem a) const { return t_->trace[a.value]; }
  /// Quadratic character: 0 at 0, +1 on nonzero squares, -1 otherwise.
  int quad(FqElem a) const { return t_->quad[a.value]; }

  /// Trace of a product, looked up from a q*q table when q <= 512.
  std::uint32_t trace_mul(FqElem a, FqElem b) const {
    if (!t_->trace_mul.empty()) return t_->trace_mul[a.value * t_->q + b.value];
    return trace(mul(a, b));
  }

  /// Dense q*q tables (row a, column b) when q <= kDenseTableLimit, else nullptr.
  const std::uint16_t* dense_add() const { return t_->add.empty() ? nullptr : t_->add.data(); }
  const std::uint16_t* dense_mul() const { return t_->mul.empty() ? nullptr : t_->mul.data(); }
  const std::uint32_t* neg_table() const { return t_->neg.data(); }

  /// The p constant polynomials, in increasing index order.
  std::vector<FqElem> prime_subfield_elems() const;
  /// Smallest-index element with quad == -1.
  FqElem smallest_nonsquare() const;

  /// "c0,c1,...", constant term first, always n entries.
  std::string format(FqElem a) const;
  /// Inverse of format; fewer than n coefficients are zero-padded.
  FqElem parse(std::string_view text) const;
  /// "p^n:c0,c1,...,cn" (modulus coefficients, constant first).
  std::string descriptor() const;

  bool same_field(const FieldCtx& other) const {
    return t_ == other.t_ || (p() == other.p() && n() == other.n());
  }

 private:
  struct Tables {
    std::uint32_t p = 0, n = 0, q = 0;
    std::vector<std::uint32_t> modulus;
    std::uint32_t generator = 0;
    std::vector<std::uint32_t> pow_p;  // p^i for i <= n
    std::vector<std::uint32_t> exp;    // g^k, k in [0, q-1)
    std::vector<std::uint32_t> log;    // inverse of exp on nonzero
    std::vector<std::uint32_t> neg;
    std::vector<std::uint32_t> inv;
    std::vector<std::uint16_t> trace;
    std::vector<std::int8_t> quad;
    std::vector<std::uint16_t> add;        // dense, q <= kDenseTableLimit
    std::vector<std::uint16_t> mul;        // dense, q <= kDenseTableLimit
    std::vector<std::uint16_t> trace_mul; // dense, q <= kDenseTableLimit
  };

  explicit FieldCtx(std::shared_ptr<const Tables> t) : t_(std::move(t)) {}

  FqElem add_digits(FqElem a, FqElem b, bool subtract) const;
  FqElem mul_log(FqElem a, FqElem b) const;

  std::shared_ptr<const Tables> t_;
};

/// Monic polynomial over F_p (constant first, leading 1 included) irreducibility.
bool is_irreducible(std::span<const std::uint32_t> monic, std::uint32_t p);

}  // namespace detsum
