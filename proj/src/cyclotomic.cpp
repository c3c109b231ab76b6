#include "detsum/cyclotomic.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "detsum/field.hpp"

namespace detsum {

namespace checked {

std::int64_t add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("Z[zeta] coefficient overflow");
  return r;
}

std::int64_t sub(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_sub_overflow(a, b, &r)) throw std::overflow_error("Z[zeta] coefficient overflow");
  return r;
}

std::int64_t mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("Z[zeta] coefficient overflow");
  return r;
}

}  // namespace checked

CycInt::CycInt(std::uint32_t p) : p_(p), c_(p, 0) {
  if (!is_prime(p)) {
    throw std::invalid_argument("Z[zeta_p] requires prime p, got " + std::to_string(p));
  }
}

CycInt::CycInt(std::uint32_t p, std::int64_t integer) : CycInt(p) {
  c_[0] = integer;
  canonicalize();
}

CycInt CycInt::zeta_pow(std::uint32_t p, std::int64_t k) {
  CycInt r(p);
  const std::int64_t pp = p;
  r.c_[static_cast<std::size_t>(((k % pp) + pp) % pp)] = 1;
  r.canonicalize();
  return r;
}

CycInt CycInt::from_exponent_counts(std::uint32_t p, std::span<const std::int64_t> counts) {
  if (counts.size() != p) throw std::invalid_argument("exponent count vector must have length p");
  CycInt r(p);
  for (std::size_t k = 0; k < p; ++k) r.c_[k] = counts[k];
  r.canonicalize();
  return r;
}

void CycInt::canonicalize() {
  const std::int64_t top = c_[p_ - 1];
  if (top == 0) return;
  for (auto& v : c_) v = checked::sub(v, top);
}

void CycInt::require_same(const CycInt& o) const {
  if (o.p_ != p_) {
    throw std::domain_error("mismatched cyclotomic orders " + std::to_string(p_) + " and " +
                            std::to_string(o.p_));
  }
}

CycInt& CycInt::operator+=(const CycInt& o) {
  require_same(o);
  for (std::size_t k = 0; k < p_; ++k) c_[k] = checked::add(c_[k], o.c_[k]);
  canonicalize();
  return *this;
}

CycInt& CycInt::operator-=(const CycInt& o) {
  require_same(o);
  for (std::size_t k = 0; k < p_; ++k) c_[k] = checked::sub(c_[k], o.c_[k]);
  canonicalize();
  return *this;
}

CycInt& CycInt::operator*=(const CycInt& o) {
  require_same(o);
  std::vector<std::int64_t> r(p_, 0);
  for (std::size_t a = 0; a < p_; ++a) {
    if (c_[a] == 0) continue;
    for (std::size_t b = 0; b < p_; ++b) {
      if (o.c_[b] == 0) continue;
      const std::size_t k = (a + b) % p_;
      r[k] = checked::add(r[k], checked::mul(c_[a], o.c_[b]));
    }
  }
  c_ = std::move(r);
  canonicalize();
  return *this;
}

CycInt CycInt::operator-() const { return scale(-1); }

CycInt CycInt::scale(std::int64_t k) const {
  CycInt r(*this);
  for (auto& v : r.c_) v = checked::mul(v, k);
  return r;
}

CycInt CycInt::conj() const {
  CycInt r(p_);
  for (std::size_t k = 0; k < p_; ++k) r.c_[(p_ - k) % p_] = c_[k];
  r.canonicalize();
  return r;
}

CycInt CycInt::norm_sq() const { return *this * conj(); }

std::complex<double> CycInt::eval() const {
  std::complex<double> s{0.0, 0.0};
  for (std::size_t k = 0; k < p_; ++k) {
    if (c_[k] == 0) continue;
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) / p_;
    s += static_cast<double>(c_[k]) * std::complex<double>(std::cos(angle), std::sin(angle));
  }
  return s;
}

bool CycInt::is_real() const { return conj() == *this; }

bool CycInt::is_integer() const {
  for (std::size_t k = 1; k < p_; ++k) {
    if (c_[k] != 0) return false;
  }
  return true;
}

std::int64_t CycInt::as_integer() const {
  if (!is_integer()) throw std::domain_error("cyclotomic value " + to_string() + " is not an integer");
  return c_[0];
}

std::string CycInt::to_string() const {
  std::string s;
  for (std::size_t k = 0; k < p_; ++k) {
    if (c_[k] == 0) continue;
    if (s.empty()) {
      s = std::to_string(c_[k]);
    } else {
      s += c_[k] < 0 ? " - " : " + ";
      s += std::to_string(c_[k] < 0 ? -c_[k] : c_[k]);
    }
    if (k == 1) s += "*zeta";
    if (k > 1) s += "*zeta^" + std::to_string(k);
  }
  return s.empty() ? "0" : s;
}

bool scaled_equal(const ScaledCyc& a, const ScaledCyc& b, std::uint32_t q) {
  CycInt lhs = a.num, rhs = b.num;
  for (unsigned k = a.k; k < b.k; ++k) lhs = lhs.scale(q);
  for (unsigned k = b.k; k < a.k; ++k) rhs = rhs.scale(q);
  return lhs == rhs;
}

}  // namespace detsum
