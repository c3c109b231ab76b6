#include "detsum/field.hpp"

#include <charconv>
#include <stdexcept>

namespace detsum {

namespace {

using Poly = std::vector<std::uint32_t>;

void trim(Poly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

// Remainder of a modulo a monic polynomial.
Poly poly_mod(Poly a, const Poly& monic, std::uint32_t p) {
  const std::size_t deg = monic.size() - 1;
  trim(a);
  while (a.size() > deg) {
    const std::uint64_t lead = a.back();
    const std::size_t shift = a.size() - 1 - deg;
    for (std::size_t i = 0; i <= deg; ++i) {
      a[shift + i] = static_cast<std::uint32_t>(
          (a[shift + i] + (p - lead) * monic[i]) % p);
    }
    trim(a);
  }
  return a;
}

Poly poly_mulmod(const Poly& a, const Poly& b, const Poly& monic, std::uint32_t p) {
  if (a.empty() || b.empty()) return {};
  Poly r(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) {
      r[i + j] = static_cast<std::uint32_t>((r[i + j] + std::uint64_t{a[i]} * b[j]) % p);
    }
  }
  return poly_mod(std::move(r), monic, p);
}

Poly poly_powmod(Poly base, std::uint64_t e, const Poly& monic, std::uint32_t p) {
  Poly result{1};
  result = poly_mod(result, monic, p);
  base = poly_mod(std::move(base), monic, p);
  while (e > 0) {
    if (e & 1) result = poly_mulmod(result, base, monic, p);
    base = poly_mulmod(base, base, monic, p);
    e >>= 1;
  }
  return result;
}

std::uint32_t inv_mod(std::uint32_t a, std::uint32_t p) {
  std::uint64_t r = 1, b = a % p;
  for (std::uint32_t e = p - 2; e > 0; e >>= 1) {
    if (e & 1) r = r * b % p;
    b = b * b % p;
  }
  return static_cast<std::uint32_t>(r);
}

// Monic-normalized gcd.
Poly poly_gcd(Poly a, Poly b, std::uint32_t p) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    const std::uint32_t li = inv_mod(b.back(), p);
    Poly mb = b;
    for (auto& c : mb) c = static_cast<std::uint32_t>(std::uint64_t{c} * li % p);
    a = poly_mod(std::move(a), mb, p);
    std::swap(a, b);
  }
  return a;
}

std::vector<std::uint64_t> prime_factors(std::uint64_t v) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t d = 2; d * d <= v; ++d) {
    if (v % d == 0) {
      out.push_back(d);
      while (v % d == 0) v /= d;
    }
  }
  if (v > 1) out.push_back(v);
  return out;
}

}  // namespace

bool is_prime(std::uint64_t v) {
  if (v < 2) return false;
  for (std::uint64_t d = 2; d * d <= v; ++d) {
    if (v % d == 0) return false;
  }
  return true;
}

bool is_irreducible(std::span<const std::uint32_t> monic, std::uint32_t p) {
  Poly f(monic.begin(), monic.end());
  if (f.size() < 2 || f.back() != 1) {
    throw std::invalid_argument("is_irreducible: expected a monic polynomial of degree >= 1");
  }
  const std::size_t n = f.size() - 1;
  if (n == 1) return true;
  // f is irreducible iff gcd(x^{p^k} - x, f) == 1 for every k <= n/2.
  Poly h = poly_mod(Poly{0, 1}, f, p);
  for (std::size_t k = 1; k <= n / 2; ++k) {
    h = poly_powmod(h, p, f, p);
    Poly diff = h;
    diff.resize(std::max<std::size_t>(diff.size(), 2), 0);
    diff[1] = (diff[1] + p - 1) % p;
    trim(diff);
    if (diff.empty()) return false;
    if (poly_gcd(f, diff, p).size() > 1) return false;
  }
  return true;
}

FieldCtx FieldCtx::make(std::uint32_t p, std::uint32_t n, std::uint64_t budget) {
  if (p == 2) throw std::invalid_argument("even characteristic unsupported");
  if (!is_prime(p)) {
    throw std::invalid_argument("characteristic " + std::to_string(p) + " is not prime");
  }
  if (n == 0) throw std::invalid_argument("extension degree must be >= 1");
  std::uint64_t q = 1;
  for (std::uint32_t i = 0; i < n; ++i) {
    q *= p;
    if (q > budget) {
      throw std::invalid_argument("field order " + std::to_string(p) + "^" + std::to_string(n) +
                                  " exceeds table budget q <= " + std::to_string(budget));
    }
  }

  auto t = std::make_shared<Tables>();
  t->p = p;
  t->n = n;
  t->q = static_cast<std::uint32_t>(q);
  t->pow_p.resize(n + 1);
  t->pow_p[0] = 1;
  for (std::uint32_t i = 1; i <= n; ++i) t->pow_p[i] = t->pow_p[i - 1] * p;

  // Lexicographically smallest (c0 most significant) monic irreducible.
  Poly f(n + 1, 0);
  f[n] = 1;
  bool found = false;
  for (std::uint64_t rank = 0; rank < q && !found; ++rank) {
    std::uint64_t r = rank;
    for (std::uint32_t k = 0; k < n; ++k) {
      f[n - 1 - k] = static_cast<std::uint32_t>(r % p);
      r /= p;
    }
    found = is_irreducible(f, p);
  }
  if (!found) throw std::logic_error("no irreducible polynomial found");
  t->modulus = f;

  const auto to_poly = [&](std::uint32_t idx) {
    Poly a(n, 0);
    for (std::uint32_t k = 0; k < n; ++k) {
      a[k] = idx % p;
      idx /= p;
    }
    return a;
  };
  const auto to_idx = [&](const Poly& a) {
    std::uint32_t idx = 0;
    for (std::size_t k = a.size(); k-- > 0;) idx = idx * p + a[k];
    return idx;
  };

  // Generator: smallest index of order q - 1.
  const auto factors = prime_factors(q - 1);
  for (std::uint32_t cand = 1; cand < q; ++cand) {
    const Poly c = to_poly(cand);
    bool ok = true;
    for (auto r : factors) {
      Poly v = poly_powmod(c, (q - 1) / r, f, p);
      if (v.size() == 1 && v[0] == 1) {
        ok = false;
        break;
      }
    }
    if (ok) {
      t->generator = cand;
      break;
    }
  }
  if (t->generator == 0) throw std::logic_error("no generator found");

  t->exp.resize(q - 1);
  t->log.assign(q, 0);
  {
    const Poly g = to_poly(t->generator);
    Poly cur{1};
    for (std::uint32_t k = 0; k + 1 < q; ++k) {
      Poly padded = cur;
      padded.resize(n, 0);
      const std::uint32_t idx = to_idx(padded);
      t->exp[k] = idx;
      t->log[idx] = k;
      cur = poly_mulmod(cur, g, f, p);
    }
  }

  t->neg.resize(q);
  for (std::uint32_t a = 0; a < q; ++a) {
    std::uint32_t r = 0;
    for (std::uint32_t k = n; k-- > 0;) {
      const std::uint32_t d = (a / t->pow_p[k]) % p;
      r = r * p + (p - d) % p;
    }
    t->neg[a] = r;
  }
  t->inv.assign(q, 0);
  for (std::uint32_t a = 1; a < q; ++a) {
    t->inv[a] = t->exp[(q - 1 - t->log[a]) % (q - 1)];
  }

  FieldCtx partial(t);
  t->trace.resize(q);
  t->quad.resize(q);
  t->trace[0] = 0;
  t->quad[0] = 0;
  for (std::uint32_t a = 1; a < q; ++a) {
    std::uint64_t e = t->log[a];
    FqElem sum{0};
    for (std::uint32_t k = 0; k < n; ++k) {
      sum = partial.add_digits(sum, FqElem{t->exp[e % (q - 1)]}, false);
      e = e * p % (q - 1);
    }
    if (sum.value >= p) throw std::logic_error("trace left the prime subfield");
    t->trace[a] = static_cast<std::uint16_t>(sum.value);
    t->quad[a] = (t->log[a] % 2 == 0) ? 1 : -1;
  }

  if (q <= kDenseTableLimit) {
    t->add.resize(std::size_t{q} * q);
    t->mul.resize(std::size_t{q} * q);
    t->trace_mul.resize(std::size_t{q} * q);
    for (std::uint32_t a = 0; a < q; ++a) {
      for (std::uint32_t b = 0; b < q; ++b) {
        const std::size_t k = std::size_t{a} * q + b;
        t->add[k] = static_cast<std::uint16_t>(partial.add_digits(FqElem{a}, FqElem{b}, false).value);
        const FqElem m = partial.mul_log(FqElem{a}, FqElem{b});
        t->mul[k] = static_cast<std::uint16_t>(m.value);
        t->trace_mul[k] = t->trace[m.value];
      }
    }
  }
  return FieldCtx(std::move(t));
}

FieldCtx FieldCtx::from_order_string(std::string_view spec, std::uint64_t budget) {
  const auto parse_u = [&](std::string_view s) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
      throw std::invalid_argument("bad field order '" + std::string(spec) + "'");
    }
    return v;
  };
  if (auto caret = spec.find('^'); caret != std::string_view::npos) {
    const auto p = parse_u(spec.substr(0, caret));
    const auto n = parse_u(spec.substr(caret + 1));
    if (p > 0xFFFFFFFFu || n > 64) throw std::invalid_argument("field order out of range");
    return make(static_cast<std::uint32_t>(p), static_cast<std::uint32_t>(n), budget);
  }
  const auto q = parse_u(spec);
  if (q < 2) throw std::invalid_argument("field order must be a prime power >= 3");
  std::uint64_t p = 2;
  while (q % p != 0) ++p;
  std::uint32_t n = 0;
  std::uint64_t r = q;
  while (r % p == 0) {
    r /= p;
    ++n;
  }
  if (r != 1) throw std::invalid_argument(std::to_string(q) + " is not a prime power");
  return make(static_cast<std::uint32_t>(p), n, budget);
}

FqElem FieldCtx::elem(std::uint32_t index) const {
  if (index >= q()) throw std::out_of_range("element index out of range");
  return FqElem{index};
}

FqElem FieldCtx::from_int(std::int64_t v) const {
  const std::int64_t p64 = p();
  return FqElem{static_cast<std::uint32_t>(((v % p64) + p64) % p64)};
}

FqElem FieldCtx::from_coeffs(std::span<const std::uint32_t> c) const {
  if (c.size() > n()) throw std::invalid_argument("too many coefficients for F_q element");
  std::uint32_t idx = 0;
  for (std::size_t k = c.size(); k-- > 0;) {
    if (c[k] >= p()) throw std::invalid_argument("coefficient out of range [0, p)");
    idx += c[k] * t_->pow_p[k];
  }
  return FqElem{idx};
}

std::vector<std::uint32_t> FieldCtx::coeffs(FqElem a) const {
  std::vector<std::uint32_t> c(n());
  std::uint32_t v = a.value;
  for (auto& d : c) {
    d = v % p();
    v /= p();
  }
  return c;
}

FqElem FieldCtx::add_digits(FqElem a, FqElem b, bool subtract) const {
  const std::uint32_t p = t_->p;
  std::uint32_t r = 0, x = a.value, y = b.value;
  for (std::uint32_t k = 0; k < t_->n; ++k) {
    const std::uint32_t dx = x % p, dy = y % p;
    x /= p;
    y /= p;
    const std::uint32_t d = subtract ? (dx + p - dy) % p : (dx + dy) % p;
    r += d * t_->pow_p[k];
  }
  return FqElem{r};
}

FqElem FieldCtx::mul_log(FqElem a, FqElem b) const {
  if (a.value == 0 || b.value == 0) return FqElem{0};
  const std::uint32_t ord = t_->q - 1;
  return FqElem{t_->exp[(t_->log[a.value] + t_->log[b.value]) % ord]};
}

FqElem FieldCtx::inv(FqElem a) const {
  if (a.value == 0) throw std::domain_error("inverse of zero in F_q");
  return FqElem{t_->inv[a.value]};
}

FqElem FieldCtx::pow(FqElem a, std::int64_t e) const {
  if (e == 0) return one();
  if (e < 0) {
    a = inv(a);
    e = -e;
  }
  if (a.value == 0) return zero();
  const std::uint64_t ord = t_->q - 1;
  const std::uint64_t k = (std::uint64_t{t_->log[a.value]} * (static_cast<std::uint64_t>(e) % ord)) % ord;
  return FqElem{t_->exp[k]};
}

std::vector<FqElem> FieldCtx::prime_subfield_elems() const {
  std::vector<FqElem> out;
  out.reserve(p());
  for (std::uint32_t c = 0; c < p(); ++c) out.push_back(FqElem{c});
  return out;
}

FqElem FieldCtx::smallest_nonsquare() const {
  for (std::uint32_t a = 1; a < q(); ++a) {
    if (t_->quad[a] == -1) return FqElem{a};
  }
  throw std::logic_error("field has no nonsquare");
}

std::string FieldCtx::format(FqElem a) const {
  std::string s;
  const auto c = coeffs(a);
  for (std::size_t k = 0; k < c.size(); ++k) {
    if (k) s += ',';
    s += std::to_string(c[k]);
  }
  return s;
}

FqElem FieldCtx::parse(std::string_view text) const {
  std::vector<std::uint32_t> c;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    std::string_view tok = text.substr(pos, comma - pos);
    while (!tok.empty() && tok.front() == ' ') tok.remove_prefix(1);
    while (!tok.empty() && tok.back() == ' ') tok.remove_suffix(1);
    std::uint32_t v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (tok.empty() || ec != std::errc{} || ptr != tok.data() + tok.size()) {
      throw std::invalid_argument("bad F_q element '" + std::string(text) + "'");
    }
    c.push_back(v);
    pos = comma + 1;
  }
  return from_coeffs(c);
}

std::string FieldCtx::descriptor() const {
  std::string s = std::to_string(p()) + "^" + std::to_string(n()) + ":";
  for (std::size_t k = 0; k < t_->modulus.size(); ++k) {
    if (k) s += ',';
    s += std::to_string(t_->modulus[k]);
  }
  return s;
}

}  // namespace detsum
