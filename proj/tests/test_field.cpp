#include <gtest/gtest.h>

#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "detsum/constructions.hpp"
#include "detsum/field.hpp"
#include "oracle.hpp"

using namespace detsum;

namespace {

const std::vector<std::pair<std::uint32_t, std::uint32_t>> kSmallFields = {
    {3, 1}, {5, 1}, {7, 1}, {3, 2}, {11, 1}, {13, 1}, {17, 1}, {19, 1}, {23, 1}, {5, 2}, {3, 3}};

oracle::Field oracle_of(const FieldCtx& f) {
  oracle::Field o{f.p(), static_cast<int>(f.n()), {}};
  for (auto c : f.modulus()) o.modulus.push_back(c);
  return o;
}

// Remainder of a by monic b over F_p; both constant first.
oracle::Poly poly_rem(oracle::Poly a, const oracle::Poly& b, std::int64_t p) {
  const std::size_t db = b.size() - 1;
  while (a.size() > db) {
    const std::int64_t lead = a.back();
    const std::size_t shift = a.size() - 1 - db;
    for (std::size_t k = 0; k <= db; ++k) a[shift + k] = ((a[shift + k] - lead * b[k]) % p + p) % p;
    a.pop_back();
  }
  return a;
}

bool irreducible_by_trial_division(const oracle::Poly& f, std::int64_t p) {
  const int deg = static_cast<int>(f.size()) - 1;
  for (int d = 1; 2 * d <= deg; ++d) {
    std::int64_t count = 1;
    for (int k = 0; k < d; ++k) count *= p;
    for (std::int64_t code = 0; code < count; ++code) {
      oracle::Poly g(d + 1, 0);
      std::int64_t c = code;
      for (int k = 0; k < d; ++k) {
        g[k] = c % p;
        c /= p;
      }
      g[d] = 1;
      const auto r = poly_rem(f, g, p);
      bool zero = true;
      for (auto v : r) zero = zero && v == 0;
      if (zero) return false;
    }
  }
  return true;
}

// First monic irreducible of degree n in lexicographic order of (c0, ..., c_{n-1}).
oracle::Poly lex_smallest_irreducible(std::int64_t p, int n) {
  std::int64_t count = 1;
  for (int k = 0; k < n; ++k) count *= p;
  for (std::int64_t code = 0; code < count; ++code) {
    oracle::Poly f(n + 1, 0);
    std::int64_t c = code;
    for (int k = n - 1; k >= 0; --k) {
      f[k] = c % p;
      c /= p;
    }
    f[n] = 1;
    if (irreducible_by_trial_division(f, p)) return f;
  }
  return {};
}

}  // namespace

TEST(FieldConstruction, ModulusIsLexSmallestIrreducible) {
  for (auto [p, n] : std::vector<std::pair<std::uint32_t, std::uint32_t>>{
           {3, 2}, {3, 3}, {3, 4}, {5, 2}, {5, 3}, {7, 2}, {11, 2}, {3, 5}}) {
    const auto f = FieldCtx::make(p, n);
    const auto want = lex_smallest_irreducible(p, static_cast<int>(n));
    std::vector<std::uint32_t> got(f.modulus().begin(), f.modulus().end());
    ASSERT_EQ(got.size(), want.size()) << p << "^" << n;
    for (std::size_t k = 0; k < got.size(); ++k) EXPECT_EQ(got[k], want[k]) << p << "^" << n << " coeff " << k;
    EXPECT_TRUE(is_irreducible(f.modulus(), p));
  }
}

TEST(FieldConstruction, NineUsesXSquaredPlusOne) {
  const auto f = FieldCtx::make(3, 2);
  EXPECT_EQ(f.modulus(), (std::vector<std::uint32_t>{1, 0, 1}));
  EXPECT_EQ(f.descriptor(), "3^2:1,0,1");
  EXPECT_EQ(FieldCtx::make(3, 1).q(), 3u);
}

TEST(FieldConstruction, RejectsBadParameters) {
  try {
    FieldCtx::make(2, 1);
    FAIL() << "p = 2 accepted";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("even characteristic unsupported"), std::string::npos) << e.what();
  }
  EXPECT_THROW(FieldCtx::make(9, 1), std::invalid_argument);
  EXPECT_THROW(FieldCtx::make(1, 1), std::invalid_argument);
  EXPECT_THROW(FieldCtx::make(3, 0), std::invalid_argument);
  EXPECT_THROW(FieldCtx::make(257, 2), std::invalid_argument);
  EXPECT_THROW(FieldCtx::make(7, 3, 100), std::invalid_argument);
}

TEST(FieldConstruction, OrderStrings) {
  EXPECT_EQ(FieldCtx::from_order_string("9").descriptor(), "3^2:1,0,1");
  EXPECT_EQ(FieldCtx::from_order_string("3^2").q(), 9u);
  EXPECT_EQ(FieldCtx::from_order_string("27").n(), 3u);
  EXPECT_EQ(FieldCtx::from_order_string("17").n(), 1u);
  EXPECT_THROW(FieldCtx::from_order_string("12"), std::invalid_argument);
  EXPECT_THROW(FieldCtx::from_order_string("8"), std::invalid_argument);
  EXPECT_THROW(FieldCtx::from_order_string("abc"), std::invalid_argument);
  EXPECT_THROW(FieldCtx::from_order_string("3^"), std::invalid_argument);
}

TEST(FieldArithmetic, Examples) {
  const auto f5 = FieldCtx::make(5, 1);
  EXPECT_EQ(f5.mul(f5.elem(2), f5.elem(3)), f5.one());
  const auto f9 = FieldCtx::make(3, 2);
  const auto x = f9.parse("0,1");
  EXPECT_EQ(f9.mul(x, x), f9.elem(2));
  const auto f7 = FieldCtx::make(7, 1);
  EXPECT_EQ(f7.inv(f7.elem(3)), f7.elem(5));
  EXPECT_THROW(f7.inv(f7.zero()), std::domain_error);
  EXPECT_EQ(f7.pow(f7.zero(), 0), f7.one());
  EXPECT_EQ(f7.pow(f7.elem(3), -1), f7.elem(5));
  EXPECT_EQ(f7.from_int(-1), f7.elem(6));
  EXPECT_EQ(f7.from_int(15), f7.one());
}

TEST(FieldArithmetic, MatchesPolynomialOracleExhaustively) {
  for (auto [p, n] : kSmallFields) {
    const auto f = FieldCtx::make(p, n);
    const auto o = oracle_of(f);
    for (std::uint32_t a = 0; a < f.q(); ++a) {
      EXPECT_EQ(f.neg(f.elem(a)).idx(), o.index(o.neg(o.from_index(a))));
      if (a != 0) {
        EXPECT_EQ(f.inv(f.elem(a)).idx(), o.inv_i(a));
      }
      for (std::uint32_t b = 0; b < f.q(); ++b) {
        ASSERT_EQ(f.add(f.elem(a), f.elem(b)).idx(), o.add_i(a, b)) << f.descriptor() << " " << a << "+" << b;
        ASSERT_EQ(f.mul(f.elem(a), f.elem(b)).idx(), o.mul_i(a, b)) << f.descriptor() << " " << a << "*" << b;
        ASSERT_EQ(f.sub(f.elem(a), f.elem(b)).idx(), o.sub_i(a, b));
      }
    }
  }
}

TEST(FieldArithmetic, LargeFieldWithoutDenseTables) {
  const auto f = FieldCtx::make(3, 7);  // q = 2187 > dense limit
  ASSERT_EQ(f.dense_mul(), nullptr);
  const auto o = oracle_of(f);
  SeededRng rng(7);
  for (int k = 0; k < 2000; ++k) {
    const auto a = static_cast<std::uint32_t>(rng.below(f.q()));
    const auto b = static_cast<std::uint32_t>(rng.below(f.q()));
    ASSERT_EQ(f.add(f.elem(a), f.elem(b)).idx(), o.add_i(a, b));
    ASSERT_EQ(f.mul(f.elem(a), f.elem(b)).idx(), o.mul_i(a, b));
    ASSERT_EQ(f.trace(f.elem(a)), o.trace(a));
  }
}

TEST(FieldArithmetic, FieldAxiomsOnSeededTriples) {
  for (auto [p, n] : std::vector<std::pair<std::uint32_t, std::uint32_t>>{{3, 3}, {5, 2}, {7, 2}, {3, 4}, {13, 2}}) {
    const auto f = FieldCtx::make(p, n);
    SeededRng rng(derive_seed(11, f.q()));
    for (int k = 0; k < 1000; ++k) {
      const auto a = f.elem(static_cast<std::uint32_t>(rng.below(f.q())));
      const auto b = f.elem(static_cast<std::uint32_t>(rng.below(f.q())));
      const auto c = f.elem(static_cast<std::uint32_t>(rng.below(f.q())));
      ASSERT_EQ(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
      ASSERT_EQ(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
      ASSERT_EQ(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
      ASSERT_EQ(f.mul(a, b), f.mul(b, a));
      ASSERT_EQ(f.add(a, f.neg(a)), f.zero());
      if (a != f.zero()) {
        ASSERT_EQ(f.mul(a, f.inv(a)), f.one());
      }
    }
  }
}

TEST(FieldArithmetic, GeneratorHasFullOrder) {
  for (auto [p, n] : kSmallFields) {
    const auto f = FieldCtx::make(p, n);
    const auto o = oracle_of(f);
    std::set<std::int64_t> powers;
    for (std::uint32_t e = 0; e + 1 < f.q(); ++e) powers.insert(o.pow_i(f.generator().idx(), e));
    EXPECT_EQ(powers.size(), f.q() - 1) << f.descriptor();
  }
}

TEST(FieldTrace, Examples) {
  const auto f5 = FieldCtx::make(5, 1);
  EXPECT_EQ(f5.trace(f5.elem(2)), 2u);
  const auto f9 = FieldCtx::make(3, 2);
  EXPECT_EQ(f9.trace(f9.parse("0,1")), 0u);
  EXPECT_EQ(f9.trace(f9.one()), 2u);
}

TEST(FieldTrace, MatchesFrobeniusSumLinearAndOnto) {
  for (auto [p, n] : kSmallFields) {
    const auto f = FieldCtx::make(p, n);
    const auto o = oracle_of(f);
    std::vector<std::uint32_t> hits(p, 0);
    for (std::uint32_t a = 0; a < f.q(); ++a) {
      ASSERT_EQ(f.trace(f.elem(a)), o.trace(a)) << f.descriptor() << " a=" << a;
      ++hits[f.trace(f.elem(a))];
      for (std::uint32_t b = 0; b < f.q(); b += 3) {
        ASSERT_EQ(f.trace(f.add(f.elem(a), f.elem(b))), (f.trace(f.elem(a)) + f.trace(f.elem(b))) % p);
        ASSERT_EQ(f.trace_mul(f.elem(a), f.elem(b)), f.trace(f.mul(f.elem(a), f.elem(b))));
      }
    }
    for (auto h : hits) EXPECT_EQ(h, f.q() / p) << f.descriptor();
  }
}

TEST(FieldQuadratic, Examples) {
  const auto f5 = FieldCtx::make(5, 1);
  EXPECT_EQ(f5.quad(f5.elem(4)), 1);
  EXPECT_EQ(f5.quad(f5.elem(2)), -1);
  EXPECT_EQ(f5.quad(f5.zero()), 0);
  const auto f9 = FieldCtx::make(3, 2);
  EXPECT_EQ(f9.quad(f9.neg(f9.one())), 1);
  EXPECT_EQ(f5.smallest_nonsquare(), f5.elem(2));
}

TEST(FieldQuadratic, MatchesSquareEnumerationAndIsMultiplicative) {
  for (auto [p, n] : kSmallFields) {
    const auto f = FieldCtx::make(p, n);
    const auto o = oracle_of(f);
    int total = 0;
    for (std::uint32_t a = 0; a < f.q(); ++a) {
      ASSERT_EQ(f.quad(f.elem(a)), o.eta(a)) << f.descriptor() << " a=" << a;
      total += f.quad(f.elem(a));
      for (std::uint32_t b = 0; b < f.q(); ++b)
        ASSERT_EQ(f.quad(f.mul(f.elem(a), f.elem(b))), f.quad(f.elem(a)) * f.quad(f.elem(b)));
    }
    EXPECT_EQ(total, 0) << f.descriptor();
    EXPECT_EQ(f.quad(f.smallest_nonsquare()), -1);
  }
}

TEST(FieldSubfield, PrimeSubfield) {
  const auto f9 = FieldCtx::make(3, 2);
  EXPECT_EQ(f9.prime_subfield_elems(), (std::vector<FqElem>{f9.elem(0), f9.elem(1), f9.elem(2)}));
  const auto f5 = FieldCtx::make(5, 1);
  EXPECT_EQ(f5.prime_subfield_elems().size(), 5u);
  const auto f25 = FieldCtx::make(5, 2);
  const auto sub = f25.prime_subfield_elems();
  ASSERT_EQ(sub.size(), 5u);
  const std::set<FqElem> members(sub.begin(), sub.end());
  for (auto a : sub)
    for (auto b : sub) {
      EXPECT_TRUE(members.count(f25.mul(a, b)));
      EXPECT_TRUE(members.count(f25.add(a, b)));
    }
}

TEST(FieldText, FormatParseRoundTrip) {
  for (auto [p, n] : kSmallFields) {
    const auto f = FieldCtx::make(p, n);
    for (std::uint32_t a = 0; a < f.q(); ++a) {
      const auto e = f.elem(a);
      ASSERT_EQ(f.parse(f.format(e)), e);
      const auto c = f.coeffs(e);
      ASSERT_EQ(c.size(), f.n());
      ASSERT_EQ(f.from_coeffs(c), e);
    }
  }
  const auto f9 = FieldCtx::make(3, 2);
  EXPECT_EQ(f9.parse("2,1"), f9.elem(2 + 3));
  EXPECT_EQ(f9.format(f9.elem(5)), "2,1");
  EXPECT_EQ(f9.parse("1"), f9.one());
  EXPECT_THROW(f9.parse("1,1,1"), std::invalid_argument);
  EXPECT_THROW(f9.parse("3"), std::invalid_argument);
  EXPECT_THROW(f9.parse("x"), std::invalid_argument);
  EXPECT_THROW(f9.elem(9), std::out_of_range);
}
