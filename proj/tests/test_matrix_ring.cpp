#include <gtest/gtest.h>

#include <set>
#include <stdexcept>
#include <vector>

#include "detsum/constructions.hpp"
#include "detsum/matrix_ring.hpp"
#include "detsum/report.hpp"

using namespace detsum;

namespace {

const std::vector<std::uint32_t> kOrders = {3, 5, 7, 9, 11, 13, 17, 19, 23, 25, 27};

Mat2 random_mat(const FieldCtx& f, SeededRng& rng) {
  auto e = [&] { return f.elem(static_cast<std::uint32_t>(rng.below(f.q()))); };
  return {e(), e(), e(), e()};
}

MatSet naive_sumset(const MatSet& a, const MatSet& b) {
  MatSet out(a.field());
  for (const auto& x : a.mats())
    for (const auto& y : b.mats()) out.insert(mat_add(a.field(), x, y));
  return out;
}

}  // namespace

TEST(MatrixRing, DeterminantExamples) {
  const auto f = FieldCtx::make(5, 1);
  EXPECT_EQ(det(f, mat_identity(f)), f.one());
  EXPECT_EQ(det(f, {f.one(), f.one(), f.one(), f.one()}), f.zero());
  EXPECT_EQ(det(f, {f.elem(2), f.elem(3), f.elem(1), f.elem(4)}), f.zero());
  EXPECT_EQ(odot(f, mat_identity(f), mat_identity(f)), f.elem(2));
}

TEST(MatrixRing, OdotPolarizesDeterminant) {
  for (std::uint32_t q : {3u, 5u, 9u, 25u, 27u}) {
    const auto f = FieldCtx::from_order_string(std::to_string(q));
    SeededRng rng(derive_seed(17, q));
    for (int k = 0; k < 500; ++k) {
      const auto x = random_mat(f, rng);
      const auto y = random_mat(f, rng);
      const auto c = f.elem(static_cast<std::uint32_t>(rng.below(q)));
      ASSERT_EQ(odot(f, x, x), f.mul(f.elem(2), det(f, x)));
      ASSERT_EQ(det(f, mat_add(f, x, y)), f.add(f.add(det(f, x), det(f, y)), odot(f, x, y)));
      ASSERT_EQ(det(f, mat_sub(f, x, y)), f.sub(f.add(det(f, x), det(f, y)), odot(f, x, y)));
      ASSERT_EQ(odot(f, x, y), odot(f, y, x));
      ASSERT_EQ(odot(f, mat_scale(f, c, x), y), f.mul(c, odot(f, x, y)));
      ASSERT_EQ(det(f, mat_scale(f, c, x)), f.mul(f.mul(c, c), det(f, x)));
      ASSERT_EQ(det(f, mat_neg(f, x)), det(f, x));
    }
  }
}

TEST(MatrixRing, IndexRoundTrip) {
  const auto f = FieldCtx::make(3, 2);
  for (MatIndex idx = 0; idx < 6561; ++idx) ASSERT_EQ(mat_index(f, mat_from_index(f, idx)), idx);
  const Mat2 x{f.elem(1), f.elem(2), f.elem(3), f.elem(4)};
  EXPECT_EQ(mat_index(f, x), 1u + 2u * 9 + 3u * 81 + 4u * 729);
}

TEST(MatrixRing, TextRoundTrip) {
  const auto f5 = FieldCtx::make(5, 1);
  EXPECT_EQ(parse_mat(f5, "[1,0;0,1]"), mat_identity(f5));
  EXPECT_EQ(format_mat(f5, mat_identity(f5)), "[1,0;0,1]");
  const auto f9 = FieldCtx::make(3, 2);
  const Mat2 x{f9.elem(5), f9.zero(), f9.one(), f9.elem(3)};
  EXPECT_EQ(format_mat(f9, x), "[(2,1),(0,0);(1,0),(0,1)]");
  EXPECT_EQ(parse_mat(f9, format_mat(f9, x)), x);
  EXPECT_THROW(parse_mat(f5, "[1,0;0]"), std::invalid_argument);
  EXPECT_THROW(parse_mat(f5, "1,0;0,1"), std::invalid_argument);
}

TEST(Varieties, Cardinalities) {
  const auto f3 = FieldCtx::make(3, 1);
  EXPECT_EQ(variety(f3, f3.one()).size(), 24u);
  EXPECT_EQ(variety(f3, f3.zero()).size(), 33u);
  const auto f5 = FieldCtx::make(5, 1);
  EXPECT_EQ(variety(f5, f5.elem(2)).size(), 120u);
}

TEST(Varieties, PartitionTheRingWithClosedFormSizes) {
  for (auto q : kOrders) {
    const auto f = FieldCtx::from_order_string(std::to_string(q));
    const std::uint64_t q64 = q;
    std::uint64_t total = 0;
    MatSet seen(f);
    for (std::uint32_t t = 0; t < q; ++t) {
      const auto d = variety(f, f.elem(t), 2);
      const std::uint64_t want = t == 0 ? q64 * q64 * q64 + q64 * q64 - q64 : q64 * q64 * q64 - q64;
      ASSERT_EQ(d.size(), want) << "q=" << q << " t=" << t;
      ASSERT_TRUE(set_intersect(seen, d).empty());
      seen = set_union(seen, d);
      total += d.size();
    }
    EXPECT_EQ(total, q64 * q64 * q64 * q64);
    EXPECT_EQ(seen, MatSet::full(f));
  }
}

TEST(Varieties, NegationAndScaling) {
  for (std::uint32_t q : {3u, 5u, 9u}) {
    const auto f = FieldCtx::from_order_string(std::to_string(q));
    for (std::uint32_t t = 1; t < q; ++t) {
      const auto d = variety(f, f.elem(t));
      EXPECT_EQ(negate(d), d);
      const auto c = f.generator();
      EXPECT_EQ(scale_set(d, c), variety(f, f.mul(f.mul(c, c), f.elem(t))));
    }
  }
}

TEST(Sumsets, Examples) {
  const auto f = FieldCtx::make(5, 1);
  const auto eye = MatSet::from_mats(f, std::vector<Mat2>{mat_identity(f)});
  const auto two_i = sumset(eye, eye);
  EXPECT_EQ(two_i.size(), 1u);
  EXPECT_TRUE(two_i.contains(mat_scale(f, f.elem(2), mat_identity(f))));
  const auto zero = MatSet::from_indices(f, std::vector<MatIndex>{0});
  const auto d2 = variety(f, f.elem(2));
  EXPECT_EQ(sumset(d2, zero), d2);
  EXPECT_TRUE(sumset(d2, MatSet(f)).empty());
}

TEST(Sumsets, MatchNaiveEnumeration) {
  for (std::uint32_t q : {3u, 5u, 9u}) {
    const auto f = FieldCtx::from_order_string(std::to_string(q));
    const auto full = MatSet::full(f);
    for (std::uint64_t trial = 0; trial < 15; ++trial) {
      SeededRng rng(derive_seed(23, q, trial));
      const auto a = random_subset(full, 1 + rng.below(40), derive_seed(1, q, trial));
      const auto b = random_subset(full, 1 + rng.below(40), derive_seed(2, q, trial));
      const auto s = sumset(a, b, 1 + trial % 3);
      ASSERT_EQ(s, naive_sumset(a, b));
      ASSERT_EQ(s, sumset(b, a));
    }
  }
}

TEST(Sumsets, VarietySumsetIsAtLeastCauchySchwarzBound) {
  // |D1 + D1| at q = 3 and the energy of D1 with itself, both by enumeration.
  const auto f = FieldCtx::make(3, 1);
  const auto d1 = variety(f, f.one());
  const auto s = sumset(d1, d1);
  std::vector<std::uint64_t> reps(81, 0);
  for (auto x : d1.mats())
    for (auto y : d1.mats()) ++reps[mat_index(f, mat_add(f, x, y))];
  std::uint64_t energy = 0, support = 0;
  for (auto c : reps) {
    energy += c * c;
    support += c > 0;
  }
  EXPECT_EQ(s.size(), support);
  EXPECT_GE(s.size() * energy, 24ull * 24 * 24 * 24);
}

TEST(Sumsets, Iteration) {
  const auto f9 = FieldCtx::make(3, 2);
  const auto zero = MatSet::from_indices(f9, std::vector<MatIndex>{0});
  for (unsigned k = 1; k <= 4; ++k) EXPECT_EQ(iterate_sumset(zero, k), zero);
  const auto sl2 = sl2_prime_subfield(f9);
  EXPECT_EQ(iterate_sumset(sl2, 1), sl2);
  EXPECT_EQ(iterate_sumset(sl2, 2), sumset(sl2, sl2));
  EXPECT_EQ(iterate_sumset(sl2, 3), sumset(sumset(sl2, sl2), sl2));
  const auto grid = prime_subfield_matrices(f9);
  const auto four = iterate_sumset(sl2, 4);
  EXPECT_TRUE(set_intersect(four, complement(grid)).empty());
  EXPECT_THROW(iterate_sumset(sl2, 0), std::invalid_argument);
}

TEST(DeterminantSets, Examples) {
  const auto f3 = FieldCtx::make(3, 1);
  EXPECT_EQ(det_set(MatSet::full(f3)), (std::vector<FqElem>{f3.elem(0), f3.elem(1), f3.elem(2)}));
  const auto f5 = FieldCtx::make(5, 1);
  const auto s = MatSet::from_mats(f5, std::vector<Mat2>{mat_identity(f5), mat_scale(f5, f5.elem(2), mat_identity(f5))});
  EXPECT_EQ(det_set(s), (std::vector<FqElem>{f5.elem(1), f5.elem(4)}));
  EXPECT_TRUE(det_set(MatSet(f5)).empty());
}

TEST(SetOperations, Basics) {
  const auto f = FieldCtx::make(3, 1);
  EXPECT_TRUE(complement(MatSet::full(f)).empty());
  EXPECT_EQ(complement(MatSet(f)), MatSet::full(f));
  const auto d1 = variety(f, f.one());
  const auto d2 = variety(f, f.elem(2));
  EXPECT_EQ(set_union(d1, d2).size(), 48u);
  EXPECT_TRUE(set_intersect(d1, d2).empty());
  EXPECT_EQ(complement(complement(d1)), d1);
  const auto f5 = FieldCtx::make(5, 1);
  EXPECT_THROW(set_union(d1, variety(f5, f5.one())), std::invalid_argument);
}

TEST(MatSetStorage, IndicesAndWords) {
  const auto f = FieldCtx::make(3, 1);
  const std::vector<MatIndex> idx = {80, 3, 17, 3};
  const auto s = MatSet::from_indices(f, idx);
  EXPECT_EQ(s.size(), 3u);
  EXPECT_EQ(s.indices(), (std::vector<MatIndex>{3, 17, 80}));
  EXPECT_EQ(MatSet::from_words(f, s.words()), s);
  EXPECT_EQ(to_json(s).dump(), "[3,17,80]");
  EXPECT_EQ(matset_from_json(f, to_json(s)), s);
  EXPECT_THROW(matset_from_json(f, json::array({81})), std::invalid_argument);
  const auto coords = member_coords(s);
  ASSERT_EQ(coords.size(), 3u);
  EXPECT_EQ(coords[1], (std::array<std::uint16_t, 4>{2, 2, 1, 0}));
  EXPECT_THROW(MatSet(FieldCtx::make(67, 1)), std::invalid_argument);
}
