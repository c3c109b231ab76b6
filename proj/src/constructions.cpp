#include "detsum/constructions.hpp"

#include <algorithm>
#include <stdexcept>

#include "detsum/char_transforms.hpp"

namespace detsum {

std::uint64_t SeededRng::below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("SeededRng::below needs a positive bound");
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
  for (;;) {
    const std::uint64_t v = engine_();
    if (v < limit) return v % bound;
  }
}

namespace {

std::uint64_t splitmix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
  return splitmix(splitmix(splitmix(base) ^ a) ^ b);
}

SharpnessSet build_sharpness(const FieldCtx& f, FqElem i) {
  if (i.value == 0) throw std::invalid_argument("sharpness construction needs i != 0");
  if (f.quad(i) != -1) {
    throw std::invalid_argument("sharpness construction needs a nonsquare i, got " + f.format(i));
  }
  SharpnessSet sh{i, MatSet(f), MatSet(f)};
  for (std::uint32_t x1 = 0; x1 < f.q(); ++x1) {
    for (std::uint32_t x2 = 0; x2 < f.q(); ++x2) {
      for (std::uint32_t x4 = 0; x4 < f.q(); ++x4) {
        const Mat2 x{FqElem{x1}, FqElem{x2}, f.neg(FqElem{x2}), FqElem{x4}};
        if (det(f, x) == i) sh.h.insert(x);
      }
    }
  }
  for (auto k : sh.h.indices()) {
    const MatIndex partner = mat_index(f, mat_neg(f, mat_from_index(f, k)));
    if (k < partner) sh.e.insert(k);
  }
  return sh;
}

Report verify_unique_solution(const SharpnessSet& sh) {
  const FieldCtx& f = sh.h.field();
  Report r;
  r.experiment = "sharpness";
  r.field = f.descriptor();
  r.params = {{"q", f.q()}, {"i", f.format(sh.i)}};

  const std::int64_t q = f.q();
  r.check("variety-cardinality", static_cast<std::int64_t>(sh.h.size()), q * (q - 1),
          static_cast<std::int64_t>(sh.h.size()) == q * (q - 1));
  r.check("half-cardinality", static_cast<std::int64_t>(sh.e.size()), q * (q - 1) / 2,
          static_cast<std::int64_t>(sh.e.size()) == q * (q - 1) / 2);
  const MatSet neg_e = negate(sh.e);
  r.check("antisymmetric", static_cast<std::int64_t>(set_intersect(sh.e, neg_e).size()), 0,
          set_intersect(sh.e, neg_e).empty());
  r.check("union-is-variety", static_cast<std::int64_t>(set_union(sh.e, neg_e).size()),
          static_cast<std::int64_t>(sh.h.size()), set_union(sh.e, neg_e) == sh.h);

  const FqElem target = f.neg(f.mul(f.from_int(2), sh.i));
  const auto hs = sh.h.mats();
  std::int64_t bad_h = 0;
  for (const auto& y : hs) {
    std::int64_t solutions = 0;
    bool is_neg = false;
    for (const auto& x : hs) {
      if (odot(f, x, y) != target) continue;
      ++solutions;
      is_neg = x == mat_neg(f, y);
    }
    if (solutions != 1 || !is_neg) ++bad_h;
  }
  r.check("unique-solution", bad_h, 0, bad_h == 0,
          "count of y in H_i without exactly one solution equal to -y");

  const auto es = sh.e.mats();
  std::int64_t in_e = 0;
  for (const auto& y : es) {
    for (const auto& x : es) {
      if (odot(f, x, y) == target) ++in_e;
    }
  }
  r.check("no-solution-in-E", in_e, 0, in_e == 0);

  const auto dets = det_set(sumset(sh.e, sh.e));
  const bool zero_missing = std::find(dets.begin(), dets.end(), f.zero()) == dets.end();
  r.check("zero-not-determinant", static_cast<std::int64_t>(dets.size()), q - 1, zero_missing,
          "lhs = |det(E+E)|, rhs = q - 1");
  return r;
}

MatSet product_set(const FieldCtx& f, std::span<const Vec2> s1, std::span<const Vec2> s2) {
  MatSet out(f);
  for (const auto& a : s1) {
    for (const auto& b : s2) out.insert(Mat2{a[0], a[1], b[0], b[1]});
  }
  return out;
}

std::vector<Vec2> all_vectors(const FieldCtx& f) {
  std::vector<Vec2> out;
  out.reserve(std::size_t{f.q()} * f.q());
  for (std::uint32_t b = 0; b < f.q(); ++b) {
    for (std::uint32_t a = 0; a < f.q(); ++a) out.push_back({FqElem{a}, FqElem{b}});
  }
  return out;
}

std::vector<Vec2> prime_grid_vectors(const FieldCtx& f) {
  std::vector<Vec2> out;
  for (auto b : f.prime_subfield_elems()) {
    for (auto a : f.prime_subfield_elems()) out.push_back({a, b});
  }
  return out;
}

std::vector<Vec2> random_vectors(const FieldCtx& f, std::size_t size, std::uint64_t seed) {
  auto all = all_vectors(f);
  if (size > all.size()) throw std::invalid_argument("requested more vectors than |F_q^2|");
  SeededRng rng(seed);
  for (std::size_t k = 0; k < size; ++k) {
    const std::size_t pick = k + static_cast<std::size_t>(rng.below(all.size() - k));
    std::swap(all[k], all[pick]);
  }
  all.resize(size);
  const std::uint32_t q = f.q();
  std::sort(all.begin(), all.end(), [q](const Vec2& u, const Vec2& v) {
    return u[0].value + q * u[1].value < v[0].value + q * v[1].value;
  });
  return all;
}

MatSet prime_subfield_matrices(const FieldCtx& f) {
  if (f.n() < 2) throw std::invalid_argument("prime-subfield matrices need n >= 2");
  MatSet out(f);
  const auto fp = f.prime_subfield_elems();
  for (auto a : fp)
    for (auto b : fp)
      for (auto c : fp)
        for (auto d : fp) out.insert(Mat2{a, b, c, d});
  return out;
}

MatSet sl2_prime_subfield(const FieldCtx& f) {
  if (f.n() % 2 != 0) throw std::invalid_argument("SL_2(F_p) example needs even extension degree n");
  MatSet out(f);
  const auto fp = f.prime_subfield_elems();
  for (auto a : fp)
    for (auto b : fp)
      for (auto c : fp)
        for (auto d : fp) {
          const Mat2 x{a, b, c, d};
          if (det(f, x) == f.one()) out.insert(x);
        }
  return out;
}

std::vector<MatIndex> seeded_permutation(const MatSet& parent, std::uint64_t seed) {
  auto members = parent.indices();
  SeededRng rng(seed);
  for (std::size_t k = 0; k + 1 < members.size(); ++k) {
    const std::size_t pick = k + static_cast<std::size_t>(rng.below(members.size() - k));
    std::swap(members[k], members[pick]);
  }
  return members;
}

MatSet random_subset(const MatSet& parent, std::size_t size, std::uint64_t seed) {
  if (size > parent.size()) {
    throw std::invalid_argument("random subset of size " + std::to_string(size) + " from a set of size " +
                                std::to_string(parent.size()));
  }
  auto members = parent.indices();
  SeededRng rng(seed);
  for (std::size_t k = 0; k < size; ++k) {
    const std::size_t pick = k + static_cast<std::size_t>(rng.below(members.size() - k));
    std::swap(members[k], members[pick]);
  }
  members.resize(size);
  return MatSet::from_indices(parent.field(), members);
}

}  // namespace detsum
