// Explicit matrix sets: the nonsquare sharpness construction, product-type
// sets, prime-subfield examples and seeded random subsets.

#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "detsum/field.hpp"
#include "detsum/matrix_ring.hpp"
#include "detsum/report.hpp"

namespace detsum {

/// Seeded generator: std::mt19937_64 (sequence fixed by the C++ standard) with
/// rejection sampling for bounded draws, so streams agree across platforms.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, bound), bound > 0.
  std::uint64_t below(std::uint64_t bound);
  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

/// Independent stream seed for (base, a, b), via the SplitMix64 finalizer.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0);

/// Matrices [[x1, x2], [-x2, x4]] with x1 x4 + x2^2 = i, and a maximal subset
/// E of that variety with E and -E disjoint.
struct SharpnessSet {
  FqElem i;
  MatSet h;
  MatSet e;
};

/// Requires i to be a nonsquare. E keeps the smaller-index member of each {x, -x}.
SharpnessSet build_sharpness(const FieldCtx& f, FqElem i);

/// For every y in H: exactly one x in H has x (.) y = -2i, and it is -y; for y in E
/// no x in E solves it. Also records 0 not in det(E + E).
Report verify_unique_solution(const SharpnessSet& sh);

using Vec2 = std::array<FqElem, 2>;

/// Rows drawn independently: {[[a1, a2], [b1, b2]] : a in s1, b in s2}.
MatSet product_set(const FieldCtx& f, std::span<const Vec2> s1, std::span<const Vec2> s2);
std::vector<Vec2> all_vectors(const FieldCtx& f);
/// F_p x F_p inside F_q^2.
std::vector<Vec2> prime_grid_vectors(const FieldCtx& f);
/// Seeded uniform subset of F_q^2 without replacement, in index order.
std::vector<Vec2> random_vectors(const FieldCtx& f, std::size_t size, std::uint64_t seed);

/// All p^4 matrices with prime-subfield entries. Requires n >= 2.
MatSet prime_subfield_matrices(const FieldCtx& f);
/// SL_2(F_p) inside M_2(F_q). Requires n even.
MatSet sl2_prime_subfield(const FieldCtx& f);

/// Uniform subset of `parent` of the given size, determined by (parent, size, seed).
MatSet random_subset(const MatSet& parent, std::size_t size, std::uint64_t seed);
/// Seeded uniformly shuffled member list of `parent`; prefixes give nested subsets.
std::vector<MatIndex> seeded_permutation(const MatSet& parent, std::uint64_t seed);

}  // namespace detsum
