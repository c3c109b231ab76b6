// The ring M_2(F_q) viewed as the index space [0, q^4), with dense subsets.

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "detsum/field.hpp"

namespace detsum {

/// Row-major 2x2 matrix [[x1, x2], [x3, x4]]. Carries no field context.
struct Mat2 {
  FqElem x1, x2, x3, x4;
  friend constexpr bool operator==(const Mat2&, const Mat2&) = default;
};

using MatIndex = std::uint32_t;

/// Largest q for which matrix sets are supported (q^4 bits per set).
inline constexpr std::uint32_t kMatrixRingMaxQ = 64;

MatIndex mat_index(const FieldCtx& f, const Mat2& x);
Mat2 mat_from_index(const FieldCtx& f, MatIndex idx);

Mat2 mat_identity(const FieldCtx& f);
Mat2 mat_add(const FieldCtx& f, const Mat2& x, const Mat2& y);
Mat2 mat_sub(const FieldCtx& f, const Mat2& x, const Mat2& y);
Mat2 mat_neg(const FieldCtx& f, const Mat2& x);
Mat2 mat_scale(const FieldCtx& f, FqElem c, const Mat2& x);

/// x1*x4 - x2*x3.
FqElem det(const FieldCtx& f, const Mat2& x);
/// x1*y4 - x2*y3 - x3*y2 + x4*y1; det(x + y) = det x + det y + x.y.
FqElem odot(const FieldCtx& f, const Mat2& x, const Mat2& y);
/// Ordinary dot product on F_q^4.
FqElem dot(const FieldCtx& f, const Mat2& x, const Mat2& y);

/// "[a,b;c,d]". Entries of F_q with n > 1 are wrapped in parentheses: "(2,1)".
std::string format_mat(const FieldCtx& f, const Mat2& x);
Mat2 parse_mat(const FieldCtx& f, std::string_view text);

/// Dense membership set over M_2(F_q).
class MatSet {
 public:
  /// Empty set. Throws std::invalid_argument when q > kMatrixRingMaxQ.
  explicit MatSet(FieldCtx f);

  static MatSet full(const FieldCtx& f);
  static MatSet from_indices(const FieldCtx& f, std::span<const MatIndex> idx);
  static MatSet from_mats(const FieldCtx& f, std::span<const Mat2> mats);

  const FieldCtx& field() const { return f_; }
  std::uint32_t universe() const { return universe_; }
  std::size_t size() const { return count_; }
  bool empty() const { return count_ == 0; }

  bool contains(MatIndex idx) const { return (words_[idx >> 6] >> (idx & 63)) & 1u; }
  bool contains(const Mat2& x) const { return contains(mat_index(f_, x)); }
  void insert(MatIndex idx);
  void insert(const Mat2& x) { insert(mat_index(f_, x)); }

  /// Sorted member indices.
  std::vector<MatIndex> indices() const;
  std::vector<Mat2> mats() const;

  const std::vector<std::uint64_t>& words() const { return words_; }
  /// Replaces contents by a raw bit array of the right length.
  static MatSet from_words(const FieldCtx& f, std::vector<std::uint64_t> words);

  friend bool operator==(const MatSet& a, const MatSet& b) {
    return a.universe_ == b.universe_ && a.words_ == b.words_;
  }

 private:
  FieldCtx f_;
  std::uint32_t universe_ = 0;
  std::size_t count_ = 0;
  std::vector<std::uint64_t> words_;
};

/// Coordinates of each member, in index order, for tight enumeration loops.
std::vector<std::array<std::uint16_t, 4>> member_coords(const MatSet& s);

/// Throws std::invalid_argument if the two sets live over different fields.
void require_same_field(const MatSet& a, const MatSet& b);

/// D_i = {x : det x = i}, by scanning the whole ring.
MatSet variety(const FieldCtx& f, FqElem i, unsigned threads = 1);
/// {x + y : x in A, y in B}.
MatSet sumset(const MatSet& a, const MatSet& b, unsigned threads = 1);
/// k-fold sumset kE, k >= 1.
MatSet iterate_sumset(const MatSet& e, unsigned k, unsigned threads = 1);
/// Sorted image of det over S.
std::vector<FqElem> det_set(const MatSet& s);

MatSet negate(const MatSet& s);
MatSet scale_set(const MatSet& s, FqElem c);
MatSet set_union(const MatSet& a, const MatSet& b);
MatSet set_intersect(const MatSet& a, const MatSet& b);
MatSet complement(const MatSet& s);

}  // namespace detsum
