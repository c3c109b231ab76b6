// Character sums over F_q and Fourier transforms on M_2(F_q), all exact in Z[zeta_p].
//
// chi(t) = zeta_p^{Tr(t)} is the canonical additive character and eta the
// quadratic character. Two transforms are provided:
//   dot:  N(m) = sum_x chi(-m.x) f(x)      (normalized value N(m) / q^4)
//   odot: N(y) = sum_m chi(-y (.) m) f(m)  (unnormalized, k = 0)

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "detsum/cyclotomic.hpp"
#include "detsum/field.hpp"
#include "detsum/matrix_ring.hpp"

namespace detsum {

/// chi(t) as zeta_p^{Tr t}.
CycInt add_char(const FieldCtx& f, FqElem t);

/// G_a = sum_{t != 0} eta(t) chi(a t). Throws std::invalid_argument for a == 0.
CycInt gauss_sum(const FieldCtx& f, FqElem a);

/// sum_{t != 0} chi(a t + b / t), or with an eta(t) twist. The untwisted sum
/// requires a, b != 0.
CycInt kloosterman(const FieldCtx& f, FqElem a, FqElem b, bool twisted);

/// Checks sum_{s != 0} chi(a s^2 + b s) == eta(a) G_1 chi(b^2 / (-4a)) - 1 and the
/// completed sum over all of F_q, exactly. Requires a != 0.
bool complete_square_check(const FieldCtx& f, FqElem a, FqElem b);

/// Checks sum_{s != 0} eta(a s) chi(b s) == sum_{s != 0} eta(a / s) chi(b s) == eta(ab) G_1
/// for a, b != 0.
bool twisted_gauss_check(const FieldCtx& f, FqElem a, FqElem b);

enum class Flavor { dot, odot };

const char* flavor_name(Flavor fl);

/// Transform of a function on M_2(F_q), one Z[zeta_p] entry per matrix index.
/// Entries are unnormalized; the represented value is entry / q^k.
class TransformTable {
 public:
  TransformTable(FieldCtx f, Flavor flavor, unsigned k);

  const FieldCtx& field() const { return f_; }
  Flavor flavor() const { return flavor_; }
  unsigned k() const { return k_; }
  std::uint32_t size() const { return size_; }

  CycInt at(MatIndex m) const;
  std::span<const std::int64_t> raw(MatIndex m) const {
    return {data_.data() + std::size_t{m} * f_.p(), f_.p()};
  }
  std::span<std::int64_t> raw_mut(MatIndex m) {
    return {data_.data() + std::size_t{m} * f_.p(), f_.p()};
  }

  /// sum_m N(m) conj(N(m)); an integer for every real-valued input.
  CycInt mass() const;

 private:
  FieldCtx f_;
  Flavor flavor_;
  unsigned k_;
  std::uint32_t size_;
  std::vector<std::int64_t> data_;  // size * p exponent counts, not canonicalized
};

/// Transform of the indicator of `s`.
TransformTable fourier(const MatSet& s, Flavor flavor, unsigned threads = 1);
/// Transform of an integer-valued map given on all q^4 indices.
TransformTable fourier(const FieldCtx& f, std::span<const std::int64_t> values, Flavor flavor,
                       unsigned threads = 1);
/// One entry of the transform of an indicator, computed directly.
CycInt fourier_at(const MatSet& s, const Mat2& m, Flavor flavor);

/// Closed form of sum_{x in D_i} chi(-x (.) y) for i != 0:
/// q^3 [y == 0] + q sum_{r != 0} chi(-i r - det(y) / r).
CycInt tilde_variety_closed(const FieldCtx& f, FqElem i, const Mat2& y);

/// Closed form of the normalized dot transform of D_t at m, as num / q^3:
/// num = q^2 [m == 0] + sum_{s != 0} chi(-s t - det(m) / s).
ScaledCyc hat_variety_closed(const FieldCtx& f, FqElem t, const Mat2& m);

/// The three proof sums, each evaluated by its literal definition.
struct AuditorSums {
  CycInt coincidence;  // I(l): s'y' == s y, weighted by chi(l (s' - s))
  CycInt singular;     // A(l): det(s'y' - s y) == 0, weighted by chi(-i r) chi(l (s' - s))
  CycInt kloosterman;  // B(i): det(y' - y) != 0, chi(-i r - s^2 det(y' - y) / r)
};

/// Common determinant of every member of F; throws if F is empty or mixed.
FqElem common_det(const MatSet& s);

CycInt audit_coincidence(const MatSet& F, FqElem l);
CycInt audit_singular(const MatSet& F, FqElem i, FqElem l);
CycInt audit_kloosterman(const MatSet& F, FqElem i);

/// Requires F inside a single D_j with j != 0, and i != 0.
AuditorSums proof_sum_auditors(const MatSet& F, FqElem i, FqElem l);

}  // namespace detsum
