// Exact pair counts over E x F and the explicit-constant bounds built on them.
//
//   N_t = #{(x, y) : det(x + y) = t}     W_l = #{(x, y) : x (.) y = l}
//   Lambda = #{(x, y, z, w) : x + y = z + w}
//
// Explicit-constant inequalities are decided in exact integer arithmetic after
// clearing denominators and squaring; nothing here compares floats.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "detsum/constructions.hpp"
#include "detsum/field.hpp"
#include "detsum/matrix_ring.hpp"
#include "detsum/report.hpp"

namespace detsum {

__extension__ typedef __int128 i128;
__extension__ typedef unsigned __int128 u128;

/// Upper limit on |E||F| for a single enumeration.
inline constexpr std::uint64_t kPairCap = 100'000'000;

/// A requested enumeration is larger than kPairCap.
class SizingError : public std::length_error {
 public:
  using std::length_error::length_error;
};

struct CountOptions {
  bool odot = true;    // fill W
  bool energy = true;  // fill Lambda and |E + F|
};

struct CountProfile {
  FieldCtx field;
  std::uint64_t e_size = 0;
  std::uint64_t f_size = 0;
  std::vector<std::int64_t> n{};  // by field index
  std::vector<std::int64_t> w{};  // empty unless requested
  std::uint64_t energy = 0;
  std::uint64_t sumset_size = 0;
  bool has_energy = false;
  std::optional<FqElem> det_e{};  // set when every member of E has this determinant
  std::optional<FqElem> det_f{};

  std::uint64_t pairs() const { return e_size * f_size; }
  std::int64_t max_n() const;
  /// M = max_l W_l.
  std::int64_t max_w() const;
  /// q R_l = q W_l - |E||F|, so R_l is this over q.
  std::int64_t r_numerator(FqElem l) const;
};

/// Determinant shared by every member, or nullopt (also for the empty set).
std::optional<FqElem> uniform_det(const MatSet& s);

/// Throws SizingError above kPairCap and std::invalid_argument on a field mismatch.
/// Results do not depend on `threads`.
CountProfile count_profile(const MatSet& e, const MatSet& f, unsigned threads = 1,
                           CountOptions opts = {});

/// |N_t - |E||F|/q| <= sqrt(18 q^2 |E||F| + 11 |E||F|^2 + 4 sqrt7 q |E||F|^{3/2}) for every t.
/// Requires E in D_i, F in D_j with i, j != 0 (E may be empty).
Report check_mainthm_bound(const MatSet& e, const MatSet& f, FqElem i, FqElem j, unsigned threads = 1);

/// When |E||F| >= 225 q^4, every t is a determinant of E + F; below the threshold
/// the coverage is recorded without asserting.
Report check_main1(const MatSet& e, const MatSet& f, FqElem i, FqElem j, unsigned threads = 1);

/// W_0 <= |E||F|/q + sqrt2 q^2 |E|^{1/2} |F|^{1/2} for arbitrary E, F.
Report check_w0_bound(const MatSet& e, const MatSet& f, unsigned threads = 1);

/// Exact Lambda and |E + F|; asserts |E+F| Lambda >= |E|^2 |F|^2, the pair totals
/// and N_{l+i+j} = W_l. Bounds with unspecified constants become ratio rows.
Report energy_and_sumset_report(const MatSet& e, const MatSet& f, FqElem i, FqElem j,
                                unsigned threads = 1);

/// |E + F| Lambda >= |E|^2 |F|^2 for arbitrary E, F.
Report check_cauchy_schwarz(const MatSet& e, const MatSet& f, unsigned threads = 1);

/// N_t from q^4 N_t = sum_m T_{D_t}(m) conj T_E(m) conj T_F(m) with dot transforms.
std::int64_t spectral_count(const MatSet& e, const MatSet& f, FqElem t, unsigned threads = 1);
/// spectral_count for every t, sharing the E and F transforms.
std::vector<std::int64_t> spectral_counts(const MatSet& e, const MatSet& f, unsigned threads = 1);

/// For t != 0: |N_t - |E||F|/q| <= 2 q^{3/2} |E|^{1/2} |F|^{1/2}; when |E||F| > 4 q^5
/// every t != 0 is a determinant of E + F.
Report check_prop71(const MatSet& e, const MatSet& f, unsigned threads = 1);

/// S = product_set(s1, s2): ||S cap D_i| - |S|/q| <= q^{1/2} |S|^{1/2}. Requires i != 0.
Report product_intersection_check(const FieldCtx& f, std::span<const Vec2> s1, std::span<const Vec2> s2,
                                  FqElem i);

/// Checks a <= sqrt(b) exactly for integers a and b >= 0.
bool le_sqrt(i128 a, i128 b);

}  // namespace detsum
