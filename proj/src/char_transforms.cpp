#include "detsum/char_transforms.hpp"

#include <stdexcept>

#include "detsum/parallel.hpp"

namespace detsum {

namespace {

// Accumulates sum_k counts[k] zeta^k.
class CharAccumulator {
 public:
  explicit CharAccumulator(std::uint32_t p) : p_(p), counts_(p, 0) {}
  void add(std::uint32_t exponent, std::int64_t weight = 1) {
    counts_[exponent] = checked::add(counts_[exponent], weight);
  }
  void add_chi(const FieldCtx& f, FqElem t, std::int64_t weight = 1) { add(f.trace(t), weight); }
  CycInt value() const { return CycInt::from_exponent_counts(p_, counts_); }

 private:
  std::uint32_t p_;
  std::vector<std::int64_t> counts_;
};

void require_nonzero(FqElem a, const char* what) {
  if (a.value == 0) throw std::invalid_argument(std::string(what) + " must be nonzero");
}

}  // namespace

CycInt add_char(const FieldCtx& f, FqElem t) { return CycInt::zeta_pow(f.p(), f.trace(t)); }

CycInt gauss_sum(const FieldCtx& f, FqElem a) {
  require_nonzero(a, "Gauss sum parameter a");
  CharAccumulator acc(f.p());
  for (std::uint32_t t = 1; t < f.q(); ++t) {
    const FqElem te{t};
    acc.add_chi(f, f.mul(a, te), f.quad(te));
  }
  return acc.value();
}

CycInt kloosterman(const FieldCtx& f, FqElem a, FqElem b, bool twisted) {
  if (!twisted) {
    require_nonzero(a, "Kloosterman parameter a");
    require_nonzero(b, "Kloosterman parameter b");
  }
  CharAccumulator acc(f.p());
  for (std::uint32_t t = 1; t < f.q(); ++t) {
    const FqElem te{t};
    const FqElem arg = f.add(f.mul(a, te), f.mul(b, f.inv(te)));
    acc.add_chi(f, arg, twisted ? f.quad(te) : 1);
  }
  return acc.value();
}

bool complete_square_check(const FieldCtx& f, FqElem a, FqElem b) {
  require_nonzero(a, "quadratic coefficient a");
  CharAccumulator punctured(f.p()), completed(f.p());
  for (std::uint32_t s = 0; s < f.q(); ++s) {
    const FqElem se{s};
    const FqElem arg = f.add(f.mul(a, f.mul(se, se)), f.mul(b, se));
    completed.add_chi(f, arg);
    if (s != 0) punctured.add_chi(f, arg);
  }
  const FqElem minus_four_a = f.neg(f.mul(f.from_int(4), a));
  const CycInt main = gauss_sum(f, f.one()).scale(f.quad(a)) * add_char(f, f.div(f.mul(b, b), minus_four_a));
  return punctured.value() == main - CycInt(f.p(), 1) && completed.value() == main;
}

bool twisted_gauss_check(const FieldCtx& f, FqElem a, FqElem b) {
  require_nonzero(a, "a");
  require_nonzero(b, "b");
  CharAccumulator direct(f.p()), inverted(f.p());
  for (std::uint32_t s = 1; s < f.q(); ++s) {
    const FqElem se{s};
    direct.add_chi(f, f.mul(b, se), f.quad(f.mul(a, se)));
    inverted.add_chi(f, f.mul(b, se), f.quad(f.mul(a, f.inv(se))));
  }
  const CycInt expected = gauss_sum(f, f.one()).scale(f.quad(f.mul(a, b)));
  return direct.value() == expected && inverted.value() == expected;
}

const char* flavor_name(Flavor fl) { return fl == Flavor::dot ? "dot" : "odot"; }

TransformTable::TransformTable(FieldCtx f, Flavor flavor, unsigned k)
    : f_(std::move(f)), flavor_(flavor), k_(k) {
  const std::uint32_t q = f_.q();
  if (q > kMatrixRingMaxQ) throw std::invalid_argument("transform tables need q <= 64");
  size_ = q * q * q * q;
  data_.assign(std::size_t{size_} * f_.p(), 0);
}

CycInt TransformTable::at(MatIndex m) const {
  if (m >= size_) throw std::out_of_range("transform index out of range");
  return CycInt::from_exponent_counts(f_.p(), raw(m));
}

CycInt TransformTable::mass() const {
  CycInt total(f_.p());
  for (MatIndex m = 0; m < size_; ++m) total += at(m).norm_sq();
  return total;
}

namespace {

// Exponent of chi(-m.x) (dot) or chi(-m (.) x) (odot) for coordinate tuples.
template <class Coords>
std::uint32_t pairing_exponent(const FieldCtx& f, Flavor fl, const Coords& m, const Coords& x) {
  const std::uint32_t p = f.p();
  std::uint32_t pos = 0, negs = 0;
  if (fl == Flavor::dot) {
    pos = f.trace_mul(FqElem{m[0]}, FqElem{x[0]}) + f.trace_mul(FqElem{m[1]}, FqElem{x[1]}) +
          f.trace_mul(FqElem{m[2]}, FqElem{x[2]}) + f.trace_mul(FqElem{m[3]}, FqElem{x[3]});
  } else {
    pos = f.trace_mul(FqElem{m[0]}, FqElem{x[3]}) + f.trace_mul(FqElem{m[3]}, FqElem{x[0]});
    negs = f.trace_mul(FqElem{m[1]}, FqElem{x[2]}) + f.trace_mul(FqElem{m[2]}, FqElem{x[1]});
  }
  // -(pos - negs) mod p
  return (negs % p + p - pos % p) % p;
}

std::array<std::uint32_t, 4> coords_of(std::uint32_t q, MatIndex k) {
  std::array<std::uint32_t, 4> c{};
  for (auto& v : c) {
    v = k % q;
    k /= q;
  }
  return c;
}

TransformTable transform_impl(const FieldCtx& f, const std::vector<std::array<std::uint32_t, 4>>& support,
                              const std::vector<std::int64_t>& weights, Flavor flavor, unsigned threads) {
  TransformTable table(f, flavor, flavor == Flavor::dot ? 4 : 0);
  const std::uint32_t q = f.q();
  parallel_for(table.size(), threads, [&](std::size_t begin, std::size_t end, unsigned) {
    for (std::size_t m = begin; m < end; ++m) {
      const auto mc = coords_of(q, static_cast<MatIndex>(m));
      auto counts = table.raw_mut(static_cast<MatIndex>(m));
      for (std::size_t u = 0; u < support.size(); ++u) {
        counts[pairing_exponent(f, flavor, mc, support[u])] += weights[u];
      }
    }
  });
  return table;
}

}  // namespace

TransformTable fourier(const MatSet& s, Flavor flavor, unsigned threads) {
  const FieldCtx& f = s.field();
  std::vector<std::array<std::uint32_t, 4>> support;
  for (auto k : s.indices()) support.push_back(coords_of(f.q(), k));
  return transform_impl(f, support, std::vector<std::int64_t>(support.size(), 1), flavor, threads);
}

TransformTable fourier(const FieldCtx& f, std::span<const std::int64_t> values, Flavor flavor,
                       unsigned threads) {
  const std::uint32_t q = f.q();
  const std::uint64_t universe = std::uint64_t{q} * q * q * q;
  if (values.size() != universe) throw std::invalid_argument("function must be given on all q^4 matrices");
  std::vector<std::array<std::uint32_t, 4>> support;
  std::vector<std::int64_t> weights;
  for (std::uint64_t k = 0; k < universe; ++k) {
    if (values[k] == 0) continue;
    support.push_back(coords_of(q, static_cast<MatIndex>(k)));
    weights.push_back(values[k]);
  }
  return transform_impl(f, support, weights, flavor, threads);
}

CycInt fourier_at(const MatSet& s, const Mat2& m, Flavor flavor) {
  const FieldCtx& f = s.field();
  const std::array<std::uint32_t, 4> mc{m.x1.value, m.x2.value, m.x3.value, m.x4.value};
  CharAccumulator acc(f.p());
  for (auto k : s.indices()) acc.add(pairing_exponent(f, flavor, mc, coords_of(f.q(), k)));
  return acc.value();
}

CycInt tilde_variety_closed(const FieldCtx& f, FqElem i, const Mat2& y) {
  require_nonzero(i, "variety level i");
  const FqElem dy = det(f, y);
  CharAccumulator acc(f.p());
  for (std::uint32_t r = 1; r < f.q(); ++r) {
    const FqElem re{r};
    acc.add_chi(f, f.sub(f.neg(f.mul(i, re)), f.div(dy, re)));
  }
  const std::int64_t q = f.q();
  CycInt out = acc.value().scale(q);
  if (y == Mat2{}) out += CycInt(f.p(), q * q * q);
  return out;
}

ScaledCyc hat_variety_closed(const FieldCtx& f, FqElem t, const Mat2& m) {
  const FqElem dm = det(f, m);
  CharAccumulator acc(f.p());
  for (std::uint32_t s = 1; s < f.q(); ++s) {
    const FqElem se{s};
    acc.add_chi(f, f.sub(f.neg(f.mul(se, t)), f.div(dm, se)));
  }
  CycInt num = acc.value();
  const std::int64_t q = f.q();
  if (m == Mat2{}) num += CycInt(f.p(), q * q);
  return {num, 3};
}

FqElem common_det(const MatSet& s) {
  const FieldCtx& f = s.field();
  const auto members = s.mats();
  if (members.empty()) throw std::invalid_argument("empty set has no common determinant");
  const FqElem d = det(f, members.front());
  for (const auto& x : members) {
    if (det(f, x) != d) throw std::invalid_argument("set is not contained in a single variety D_j");
  }
  return d;
}

namespace {

void require_in_nonzero_variety(const MatSet& F) {
  if (F.empty()) return;
  if (common_det(F).value == 0) throw std::invalid_argument("set must lie in D_j with j != 0");
}

}  // namespace

CycInt audit_coincidence(const MatSet& F, FqElem l) {
  require_in_nonzero_variety(F);
  const FieldCtx& f = F.field();
  const auto ys = F.mats();
  CharAccumulator acc(f.p());
  for (const auto& y : ys) {
    for (const auto& y2 : ys) {
      for (std::uint32_t s = 1; s < f.q(); ++s) {
        const Mat2 sy = mat_scale(f, FqElem{s}, y);
        for (std::uint32_t s2 = 1; s2 < f.q(); ++s2) {
          if (mat_scale(f, FqElem{s2}, y2) != sy) continue;
          acc.add_chi(f, f.mul(l, f.sub(FqElem{s2}, FqElem{s})));
        }
      }
    }
  }
  return acc.value();
}

CycInt audit_singular(const MatSet& F, FqElem i, FqElem l) {
  require_nonzero(i, "i");
  require_in_nonzero_variety(F);
  const FieldCtx& f = F.field();
  const auto ys = F.mats();
  CharAccumulator acc(f.p());
  for (const auto& y : ys) {
    for (const auto& y2 : ys) {
      for (std::uint32_t s = 1; s < f.q(); ++s) {
        const Mat2 sy = mat_scale(f, FqElem{s}, y);
        for (std::uint32_t s2 = 1; s2 < f.q(); ++s2) {
          const Mat2 diff = mat_sub(f, mat_scale(f, FqElem{s2}, y2), sy);
          if (det(f, diff).value != 0) continue;
          const FqElem shift = f.mul(l, f.sub(FqElem{s2}, FqElem{s}));
          for (std::uint32_t r = 1; r < f.q(); ++r) {
            acc.add_chi(f, f.sub(shift, f.mul(i, FqElem{r})));
          }
        }
      }
    }
  }
  return acc.value();
}

CycInt audit_kloosterman(const MatSet& F, FqElem i) {
  require_nonzero(i, "i");
  const FieldCtx& f = F.field();
  const auto ys = F.mats();
  CharAccumulator acc(f.p());
  for (const auto& y : ys) {
    for (const auto& y2 : ys) {
      const FqElem d = det(f, mat_sub(f, y2, y));
      if (d.value == 0) continue;
      for (std::uint32_t r = 1; r < f.q(); ++r) {
        const FqElem re{r};
        for (std::uint32_t s = 1; s < f.q(); ++s) {
          const FqElem se{s};
          const FqElem arg = f.sub(f.neg(f.mul(i, re)), f.div(f.mul(f.mul(se, se), d), re));
          acc.add_chi(f, arg);
        }
      }
    }
  }
  return acc.value();
}

AuditorSums proof_sum_auditors(const MatSet& F, FqElem i, FqElem l) {
  return {audit_coincidence(F, l), audit_singular(F, i, l), audit_kloosterman(F, i)};
}

}  // namespace detsum
