#include "detsum/matrix_ring.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

#include "detsum/parallel.hpp"

namespace detsum {

MatIndex mat_index(const FieldCtx& f, const Mat2& x) {
  const std::uint32_t q = f.q();
  return x.x1.value + q * (x.x2.value + q * (x.x3.value + q * x.x4.value));
}

Mat2 mat_from_index(const FieldCtx& f, MatIndex idx) {
  const std::uint32_t q = f.q();
  Mat2 x;
  x.x1 = FqElem{idx % q};
  idx /= q;
  x.x2 = FqElem{idx % q};
  idx /= q;
  x.x3 = FqElem{idx % q};
  idx /= q;
  if (idx >= q) throw std::out_of_range("matrix index out of range");
  x.x4 = FqElem{idx};
  return x;
}

Mat2 mat_identity(const FieldCtx& f) { return {f.one(), f.zero(), f.zero(), f.one()}; }

Mat2 mat_add(const FieldCtx& f, const Mat2& x, const Mat2& y) {
  return {f.add(x.x1, y.x1), f.add(x.x2, y.x2), f.add(x.x3, y.x3), f.add(x.x4, y.x4)};
}

Mat2 mat_sub(const FieldCtx& f, const Mat2& x, const Mat2& y) {
  return {f.sub(x.x1, y.x1), f.sub(x.x2, y.x2), f.sub(x.x3, y.x3), f.sub(x.x4, y.x4)};
}

Mat2 mat_neg(const FieldCtx& f, const Mat2& x) {
  return {f.neg(x.x1), f.neg(x.x2), f.neg(x.x3), f.neg(x.x4)};
}

Mat2 mat_scale(const FieldCtx& f, FqElem c, const Mat2& x) {
  return {f.mul(c, x.x1), f.mul(c, x.x2), f.mul(c, x.x3), f.mul(c, x.x4)};
}

FqElem det(const FieldCtx& f, const Mat2& x) {
  return f.sub(f.mul(x.x1, x.x4), f.mul(x.x2, x.x3));
}

FqElem odot(const FieldCtx& f, const Mat2& x, const Mat2& y) {
  const FqElem plus = f.add(f.mul(x.x1, y.x4), f.mul(x.x4, y.x1));
  const FqElem minus = f.add(f.mul(x.x2, y.x3), f.mul(x.x3, y.x2));
  return f.sub(plus, minus);
}

FqElem dot(const FieldCtx& f, const Mat2& x, const Mat2& y) {
  return f.add(f.add(f.mul(x.x1, y.x1), f.mul(x.x2, y.x2)),
               f.add(f.mul(x.x3, y.x3), f.mul(x.x4, y.x4)));
}

namespace {

std::string format_entry(const FieldCtx& f, FqElem a) {
  return f.n() == 1 ? f.format(a) : "(" + f.format(a) + ")";
}

std::string_view strip(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  return s;
}

// Splits on `sep` at parenthesis depth zero.
std::vector<std::string_view> split_top(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (s[k] == '(') ++depth;
    if (s[k] == ')') --depth;
    if (s[k] == sep && depth == 0) {
      out.push_back(s.substr(start, k - start));
      start = k + 1;
    }
  }
  out.push_back(s.substr(start));
  return out;
}

}  // namespace

std::string format_mat(const FieldCtx& f, const Mat2& x) {
  return "[" + format_entry(f, x.x1) + "," + format_entry(f, x.x2) + ";" + format_entry(f, x.x3) +
         "," + format_entry(f, x.x4) + "]";
}

Mat2 parse_mat(const FieldCtx& f, std::string_view text) {
  const auto bad = [&] { return std::invalid_argument("bad matrix literal '" + std::string(text) + "'"); };
  std::string_view s = strip(text);
  if (s.size() < 2 || s.front() != '[' || s.back() != ']') throw bad();
  s = s.substr(1, s.size() - 2);
  const auto rows = split_top(s, ';');
  if (rows.size() != 2) throw bad();
  std::vector<FqElem> entries;
  for (auto row : rows) {
    const auto cells = split_top(row, ',');
    if (cells.size() != 2) throw bad();
    for (auto cell : cells) {
      cell = strip(cell);
      if (!cell.empty() && cell.front() == '(') {
        if (cell.back() != ')') throw bad();
        cell = cell.substr(1, cell.size() - 2);
      }
      entries.push_back(f.parse(cell));
    }
  }
  return {entries[0], entries[1], entries[2], entries[3]};
}

MatSet::MatSet(FieldCtx f) : f_(std::move(f)) {
  if (f_.q() > kMatrixRingMaxQ) {
    throw std::invalid_argument("matrix sets need q <= " + std::to_string(kMatrixRingMaxQ) +
                                ", got q = " + std::to_string(f_.q()));
  }
  const std::uint32_t q = f_.q();
  universe_ = q * q * q * q;
  words_.assign((universe_ + 63) / 64, 0);
}

MatSet MatSet::full(const FieldCtx& f) {
  MatSet s(f);
  for (MatIndex k = 0; k < s.universe_; ++k) s.words_[k >> 6] |= std::uint64_t{1} << (k & 63);
  s.count_ = s.universe_;
  return s;
}

MatSet MatSet::from_indices(const FieldCtx& f, std::span<const MatIndex> idx) {
  MatSet s(f);
  for (auto k : idx) {
    if (k >= s.universe_) throw std::out_of_range("matrix index out of range");
    s.insert(k);
  }
  return s;
}

MatSet MatSet::from_mats(const FieldCtx& f, std::span<const Mat2> mats) {
  MatSet s(f);
  for (const auto& m : mats) s.insert(m);
  return s;
}

MatSet MatSet::from_words(const FieldCtx& f, std::vector<std::uint64_t> words) {
  MatSet s(f);
  if (words.size() != s.words_.size()) throw std::invalid_argument("bit array length mismatch");
  if (s.universe_ % 64 != 0) {
    words.back() &= (std::uint64_t{1} << (s.universe_ % 64)) - 1;
  }
  s.words_ = std::move(words);
  s.count_ = 0;
  for (auto w : s.words_) s.count_ += static_cast<std::size_t>(std::popcount(w));
  return s;
}

void MatSet::insert(MatIndex idx) {
  auto& w = words_[idx >> 6];
  const std::uint64_t bit = std::uint64_t{1} << (idx & 63);
  if (!(w & bit)) {
    w |= bit;
    ++count_;
  }
}

std::vector<MatIndex> MatSet::indices() const {
  std::vector<MatIndex> out;
  out.reserve(count_);
  for (std::size_t k = 0; k < words_.size(); ++k) {
    std::uint64_t w = words_[k];
    while (w) {
      const int b = std::countr_zero(w);
      out.push_back(static_cast<MatIndex>(k * 64 + static_cast<std::size_t>(b)));
      w &= w - 1;
    }
  }
  return out;
}

std::vector<Mat2> MatSet::mats() const {
  std::vector<Mat2> out;
  out.reserve(count_);
  for (auto k : indices()) out.push_back(mat_from_index(f_, k));
  return out;
}

std::vector<std::array<std::uint16_t, 4>> member_coords(const MatSet& s) {
  const std::uint32_t q = s.field().q();
  std::vector<std::array<std::uint16_t, 4>> out;
  out.reserve(s.size());
  for (auto k : s.indices()) {
    std::array<std::uint16_t, 4> c{};
    for (auto& v : c) {
      v = static_cast<std::uint16_t>(k % q);
      k /= q;
    }
    out.push_back(c);
  }
  return out;
}

void require_same_field(const MatSet& a, const MatSet& b) {
  if (!a.field().same_field(b.field())) {
    throw std::invalid_argument("matrix sets over different fields: " + a.field().descriptor() +
                                " vs " + b.field().descriptor());
  }
}

MatSet variety(const FieldCtx& f, FqElem i, unsigned threads) {
  MatSet probe(f);
  const std::uint32_t universe = probe.universe();
  std::vector<std::uint64_t> words(probe.words().size(), 0);
  // Workers own whole 64-bit words so writes never overlap.
  parallel_for(words.size(), threads, [&](std::size_t wb, std::size_t we, unsigned) {
    for (std::size_t w = wb; w < we; ++w) {
      std::uint64_t bits = 0;
      for (std::uint32_t b = 0; b < 64; ++b) {
        const std::uint64_t k = w * 64 + b;
        if (k >= universe) break;
        if (det(f, mat_from_index(f, static_cast<MatIndex>(k))) == i) bits |= std::uint64_t{1} << b;
      }
      words[w] = bits;
    }
  });
  return MatSet::from_words(f, std::move(words));
}

MatSet sumset(const MatSet& a, const MatSet& b, unsigned threads) {
  require_same_field(a, b);
  const FieldCtx& f = a.field();
  const MatSet& outer = a.size() <= b.size() ? a : b;
  const MatSet& inner = a.size() <= b.size() ? b : a;
  const auto oc = member_coords(outer);
  const auto ic = member_coords(inner);
  const std::uint32_t q = f.q();
  const std::size_t nwords = a.words().size();
  const unsigned workers = worker_count(oc.size(), threads);
  std::vector<std::vector<std::uint64_t>> partial(workers, std::vector<std::uint64_t>(nwords, 0));
  parallel_for(oc.size(), workers, [&](std::size_t begin, std::size_t end, unsigned w) {
    auto& bits = partial[w];
    for (std::size_t u = begin; u < end; ++u) {
      const auto& x = oc[u];
      for (const auto& y : ic) {
        const MatIndex k =
            f.add(FqElem{x[0]}, FqElem{y[0]}).value +
            q * (f.add(FqElem{x[1]}, FqElem{y[1]}).value +
                 q * (f.add(FqElem{x[2]}, FqElem{y[2]}).value + q * f.add(FqElem{x[3]}, FqElem{y[3]}).value));
        bits[k >> 6] |= std::uint64_t{1} << (k & 63);
      }
    }
  });
  std::vector<std::uint64_t> merged(nwords, 0);
  for (const auto& bits : partial) {
    for (std::size_t k = 0; k < nwords; ++k) merged[k] |= bits[k];
  }
  return MatSet::from_words(f, std::move(merged));
}

MatSet iterate_sumset(const MatSet& e, unsigned k, unsigned threads) {
  if (k == 0) throw std::invalid_argument("iterated sumset needs k >= 1");
  MatSet acc = e;
  for (unsigned step = 1; step < k; ++step) acc = sumset(acc, e, threads);
  return acc;
}

std::vector<FqElem> det_set(const MatSet& s) {
  const FieldCtx& f = s.field();
  std::vector<char> seen(f.q(), 0);
  for (auto k : s.indices()) seen[det(f, mat_from_index(f, k)).value] = 1;
  std::vector<FqElem> out;
  for (std::uint32_t v = 0; v < f.q(); ++v) {
    if (seen[v]) out.push_back(FqElem{v});
  }
  return out;
}

MatSet negate(const MatSet& s) {
  const FieldCtx& f = s.field();
  MatSet out(f);
  for (auto k : s.indices()) out.insert(mat_neg(f, mat_from_index(f, k)));
  return out;
}

MatSet scale_set(const MatSet& s, FqElem c) {
  const FieldCtx& f = s.field();
  MatSet out(f);
  for (auto k : s.indices()) out.insert(mat_scale(f, c, mat_from_index(f, k)));
  return out;
}

MatSet set_union(const MatSet& a, const MatSet& b) {
  require_same_field(a, b);
  auto w = a.words();
  for (std::size_t k = 0; k < w.size(); ++k) w[k] |= b.words()[k];
  return MatSet::from_words(a.field(), std::move(w));
}

MatSet set_intersect(const MatSet& a, const MatSet& b) {
  require_same_field(a, b);
  auto w = a.words();
  for (std::size_t k = 0; k < w.size(); ++k) w[k] &= b.words()[k];
  return MatSet::from_words(a.field(), std::move(w));
}

MatSet complement(const MatSet& s) {
  auto w = s.words();
  for (auto& v : w) v = ~v;
  return MatSet::from_words(s.field(), std::move(w));
}

}  // namespace detsum
