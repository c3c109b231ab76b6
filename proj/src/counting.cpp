#include "detsum/counting.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <string>

#include "detsum/char_transforms.hpp"
#include "detsum/parallel.hpp"

namespace detsum {

namespace {

long double to_ld(i128 v) { return static_cast<long double>(v); }

void require_in_variety(const MatSet& s, FqElem i, const char* name) {
  const FieldCtx& f = s.field();
  if (i.value == 0) throw std::invalid_argument(std::string(name) + " must lie in D_i with i != 0");
  if (s.empty()) return;
  const auto d = uniform_det(s);
  if (!d || *d != i) {
    throw std::invalid_argument(std::string(name) + " is not contained in D_" + f.format(i));
  }
}

std::int64_t total(const std::vector<std::int64_t>& v) {
  std::int64_t s = 0;
  for (auto x : v) s += x;
  return s;
}

double sqrt_d(double v) { return std::sqrt(v); }

RatioRow ratio_row(std::string claim, const FieldCtx& f, const std::string& i, const std::string& j,
                   std::uint64_t e, std::uint64_t fs, std::string key, double lhs, double rhs, bool pass = true) {
  RatioRow row;
  row.claim = std::move(claim);
  row.q = f.q();
  row.i = i;
  row.j = j;
  row.e = e;
  row.f = fs;
  row.key = std::move(key);
  row.lhs = lhs;
  row.rhs = rhs;
  row.ratio = rhs == 0 ? (lhs == 0 ? 0.0 : INFINITY) : lhs / rhs;
  row.pass = pass;
  return row;
}

Report base_report(const char* experiment, const FieldCtx& f) {
  Report r;
  r.experiment = experiment;
  r.field = f.descriptor();
  return r;
}

}  // namespace

bool le_sqrt(i128 a, i128 b) {
  if (a <= 0) return true;
  if (b < 0) return false;
  if (a >= (i128{1} << 64)) return false;  // a^2 >= 2^128 > b
  const auto ua = static_cast<u128>(a);
  return ua * ua <= static_cast<u128>(b);
}

std::int64_t CountProfile::max_n() const { return n.empty() ? 0 : *std::max_element(n.begin(), n.end()); }

std::int64_t CountProfile::max_w() const { return w.empty() ? 0 : *std::max_element(w.begin(), w.end()); }

std::int64_t CountProfile::r_numerator(FqElem l) const {
  return static_cast<std::int64_t>(field.q()) * w.at(l.value) - static_cast<std::int64_t>(pairs());
}

std::optional<FqElem> uniform_det(const MatSet& s) {
  const FieldCtx& f = s.field();
  std::optional<FqElem> d;
  for (const auto& x : s.mats()) {
    const FqElem v = det(f, x);
    if (!d) {
      d = v;
    } else if (*d != v) {
      return std::nullopt;
    }
  }
  return d;
}

CountProfile count_profile(const MatSet& e, const MatSet& f, unsigned threads, CountOptions opts) {
  require_same_field(e, f);
  const FieldCtx& ctx = e.field();
  const std::uint64_t pairs = std::uint64_t{e.size()} * f.size();
  if (pairs > kPairCap) {
    throw SizingError("enumeration of " + std::to_string(pairs) + " pairs exceeds the cap of " +
                      std::to_string(kPairCap));
  }
  const std::uint32_t q = ctx.q();
  CountProfile prof{.field = ctx};
  prof.e_size = e.size();
  prof.f_size = f.size();
  prof.n.assign(q, 0);
  if (opts.odot) prof.w.assign(q, 0);
  prof.det_e = uniform_det(e);
  prof.det_f = uniform_det(f);

  const std::uint16_t* add = ctx.dense_add();
  const std::uint16_t* mul = ctx.dense_mul();
  const std::uint32_t* neg = ctx.neg_table();
  if (add == nullptr || mul == nullptr) throw std::logic_error("pair counting needs dense field tables");

  const auto ec = member_coords(e);
  const auto fc = member_coords(f);
  const unsigned workers = worker_count(ec.size(), threads);
  std::vector<std::vector<std::int64_t>> n_part(workers, std::vector<std::int64_t>(q, 0));
  std::vector<std::vector<std::int64_t>> w_part(workers, std::vector<std::int64_t>(opts.odot ? q : 0, 0));
  std::vector<std::atomic<std::uint32_t>> sums(opts.energy ? e.universe() : 0);

  parallel_for(ec.size(), workers, [&](std::size_t begin, std::size_t end, unsigned wk) {
    auto& nt = n_part[wk];
    auto& wl = w_part[wk];
    for (std::size_t u = begin; u < end; ++u) {
      const auto& x = ec[u];
      const std::uint16_t* ax0 = add + x[0] * q;
      const std::uint16_t* ax1 = add + x[1] * q;
      const std::uint16_t* ax2 = add + x[2] * q;
      const std::uint16_t* ax3 = add + x[3] * q;
      for (const auto& y : fc) {
        const std::uint32_t s0 = ax0[y[0]], s1 = ax1[y[1]], s2 = ax2[y[2]], s3 = ax3[y[3]];
        ++nt[add[mul[s0 * q + s3] * q + neg[mul[s1 * q + s2]]]];
        if (opts.odot) {
          const std::uint32_t a = add[mul[x[0] * q + y[3]] * q + mul[x[3] * q + y[0]]];
          const std::uint32_t b = add[mul[x[1] * q + y[2]] * q + mul[x[2] * q + y[1]]];
          ++wl[add[a * q + neg[b]]];
        }
        if (opts.energy) {
          sums[s0 + q * (s1 + q * (s2 + q * s3))].fetch_add(1, std::memory_order_relaxed);
        }
      }
    }
  });

  for (unsigned wk = 0; wk < workers; ++wk) {
    for (std::uint32_t t = 0; t < q; ++t) {
      prof.n[t] += n_part[wk][t];
      if (opts.odot) prof.w[t] += w_part[wk][t];
    }
  }
  if (opts.energy) {
    prof.has_energy = true;
    for (const auto& c : sums) {
      const std::uint64_t v = c.load(std::memory_order_relaxed);
      prof.energy += v * v;
      if (v != 0) ++prof.sumset_size;
    }
  }
  return prof;
}

Report check_mainthm_bound(const MatSet& e, const MatSet& f, FqElem i, FqElem j, unsigned threads) {
  require_same_field(e, f);
  require_in_variety(e, i, "E");
  require_in_variety(f, j, "F");
  const FieldCtx& ctx = e.field();
  const auto prof = count_profile(e, f, threads, {.odot = false, .energy = false});
  Report r = base_report("mainthm-bound", ctx);

  const i128 q = ctx.q(), es = prof.e_size, fs = prof.f_size, ef = es * fs;
  // q^2 B^2 = q^2 (18 q^2 ef + 11 e f^2) + 4 sqrt7 q^3 e f^{3/2}
  const i128 rational = q * q * (18 * q * q * ef + 11 * es * fs * fs);
  const i128 irr_sq = 112 * q * q * q * q * q * q * es * es * fs * fs * fs;
  const double bound = sqrt_d(static_cast<double>(18 * q * q * ef + 11 * es * fs * fs) +
                              4.0 * std::sqrt(7.0) * static_cast<double>(q) * static_cast<double>(es) *
                                  std::pow(static_cast<double>(fs), 1.5));
  const std::string is = ctx.format(i), js = ctx.format(j);
  bool all = true;
  double worst = 0;
  for (std::uint32_t t = 0; t < ctx.q(); ++t) {
    const i128 dev = q * prof.n[t] - ef;
    const i128 excess = dev * dev - rational;
    const bool ok = le_sqrt(excess, irr_sq);
    all = all && ok;
    const double lhs = std::fabs(to_ld(dev) / static_cast<long double>(q));
    worst = std::max(worst, lhs);
    r.add_row(ratio_row("deviation-bound", ctx, is, js, prof.e_size, prof.f_size, ctx.format(FqElem{t}), lhs,
                        bound, ok));
  }
  r.check("deviation-bound", num(worst), num(bound), all,
          "max_t |N_t - |E||F|/q| against sqrt(18q^2|E||F| + 11|E||F|^2 + 4 sqrt7 q|E||F|^1.5), |E|=" +
              std::to_string(prof.e_size) + " |F|=" + std::to_string(prof.f_size));
  return r;
}

Report check_main1(const MatSet& e, const MatSet& f, FqElem i, FqElem j, unsigned threads) {
  require_same_field(e, f);
  require_in_variety(e, i, "E");
  require_in_variety(f, j, "F");
  const FieldCtx& ctx = e.field();
  const auto prof = count_profile(e, f, threads, {.odot = false, .energy = false});
  Report r = base_report("main1", ctx);
  const i128 q = ctx.q();
  const bool hypothesis = i128{prof.e_size} * prof.f_size >= 225 * q * q * q * q;
  std::vector<std::string> missing;
  for (std::uint32_t t = 0; t < ctx.q(); ++t) {
    if (prof.n[t] == 0) missing.push_back(ctx.format(FqElem{t}));
  }
  const auto attained = static_cast<std::int64_t>(ctx.q() - missing.size());
  std::string miss_text;
  for (const auto& m : missing) miss_text += (miss_text.empty() ? "" : " ") + m;
  const std::string detail = "|E|=" + std::to_string(prof.e_size) + " |F|=" + std::to_string(prof.f_size) +
                             (missing.empty() ? "" : ", missing: " + miss_text);
  if (hypothesis) {
    r.check("det-full", attained, ctx.q(), missing.empty(), detail);
  } else {
    r.flags.push_back("det-full: |E||F| < 225 q^4, coverage recorded only (" + std::to_string(attained) + "/" +
                      std::to_string(ctx.q()) + " values" + (missing.empty() ? "" : ", missing: " + miss_text) +
                      ")");
  }
  r.add_row(ratio_row("det-coverage", ctx, ctx.format(i), ctx.format(j), prof.e_size, prof.f_size,
                      hypothesis ? "threshold-met" : "below-threshold", static_cast<double>(attained), ctx.q(),
                      !hypothesis || missing.empty()));
  return r;
}

Report check_w0_bound(const MatSet& e, const MatSet& f, unsigned threads) {
  require_same_field(e, f);
  const FieldCtx& ctx = e.field();
  const auto prof = count_profile(e, f, threads, {.odot = true, .energy = false});
  Report r = base_report("w0", ctx);
  const i128 q = ctx.q(), ef = i128{prof.e_size} * prof.f_size;
  const i128 excess = q * prof.w[0] - ef;
  const bool ok = le_sqrt(excess, 2 * q * q * q * q * q * q * ef);
  const double rhs = static_cast<double>(ef) / ctx.q() +
                     std::sqrt(2.0) * ctx.q() * ctx.q() * std::sqrt(static_cast<double>(ef));
  r.check("w0-bound", prof.w[0], num(rhs), ok,
          "W_0 against |E||F|/q + sqrt2 q^2 sqrt(|E||F|), |E|=" + std::to_string(prof.e_size) +
              " |F|=" + std::to_string(prof.f_size));
  return r;
}

Report energy_and_sumset_report(const MatSet& e, const MatSet& f, FqElem i, FqElem j, unsigned threads) {
  require_same_field(e, f);
  require_in_variety(e, i, "E");
  require_in_variety(f, j, "F");
  const FieldCtx& ctx = e.field();
  const auto prof = count_profile(e, f, threads, {.odot = true, .energy = true});
  Report r = base_report("energy-report", ctx);
  const std::int64_t ef = static_cast<std::int64_t>(prof.pairs());
  const std::string sizes = "|E|=" + std::to_string(prof.e_size) + " |F|=" + std::to_string(prof.f_size);

  r.check("sum-N", total(prof.n), ef, total(prof.n) == ef, sizes);
  r.check("sum-W", total(prof.w), ef, total(prof.w) == ef, sizes);
  std::int64_t shift_bad = 0;
  const FqElem ij = ctx.add(i, j);
  for (std::uint32_t l = 0; l < ctx.q(); ++l) {
    if (prof.n[ctx.add(FqElem{l}, ij).value] != prof.w[l]) ++shift_bad;
  }
  r.check("shift-identity", shift_bad, 0, shift_bad == 0, "count of l with N_{l+i+j} != W_l, " + sizes);

  const i128 lhs = i128{prof.sumset_size} * prof.energy;
  const i128 rhs = i128{ef} * ef;
  r.check("cauchy-schwarz", num(static_cast<double>(lhs)), num(static_cast<double>(rhs)), lhs >= rhs,
          "|E+F| Lambda >= |E|^2|F|^2 with |E+F|=" + std::to_string(prof.sumset_size) +
              " Lambda=" + std::to_string(prof.energy) + ", " + sizes);

  if (prof.e_size == 0 || prof.f_size == 0) return r;
  const double q = ctx.q(), es = prof.e_size, fs = prof.f_size;
  const std::string is = ctx.format(i), js = ctx.format(j);
  auto row = [&](const char* claim, double l, double rr) {
    r.add_row(ratio_row(claim, ctx, is, js, prof.e_size, prof.f_size, "", l, rr));
  };
  row("energy-upper", static_cast<double>(prof.energy),
      es * es * fs / q + q * es * fs + q * std::pow(es, 1.5) * std::sqrt(fs));
  const double pair_rhs = es * fs / q + q * std::sqrt(es * fs);
  row("max-N", static_cast<double>(prof.max_n()), pair_rhs);
  row("max-W", static_cast<double>(prof.max_w()), pair_rhs);
  row("sumset-lower-3", static_cast<double>(prof.sumset_size),
      std::min({q * fs, es * fs / q, std::sqrt(es) * std::pow(fs, 1.5) / q}));
  const double big = std::max(es, fs);
  row("sumset-lower-2", static_cast<double>(prof.sumset_size), std::min(q * big, es * fs / q));
  return r;
}

Report check_cauchy_schwarz(const MatSet& e, const MatSet& f, unsigned threads) {
  require_same_field(e, f);
  const auto prof = count_profile(e, f, threads, {.odot = false, .energy = true});
  Report r = base_report("cauchy-schwarz", e.field());
  const i128 lhs = i128{prof.sumset_size} * prof.energy;
  const i128 rhs = i128{prof.pairs()} * prof.pairs();
  r.check("cauchy-schwarz", num(static_cast<double>(lhs)), num(static_cast<double>(rhs)), lhs >= rhs,
          "|E+F| Lambda >= |E|^2|F|^2 with |E+F|=" + std::to_string(prof.sumset_size) +
              " Lambda=" + std::to_string(prof.energy) + ", |E|=" + std::to_string(prof.e_size) +
              " |F|=" + std::to_string(prof.f_size));
  return r;
}

namespace {

std::vector<CycInt> conj_products(const MatSet& e, const MatSet& f, unsigned threads) {
  require_same_field(e, f);
  const auto te = fourier(e, Flavor::dot, threads);
  const auto tf = fourier(f, Flavor::dot, threads);
  std::vector<CycInt> out;
  out.reserve(te.size());
  for (MatIndex m = 0; m < te.size(); ++m) out.push_back(te.at(m).conj() * tf.at(m).conj());
  return out;
}

std::int64_t spectral_from(const FieldCtx& ctx, const std::vector<CycInt>& prod, FqElem t, unsigned threads) {
  const auto td = fourier(variety(ctx, t, threads), Flavor::dot, threads);
  CycInt acc(ctx.p());
  for (MatIndex m = 0; m < td.size(); ++m) acc += td.at(m) * prod[m];
  const std::int64_t q4 = std::int64_t{ctx.q()} * ctx.q() * ctx.q() * ctx.q();
  const std::int64_t total_sum = acc.as_integer();
  if (total_sum % q4 != 0) throw std::logic_error("spectral sum not divisible by q^4");
  return total_sum / q4;
}

}  // namespace

std::int64_t spectral_count(const MatSet& e, const MatSet& f, FqElem t, unsigned threads) {
  return spectral_from(e.field(), conj_products(e, f, threads), t, threads);
}

std::vector<std::int64_t> spectral_counts(const MatSet& e, const MatSet& f, unsigned threads) {
  const auto prod = conj_products(e, f, threads);
  std::vector<std::int64_t> out;
  for (std::uint32_t t = 0; t < e.field().q(); ++t) {
    out.push_back(spectral_from(e.field(), prod, FqElem{t}, threads));
  }
  return out;
}

Report check_prop71(const MatSet& e, const MatSet& f, unsigned threads) {
  require_same_field(e, f);
  const FieldCtx& ctx = e.field();
  const auto prof = count_profile(e, f, threads, {.odot = false, .energy = false});
  Report r = base_report("prop71", ctx);
  const i128 q = ctx.q(), ef = i128{prof.e_size} * prof.f_size;
  const i128 q5 = q * q * q * q * q;
  const double bound = 2.0 * std::pow(static_cast<double>(q), 1.5) * std::sqrt(static_cast<double>(ef));
  bool all = true;
  double worst = 0;
  std::vector<std::string> missing;
  for (std::uint32_t t = 1; t < ctx.q(); ++t) {
    const i128 dev = q * prof.n[t] - ef;
    const bool ok = le_sqrt(dev < 0 ? -dev : dev, 4 * q5 * ef);
    all = all && ok;
    const double lhs = std::fabs(to_ld(dev) / static_cast<long double>(q));
    worst = std::max(worst, lhs);
    if (prof.n[t] == 0) missing.push_back(ctx.format(FqElem{t}));
    r.add_row(ratio_row("units-deviation", ctx, "", "", prof.e_size, prof.f_size, ctx.format(FqElem{t}), lhs, bound,
                        ok));
  }
  const std::string sizes = "|E|=" + std::to_string(prof.e_size) + " |F|=" + std::to_string(prof.f_size);
  r.check("units-deviation", num(worst), num(bound), all,
          "max_{t != 0} |N_t - |E||F|/q| against 2 q^1.5 sqrt(|E||F|), " + sizes);
  const auto attained = static_cast<std::int64_t>(ctx.q() - 1 - missing.size());
  if (ef > 4 * q5) {
    r.check("det-contains-units", attained, ctx.q() - 1, missing.empty(), sizes);
  } else {
    r.flags.push_back("det-contains-units: |E||F| <= 4 q^5, coverage " + std::to_string(attained) + "/" +
                      std::to_string(ctx.q() - 1) + " recorded only");
  }
  return r;
}

Report product_intersection_check(const FieldCtx& f, std::span<const Vec2> s1, std::span<const Vec2> s2,
                                  FqElem i) {
  if (i.value == 0) throw std::invalid_argument("product intersection check needs i != 0");
  const MatSet s = product_set(f, s1, s2);
  std::int64_t c = 0;
  for (const auto& x : s.mats()) {
    if (det(f, x) == i) ++c;
  }
  Report r = base_report("bigcor", f);
  const i128 q = f.q(), size = s.size();
  const i128 dev = q * c - size;
  const bool ok = le_sqrt(dev < 0 ? -dev : dev, q * q * q * size);
  const double lhs = std::fabs(static_cast<double>(c) - static_cast<double>(size) / f.q());
  const double rhs = std::sqrt(static_cast<double>(f.q())) * std::sqrt(static_cast<double>(size));
  r.check("row-product-concentration", num(lhs), num(rhs), ok,
          "||S cap D_i| - |S|/q| with |S1|=" + std::to_string(s1.size()) + " |S2|=" + std::to_string(s2.size()) +
              " |S cap D_i|=" + std::to_string(c));
  r.add_row(ratio_row("row-product-concentration", f, f.format(i), "", s1.size(), s2.size(), "", lhs, rhs, ok));
  return r;
}

}  // namespace detsum
