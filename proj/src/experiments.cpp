#include "detsum/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <map>
#include <stdexcept>

#include "detsum/char_transforms.hpp"
#include "detsum/constructions.hpp"
#include "detsum/counting.hpp"
#include "detsum/matrix_ring.hpp"

namespace detsum {

namespace {

std::string fmt6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::uint64_t pow_u(std::uint64_t b, unsigned e) {
  std::uint64_t r = 1;
  while (e-- > 0) r *= b;
  return r;
}

struct Ctx {
  const Params& p;
  Report& r;
  std::vector<FieldCtx> fields;
  unsigned trials;
};

std::vector<FieldCtx> resolve_fields(const Params& p, const std::vector<std::string>& defaults) {
  std::vector<FieldCtx> out;
  for (const auto& s : p.q.empty() ? defaults : p.q) out.push_back(FieldCtx::from_order_string(s));
  return out;
}

FqElem elem_or(const FieldCtx& f, const std::optional<std::string>& text, FqElem fallback) {
  return text ? f.parse(*text) : fallback;
}

FqElem random_unit(const FieldCtx& f, SeededRng& rng) {
  return FqElem{static_cast<std::uint32_t>(1 + rng.below(f.q() - 1))};
}

std::size_t random_size(SeededRng& rng, std::size_t lo, std::size_t hi) {
  return lo + static_cast<std::size_t>(rng.below(hi - lo + 1));
}

std::string tag(const FieldCtx& f, const std::string& extra = {}) {
  return "[q=" + std::to_string(f.q()) + (extra.empty() ? "" : " " + extra) + "]";
}

/// Absorbs `sub`, appending `label` to every detail and flag so repeated claims stay identifiable.
void absorb_tagged(Report& into, Report sub, const std::string& label) {
  for (auto& a : sub.assertions) a.detail = a.detail.empty() ? label : a.detail + " " + label;
  for (auto& fl : sub.flags) fl += " " + label;
  into.absorb(sub);
}

class VarietyCache {
 public:
  VarietyCache(const FieldCtx& f, unsigned threads) : f_(f), threads_(threads) {}
  const MatSet& get(FqElem i) {
    auto it = cache_.find(i.value);
    if (it == cache_.end()) it = cache_.emplace(i.value, variety(f_, i, threads_)).first;
    return it->second;
  }

 private:
  FieldCtx f_;
  unsigned threads_;
  std::map<std::uint32_t, MatSet> cache_;
};

std::pair<std::size_t, std::size_t> chosen_sizes(const Params& p, SeededRng& rng, std::size_t max_e,
                                                 std::size_t max_f) {
  if (p.sizes.empty()) return {random_size(rng, 1, max_e), random_size(rng, 1, max_f)};
  return {p.sizes[0], p.sizes.size() > 1 ? p.sizes[1] : p.sizes[0]};
}

std::vector<MatIndex> sample_points(SeededRng& rng, std::uint32_t universe, std::size_t count) {
  std::vector<MatIndex> out{0};
  while (out.size() < count) out.push_back(static_cast<MatIndex>(rng.below(universe)));
  return out;
}

// ---------------------------------------------------------------------------

void identities_for(const FieldCtx& f, const Params& p, unsigned trials, Report& r) {
  const std::uint32_t q = f.q();
  const std::int64_t q4 = std::int64_t{q} * q * q * q;
  const bool exhaustive = q <= 9;
  const std::size_t samples = q <= 9 ? 200 : 50;
  SeededRng rng(derive_seed(p.seed, q, 0x1d));
  const MatSet full = MatSet::full(f);
  const std::string scope = exhaustive ? "exhaustive" : "sampled";

  for (Flavor fl : {Flavor::dot, Flavor::odot}) {
    std::int64_t bad = 0;
    std::size_t checked = 0;
    const auto expected = [&](MatIndex m) { return CycInt(f.p(), m == 0 ? q4 : 0); };
    if (exhaustive) {
      const std::vector<std::int64_t> ones(full.universe(), 1);
      const auto table = fourier(f, ones, fl, p.threads);
      for (MatIndex m = 0; m < table.size(); ++m, ++checked) {
        if (!(table.at(m) == expected(m))) ++bad;
      }
    } else {
      for (auto m : sample_points(rng, full.universe(), 50)) {
        ++checked;
        if (!(fourier_at(full, mat_from_index(f, m), fl) == expected(m))) ++bad;
      }
    }
    r.check(std::string("chi-orthogonality-") + flavor_name(fl), bad, 0, bad == 0,
            scope + ", " + std::to_string(checked) + " entries " + tag(f));
  }

  for (Flavor fl : {Flavor::dot, Flavor::odot}) {
    std::int64_t bad = 0;
    const unsigned sets = exhaustive ? trials : std::min(trials, 3u);
    for (unsigned t = 0; t < sets; ++t) {
      SeededRng local(derive_seed(p.seed, q, 0x100 + t));
      const std::size_t size = random_size(local, 1, std::min<std::size_t>(40, full.size()));
      const MatSet e = random_subset(full, size, local.next());
      const auto table = fourier(e, fl, p.threads);
      if (!(table.mass() == CycInt(f.p(), q4 * static_cast<std::int64_t>(size)))) ++bad;
    }
    r.check(std::string("plancherel-") + flavor_name(fl), bad, 0, bad == 0,
            std::to_string(sets) + " seeded sets, sum |N(m)|^2 = q^4 |E| " + tag(f));
  }

  {
    std::int64_t bad_sq = 0, bad_tw = 0;
    for (std::uint32_t a = 1; a < q; ++a) {
      for (std::uint32_t b = 0; b < q; ++b) {
        if (!complete_square_check(f, FqElem{a}, FqElem{b})) ++bad_sq;
        if (b != 0 && !twisted_gauss_check(f, FqElem{a}, FqElem{b})) ++bad_tw;
      }
    }
    r.check("complete-square", bad_sq, 0, bad_sq == 0, "all a != 0, b " + tag(f));
    r.check("twisted-gauss", bad_tw, 0, bad_tw == 0, "all a, b != 0 " + tag(f));
  }

  {
    std::vector<FqElem> is;
    if (q <= 5) {
      for (std::uint32_t i = 1; i < q; ++i) is.push_back(FqElem{i});
    } else {
      is = {f.one(), f.smallest_nonsquare()};
    }
    std::int64_t bad = 0;
    std::size_t checked = 0;
    for (auto i : is) {
      const MatSet d = variety(f, i, p.threads);
      if (q <= 5) {
        const auto table = fourier(d, Flavor::odot, p.threads);
        for (MatIndex y = 0; y < table.size(); ++y, ++checked) {
          if (!(table.at(y) == tilde_variety_closed(f, i, mat_from_index(f, y)))) ++bad;
        }
      } else {
        for (auto y : sample_points(rng, d.universe(), samples)) {
          ++checked;
          const Mat2 ym = mat_from_index(f, y);
          if (!(fourier_at(d, ym, Flavor::odot) == tilde_variety_closed(f, i, ym))) ++bad;
        }
      }
    }
    r.check("variety-odot-closed-form", bad, 0, bad == 0,
            (q <= 5 ? "exhaustive y, every i != 0, " : "sampled y, i in {1, nonsquare}, ") + std::to_string(checked) +
                " points " + tag(f));
  }

  {
    std::vector<FqElem> ts;
    if (q <= 5) {
      for (std::uint32_t t = 0; t < q; ++t) ts.push_back(FqElem{t});
    } else {
      ts = {f.zero(), f.one(), f.smallest_nonsquare()};
    }
    std::int64_t bad = 0;
    std::size_t checked = 0;
    for (auto t : ts) {
      const MatSet d = variety(f, t, p.threads);
      if (q <= 5) {
        const auto table = fourier(d, Flavor::dot, p.threads);
        for (MatIndex m = 0; m < table.size(); ++m, ++checked) {
          if (!scaled_equal({table.at(m), 4}, hat_variety_closed(f, t, mat_from_index(f, m)), q)) ++bad;
        }
      } else {
        for (auto m : sample_points(rng, d.universe(), samples)) {
          ++checked;
          const Mat2 mm = mat_from_index(f, m);
          if (!scaled_equal({fourier_at(d, mm, Flavor::dot), 4}, hat_variety_closed(f, t, mm), q)) ++bad;
        }
      }
    }
    r.check("variety-dot-closed-form", bad, 0, bad == 0,
            (q <= 5 ? "exhaustive m, every t, " : "sampled m, t in {0, 1, nonsquare}, ") + std::to_string(checked) +
                " points " + tag(f));
  }

  r.absorb(character_sum_report(f));
}

Report exp_identities(Ctx& c) {
  for (const auto& f : c.fields) identities_for(f, c.p, c.trials, c.r);
  return c.r;
}

Report exp_main1(Ctx& c) {
  for (const auto& f : c.fields) {
    const FqElem i = elem_or(f, c.p.i, f.one()), j = elem_or(f, c.p.j, f.one());
    VarietyCache vc(f, c.p.threads);
    const MatSet& di = vc.get(i);
    const MatSet& dj = vc.get(j);
    const std::string ij = "i=" + f.format(i) + " j=" + f.format(j);
    absorb_tagged(c.r, check_main1(di, dj, i, j, c.p.threads), tag(f, ij + " full varieties"));
    const std::size_t size = c.p.sizes.empty() ? 4400 : c.p.sizes[0];
    const std::size_t size_f = c.p.sizes.size() > 1 ? c.p.sizes[1] : size;
    for (unsigned t = 0; t < c.trials; ++t) {
      const MatSet e = random_subset(di, size, derive_seed(c.p.seed, f.q(), 2 * t));
      const MatSet g = random_subset(dj, size_f, derive_seed(c.p.seed, f.q(), 2 * t + 1));
      absorb_tagged(c.r, check_main1(e, g, i, j, c.p.threads), tag(f, ij + " trial=" + std::to_string(t)));
    }
  }
  return c.r;
}

Report exp_mainthm(Ctx& c) {
  for (const auto& f : c.fields) {
    VarietyCache vc(f, c.p.threads);
    {
      const FqElem i = elem_or(f, c.p.i, f.one()), j = elem_or(f, c.p.j, f.one());
      const MatSet& di = vc.get(i);
      const MatSet& dj = vc.get(j);
      if (std::uint64_t{di.size()} * dj.size() <= kPairCap) {
        absorb_tagged(c.r, check_mainthm_bound(di, dj, i, j, c.p.threads),
                      tag(f, "i=" + f.format(i) + " j=" + f.format(j) + " full varieties"));
      }
    }
    for (unsigned t = 0; t < c.trials; ++t) {
      SeededRng rng(derive_seed(c.p.seed, f.q(), t));
      const FqElem i = c.p.i ? f.parse(*c.p.i) : random_unit(f, rng);
      const FqElem j = c.p.j ? f.parse(*c.p.j) : random_unit(f, rng);
      const MatSet& di = vc.get(i);
      const MatSet& dj = vc.get(j);
      const auto [se, sf] = chosen_sizes(c.p, rng, di.size(), dj.size());
      const MatSet e = random_subset(di, se, rng.next());
      const MatSet g = random_subset(dj, sf, rng.next());
      absorb_tagged(c.r, check_mainthm_bound(e, g, i, j, c.p.threads),
                    tag(f, "i=" + f.format(i) + " j=" + f.format(j) + " trial=" + std::to_string(t)));
    }
  }
  return c.r;
}

Report exp_sharpness(Ctx& c) {
  json constructions = json::array();
  for (const auto& f : c.fields) {
    std::vector<FqElem> is;
    if (c.p.i) {
      is.push_back(f.parse(*c.p.i));
    } else {
      for (std::uint32_t v = 1; v < f.q(); ++v) {
        if (f.quad(FqElem{v}) == -1) is.push_back(FqElem{v});
      }
    }
    for (auto i : is) {
      const auto sh = build_sharpness(f, i);
      const std::string label = tag(f, "i=" + f.format(i));
      absorb_tagged(c.r, verify_unique_solution(sh), label);
      absorb_tagged(c.r, check_main1(sh.e, sh.e, i, i, c.p.threads), label);
      constructions.push_back({{"kind", "sharpness"}, {"q", f.q()}, {"i", f.format(i)}});
    }
  }
  c.r.params["constructions"] = constructions;
  return c.r;
}

Report exp_alexset(Ctx& c) {
  for (const auto& f : c.fields) {
    const FqElem i = elem_or(f, c.p.i, f.one()), j = elem_or(f, c.p.j, f.one());
    VarietyCache vc(f, c.p.threads);
    struct Config {
      std::string label;
      std::vector<Vec2> s1, s2, s3, s4;
    };
    std::vector<Config> configs;
    const auto all = all_vectors(f);
    configs.push_back({"full", all, all, all, all});
    if (f.n() >= 2) {
      const auto grid = prime_grid_vectors(f);
      configs.push_back({"prime-grid", grid, grid, grid, grid});
    }
    std::vector<std::size_t> sweep;
    if (!c.p.sizes.empty()) {
      sweep.push_back(c.p.sizes[0]);
    } else {
      const double q3 = std::pow(static_cast<double>(f.q()), 3);
      for (double factor : {0.25, 0.5, 1.0, 2.0, 4.0}) {
        sweep.push_back(std::min<std::size_t>(static_cast<std::size_t>(std::ceil(std::sqrt(factor * q3))),
                                              std::size_t{f.q()} * f.q()));
      }
    }
    for (std::size_t k = 0; k < sweep.size(); ++k) {
      const std::size_t s = sweep[k];
      const std::size_t s2 = c.p.sizes.size() > 1 ? c.p.sizes[1] : s;
      const auto seed = [&](unsigned part) { return derive_seed(c.p.seed, f.q(), 4 * k + part); };
      configs.push_back({"seeded-" + std::to_string(s) + "x" + std::to_string(s2), random_vectors(f, s, seed(0)),
                         random_vectors(f, s2, seed(1)), random_vectors(f, s, seed(2)),
                         random_vectors(f, s2, seed(3))});
    }

    std::optional<std::size_t> smallest_full;
    for (const auto& cfg : configs) {
      const std::string label = tag(f, "i=" + f.format(i) + " j=" + f.format(j) + " " + cfg.label);
      absorb_tagged(c.r, product_intersection_check(f, cfg.s1, cfg.s2, i), label + " E");
      absorb_tagged(c.r, product_intersection_check(f, cfg.s3, cfg.s4, j), label + " F");
      const MatSet e = set_intersect(product_set(f, cfg.s1, cfg.s2), vc.get(i));
      const MatSet g = set_intersect(product_set(f, cfg.s3, cfg.s4), vc.get(j));
      const auto prof = count_profile(e, g, c.p.threads, {.odot = false, .energy = false});
      const auto attained = std::count_if(prof.n.begin(), prof.n.end(), [](std::int64_t v) { return v > 0; });
      const bool full = attained == static_cast<std::int64_t>(f.q());
      const std::size_t size = std::min(cfg.s1.size() * cfg.s2.size(), cfg.s3.size() * cfg.s4.size());
      RatioRow row;
      row.claim = "product-det-full";
      row.q = f.q();
      row.i = f.format(i);
      row.j = f.format(j);
      row.e = cfg.s1.size() * cfg.s2.size();
      row.f = cfg.s3.size() * cfg.s4.size();
      row.key = cfg.label;
      row.lhs = static_cast<double>(size);
      row.rhs = std::pow(static_cast<double>(f.q()), 3);
      row.ratio = row.lhs / row.rhs;
      row.pass = full;
      c.r.add_row(row);
      c.r.flags.push_back("product-det-full: " + std::to_string(attained) + "/" + std::to_string(f.q()) +
                          " determinants with |E cap D_i|=" + std::to_string(e.size()) +
                          " |F cap D_j|=" + std::to_string(g.size()) + " " + label);
      if (full && (!smallest_full || size < *smallest_full)) smallest_full = size;
    }
    c.r.flags.push_back(smallest_full ? "product-det-full: smallest full size " + std::to_string(*smallest_full) +
                                            " " + tag(f)
                                      : "product-det-full: no configuration reached every determinant " + tag(f));
  }
  return c.r;
}

std::size_t prop71_default_size(std::uint32_t q) {
  const std::uint64_t target = 4 * pow_u(q, 5);
  std::size_t s = static_cast<std::size_t>(std::sqrt(static_cast<double>(target)));
  while (std::uint64_t{s} * s <= target) ++s;
  return std::min<std::size_t>(s, pow_u(q, 4));
}

Report exp_prop71(Ctx& c) {
  for (const auto& f : c.fields) {
    const MatSet full = MatSet::full(f);
    if (std::uint64_t{full.size()} * full.size() <= kPairCap) {
      absorb_tagged(c.r, check_prop71(full, full, c.p.threads), tag(f, "full ring"));
    }
    const std::size_t se = c.p.sizes.empty() ? prop71_default_size(f.q()) : c.p.sizes[0];
    const std::size_t sf = c.p.sizes.size() > 1 ? c.p.sizes[1] : se;
    for (unsigned t = 0; t < c.trials; ++t) {
      const MatSet e = random_subset(full, se, derive_seed(c.p.seed, f.q(), 2 * t));
      const MatSet g = random_subset(full, sf, derive_seed(c.p.seed, f.q(), 2 * t + 1));
      absorb_tagged(c.r, check_prop71(e, g, c.p.threads), tag(f, "trial=" + std::to_string(t)));
    }
  }
  return c.r;
}

Report exp_w0(Ctx& c) {
  for (const auto& f : c.fields) {
    const MatSet full = MatSet::full(f);
    MatSet zero(f);
    zero.insert(MatIndex{0});
    absorb_tagged(c.r, check_w0_bound(zero, zero, c.p.threads), tag(f, "E=F={0}"));
    if (std::uint64_t{full.size()} * full.size() <= kPairCap) {
      absorb_tagged(c.r, check_w0_bound(full, full, c.p.threads), tag(f, "full ring"));
    }
    const std::size_t cap = std::min<std::size_t>(400, full.size());
    for (unsigned t = 0; t < c.trials; ++t) {
      SeededRng rng(derive_seed(c.p.seed, f.q(), t));
      const auto [se, sf] = chosen_sizes(c.p, rng, cap, cap);
      const MatSet e = random_subset(full, se, rng.next());
      const MatSet g = random_subset(full, sf, rng.next());
      const std::string label = tag(f, "trial=" + std::to_string(t));
      absorb_tagged(c.r, check_w0_bound(e, g, c.p.threads), label);
      absorb_tagged(c.r, check_cauchy_schwarz(e, g, c.p.threads), label);
    }
  }
  return c.r;
}

Report exp_bigcor(Ctx& c) {
  for (const auto& f : c.fields) {
    const FqElem i0 = elem_or(f, c.p.i, f.one());
    const auto all = all_vectors(f);
    const auto grid = prime_grid_vectors(f);
    absorb_tagged(c.r, product_intersection_check(f, all, all, i0), tag(f, "i=" + f.format(i0) + " full grid"));
    absorb_tagged(c.r, product_intersection_check(f, grid, grid, i0),
                  tag(f, "i=" + f.format(i0) + " prime-subfield grid"));
    const std::size_t q2 = std::size_t{f.q()} * f.q();
    for (unsigned t = 0; t < c.trials; ++t) {
      SeededRng rng(derive_seed(c.p.seed, f.q(), t));
      const FqElem i = c.p.i ? f.parse(*c.p.i) : random_unit(f, rng);
      const auto [s1, s2] = chosen_sizes(c.p, rng, q2, q2);
      const auto v1 = random_vectors(f, s1, rng.next());
      const auto v2 = random_vectors(f, s2, rng.next());
      absorb_tagged(c.r, product_intersection_check(f, v1, v2, i),
                    tag(f, "i=" + f.format(i) + " trial=" + std::to_string(t)));
    }
  }
  return c.r;
}

Report exp_energy(Ctx& c) {
  for (const auto& f : c.fields) {
    VarietyCache vc(f, c.p.threads);
    {
      const FqElem i = elem_or(f, c.p.i, f.one()), j = elem_or(f, c.p.j, f.one());
      absorb_tagged(c.r, energy_and_sumset_report(vc.get(i), vc.get(j), i, j, c.p.threads),
                    tag(f, "i=" + f.format(i) + " j=" + f.format(j) + " full varieties"));
    }
    for (unsigned t = 0; t < c.trials; ++t) {
      SeededRng rng(derive_seed(c.p.seed, f.q(), t));
      const FqElem i = c.p.i ? f.parse(*c.p.i) : random_unit(f, rng);
      const FqElem j = c.p.j ? f.parse(*c.p.j) : random_unit(f, rng);
      const MatSet& di = vc.get(i);
      const MatSet& dj = vc.get(j);
      const auto [se, sf] = chosen_sizes(c.p, rng, di.size(), dj.size());
      const MatSet e = random_subset(di, se, rng.next());
      const MatSet g = random_subset(dj, sf, rng.next());
      absorb_tagged(c.r, energy_and_sumset_report(e, g, i, j, c.p.threads),
                    tag(f, "i=" + f.format(i) + " j=" + f.format(j) + " trial=" + std::to_string(t)));
    }
  }
  return c.r;
}

std::vector<unsigned> k_values(const Params& p, std::vector<unsigned> defaults) {
  if (p.k) return {*p.k};
  return defaults;
}

bool units_covered(const FieldCtx& f, const MatSet& s) {
  const auto dets = det_set(s);
  return static_cast<std::size_t>(std::count_if(dets.begin(), dets.end(), [](FqElem v) { return v.value != 0; })) ==
         f.q() - 1;
}

void growth_rows(Report& r, const FieldCtx& f, FqElem i, const MatSet& e, unsigned k, unsigned threads) {
  const double q = f.q(), es = e.size();
  const MatSet prev = iterate_sumset(e, k - 1, threads);
  const MatSet ke = sumset(prev, e, threads);
  const std::string key = "k=" + std::to_string(k) + " |E|=" + std::to_string(e.size());
  const auto add = [&](const char* claim, std::uint64_t fsize, double lhs, double rhs) {
    RatioRow row;
    row.claim = claim;
    row.q = f.q();
    row.i = f.format(i);
    row.e = e.size();
    row.f = fsize;
    row.key = key;
    row.lhs = lhs;
    row.rhs = rhs;
    row.ratio = rhs == 0 ? 0 : lhs / rhs;
    r.add_row(row);
  };
  add("iterated-sumset", e.size(), static_cast<double>(ke.size()),
      std::min(q * es, std::pow(es, 2.0 * k - 2) / std::pow(q, 3.0 * k - 5)));
  add("sumset-mixed", prev.size(), static_cast<double>(ke.size()),
      std::min(q * es, es * es * static_cast<double>(prev.size()) / (q * q * q)));
}

Report exp_thm0_growth(Ctx& c) {
  for (const auto& f : c.fields) {
    const FqElem i = elem_or(f, c.p.i, f.one());
    const MatSet d = variety(f, i, c.p.threads);
    for (unsigned k : k_values(c.p, {2, 3, 4})) {
      if (k < 2) throw std::invalid_argument("thm0-growth needs k >= 2");
      const auto perm = seeded_permutation(d, derive_seed(c.p.seed, f.q(), k));
      const auto prefix = [&](std::size_t m) {
        return MatSet::from_indices(f, std::span<const MatIndex>(perm.data(), m));
      };
      const auto full_at = [&](std::size_t m) { return units_covered(f, iterate_sumset(prefix(m), 2 * k, c.p.threads)); };
      const std::string label = tag(f, "i=" + f.format(i) + " k=" + std::to_string(k));
      if (!full_at(perm.size())) {
        c.r.flags.push_back("units-threshold: even the whole variety misses a unit determinant " + label);
        continue;
      }
      std::size_t lo = 1, hi = perm.size();
      while (lo < hi) {
        const std::size_t mid = lo + (hi - lo) / 2;
        if (full_at(mid)) {
          hi = mid;
        } else {
          lo = mid + 1;
        }
      }
      RatioRow row;
      row.claim = "units-threshold";
      row.q = f.q();
      row.i = f.format(i);
      row.e = lo;
      row.f = lo;
      row.key = "k=" + std::to_string(k);
      row.lhs = static_cast<double>(lo);
      row.rhs = std::pow(static_cast<double>(f.q()), (6.0 * k - 5) / (4.0 * k - 4));
      row.ratio = row.lhs / row.rhs;
      c.r.add_row(row);
      c.r.flags.push_back("units-threshold: smallest nested prefix with det(2kE) covering F_q^* has size " +
                          std::to_string(lo) + " " + label);
      growth_rows(c.r, f, i, prefix(lo), k, c.p.threads);
      growth_rows(c.r, f, i, d, k, c.p.threads);
    }
  }
  return c.r;
}

bool in_prime_subfield(const FieldCtx& f, const std::vector<FqElem>& vals) {
  const auto fp = f.prime_subfield_elems();
  return std::all_of(vals.begin(), vals.end(),
                     [&](FqElem v) { return std::find(fp.begin(), fp.end(), v) != fp.end(); });
}

std::string join_elems(const FieldCtx& f, const std::vector<FqElem>& vals) {
  std::string out;
  for (auto v : vals) out += (out.empty() ? "" : " ") + f.format(v);
  return out;
}

Report exp_thm0_sharp(Ctx& c) {
  for (const auto& f : c.fields) {
    const MatSet e = sl2_prime_subfield(f);
    const std::int64_t p = f.p();
    c.r.check("sl2-cardinality", static_cast<std::int64_t>(e.size()), p * (p * p - 1),
              static_cast<std::int64_t>(e.size()) == p * (p * p - 1), tag(f));
    for (unsigned k : k_values(c.p, {1, 2, 3, 4})) {
      if (k < 1) throw std::invalid_argument("thm0-sharp needs k >= 1");
      const MatSet s = iterate_sumset(e, 2 * k, c.p.threads);
      const auto dets = det_set(s);
      const bool inside = in_prime_subfield(f, dets);
      c.r.check("det-in-prime-subfield", static_cast<std::int64_t>(dets.size()), p, inside && dets.size() < f.q(),
                "det(2kE) = {" + join_elems(f, dets) + "}, |2kE|=" + std::to_string(s.size()) + " " +
                    tag(f, "k=" + std::to_string(k)));
    }
    const MatSet pm = prime_subfield_matrices(f);
    const auto dets = det_set(sumset(pm, pm, c.p.threads));
    c.r.check("prime-subfield-closed", static_cast<std::int64_t>(dets.size()), p, in_prime_subfield(f, dets),
              "|E|=" + std::to_string(pm.size()) + " " + tag(f));
  }
  c.r.params["constructions"] = json::array({{{"kind", "sl2-prime-subfield"}}, {{"kind", "prime-subfield-matrices"}}});
  return c.r;
}

Report exp_auditors(Ctx& c) {
  for (const auto& f : c.fields) {
    const double q = f.q();
    {
      MatSet id(f);
      id.insert(mat_identity(f));
      const CycInt v = audit_coincidence(id, f.zero());
      const std::int64_t expect = f.q() - 1;
      c.r.check("coincidence-identity", to_json(v), expect, v == CycInt(f.p(), expect), "F={I}, l=0 " + tag(f));
    }
    for (unsigned t = 0; t < c.trials; ++t) {
      SeededRng rng(derive_seed(c.p.seed, f.q(), t));
      const FqElem i = c.p.i ? f.parse(*c.p.i) : random_unit(f, rng);
      const FqElem j = c.p.j ? f.parse(*c.p.j) : random_unit(f, rng);
      const FqElem l{static_cast<std::uint32_t>(rng.below(f.q()))};
      const MatSet dj = variety(f, j, c.p.threads);
      const std::size_t size = c.p.sizes.empty() ? random_size(rng, 1, std::min<std::size_t>(dj.size(), 64))
                                                 : c.p.sizes[0];
      const MatSet g = random_subset(dj, size, rng.next());
      const auto sums = proof_sum_auditors(g, i, l);
      const double fs = g.size();
      const std::string label =
          tag(f, "i=" + f.format(i) + " j=" + f.format(j) + " l=" + f.format(l) + " |F|=" + std::to_string(g.size()));
      const auto audit = [&](const char* claim, const CycInt& v, double bound) {
        const bool real = v.is_real();
        const double value = v.eval().real();
        c.r.check(claim, num(value), num(bound), real && value <= bound + 1e-6,
                  std::string(real ? "real" : "not real") + " " + label);
      };
      audit("coincidence-sum", sums.coincidence, 2 * q * fs);
      audit("singular-sum", sums.singular, q * fs * fs);
      audit("kloosterman-sum", sums.kloosterman, 2 * q * fs * fs);
    }
  }
  return c.r;
}

Report exp_spectral(Ctx& c) {
  for (const auto& f : c.fields) {
    const auto compare = [&](const MatSet& e, const MatSet& g, const std::string& label) {
      const auto brute = count_profile(e, g, c.p.threads, {.odot = false, .energy = false}).n;
      const auto spec = spectral_counts(e, g, c.p.threads);
      std::int64_t bad = 0;
      for (std::size_t t = 0; t < brute.size(); ++t) bad += brute[t] != spec[t];
      c.r.check("spectral-equals-brute", bad, 0, bad == 0,
                "|E|=" + std::to_string(e.size()) + " |F|=" + std::to_string(g.size()) + " " + label);
    };
    const MatSet d1 = variety(f, f.one(), c.p.threads);
    compare(d1, d1, tag(f, "E=F=D_1"));
    const MatSet full = MatSet::full(f);
    const std::size_t cap = std::min<std::size_t>(60, full.size());
    for (unsigned t = 0; t < c.trials; ++t) {
      SeededRng rng(derive_seed(c.p.seed, f.q(), t));
      const auto [se, sf] = chosen_sizes(c.p, rng, cap, cap);
      compare(random_subset(full, se, rng.next()), random_subset(full, sf, rng.next()),
              tag(f, "trial=" + std::to_string(t)));
    }
  }
  return c.r;
}

struct Experiment {
  std::vector<std::string> default_q;
  unsigned default_trials;
  std::function<Report(Ctx&)> body;
};

const std::map<std::string, Experiment>& registry() {
  static const std::map<std::string, Experiment> reg = {
      {"identities", {{"3"}, 20, exp_identities}},
      {"main1", {{"17"}, 20, exp_main1}},
      {"mainthm-bound", {{"3", "5", "7", "9", "11"}, 50, exp_mainthm}},
      {"sharpness", {{"3", "5", "7", "11", "13"}, 0, exp_sharpness}},
      {"alexset", {{"5", "7", "9"}, 0, exp_alexset}},
      {"prop71", {{"3", "5"}, 100, exp_prop71}},
      {"w0", {{"3", "5", "7"}, 20, exp_w0}},
      {"bigcor", {{"5", "7", "9"}, 30, exp_bigcor}},
      {"energy-report", {{"3", "5", "7", "9"}, 10, exp_energy}},
      {"thm0-growth", {{"3", "5", "9"}, 0, exp_thm0_growth}},
      {"thm0-sharp", {{"9"}, 0, exp_thm0_sharp}},
      {"auditors", {{"3", "5", "7"}, 10, exp_auditors}},
      {"spectral-xcheck", {{"3"}, 20, exp_spectral}},
  };
  return reg;
}

json params_json(const Params& p, const std::vector<FieldCtx>& fields, unsigned trials, bool uses_trials) {
  json j = json::object();
  json qs = json::array();
  for (const auto& f : fields) qs.push_back(f.q());
  j["q"] = qs;
  j["seed"] = p.seed;
  if (uses_trials) j["trials"] = trials;
  if (p.i) j["i"] = *p.i;
  if (p.j) j["j"] = *p.j;
  if (p.k) j["k"] = *p.k;
  if (!p.sizes.empty()) j["sizes"] = p.sizes;
  if (p.assert_ratio) j["assert_ratio"] = num(*p.assert_ratio);
  return j;
}

std::string field_descriptors(const std::vector<FieldCtx>& fields) {
  std::string out;
  for (const auto& f : fields) out += (out.empty() ? "" : ";") + f.descriptor();
  return out;
}

Report run_one(const std::string& name, const Params& p) {
  const auto& reg = registry();
  const auto it = reg.find(name);
  if (it == reg.end()) throw std::invalid_argument("unknown experiment '" + name + "'");
  const auto& ex = it->second;
  Report r;
  r.experiment = name;
  Ctx c{p, r, resolve_fields(p, ex.default_q), p.trials.value_or(ex.default_trials)};
  r.field = field_descriptors(c.fields);
  r.params = params_json(p, c.fields, c.trials, ex.default_trials != 0);
  ex.body(c);
  apply_ratio_policy(r, p.assert_ratio);
  return r;
}

Report run_all(const Params& p) {
  Report r;
  r.experiment = "run-all";
  r.params = json{{"seed", p.seed}};
  if (p.trials) r.params["trials"] = *p.trials;
  if (p.assert_ratio) r.params["assert_ratio"] = num(*p.assert_ratio);
  std::vector<std::string> fields;
  for (const auto& [name, ex] : registry()) {
    Params sub;
    sub.seed = p.seed;
    sub.trials = p.trials;
    sub.threads = p.threads;
    sub.assert_ratio = p.assert_ratio;
    if (name == "identities") sub.q = {"3", "5", "7", "9"};
    Report one = run_one(name, sub);
    for (auto& a : one.assertions) a.claim = name + "/" + a.claim;
    for (auto& row : one.table) row.claim = name + "/" + row.claim;
    for (auto& fl : one.flags) fl = name + ": " + fl;
    r.absorb(one);
    r.params["experiments"].push_back(name);
    std::stringstream parts(one.field);
    std::string fd;
    while (std::getline(parts, fd, ';')) {
      if (std::find(fields.begin(), fields.end(), fd) == fields.end()) fields.push_back(fd);
    }
  }
  for (const auto& fd : fields) r.field += (r.field.empty() ? "" : ";") + fd;
  return r;
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, ex] : registry()) out.push_back(name);
    out.push_back("run-all");
    return out;
  }();
  return names;
}

Report run(const std::string& name, const Params& params) {
  const auto start = std::chrono::steady_clock::now();
  Report r = name == "run-all" ? run_all(params) : run_one(name, params);
  r.runtime_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return r;
}

Report character_sum_report(const FieldCtx& f) {
  Report r;
  r.experiment = "character-sums";
  r.field = f.descriptor();
  const std::uint32_t q = f.q(), p = f.p(), n = f.n();
  const double sq = std::sqrt(static_cast<double>(q));
  const CycInt g1 = gauss_sum(f, f.one());

  double worst_rel = 0;
  std::int64_t bad_scaling = 0;
  for (std::uint32_t a = 1; a < q; ++a) {
    const CycInt ga = gauss_sum(f, FqElem{a});
    worst_rel = std::max(worst_rel, std::fabs(std::abs(ga.eval()) - sq) / sq);
    if (!(ga == g1.scale(f.quad(FqElem{a})))) ++bad_scaling;
  }
  r.check("gauss-magnitude", num(worst_rel), num(1e-9), worst_rel <= 1e-9,
          "max relative error of |G_a| against sqrt q " + tag(f));
  r.check("gauss-scaling", bad_scaling, 0, bad_scaling == 0, "G_a = eta(a) G_1 for all a != 0 " + tag(f));

  const CycInt lhs = (g1 * g1).scale(f.quad(f.neg(f.one())));
  r.check("gauss-square", to_json(lhs), q, lhs == CycInt(p, q), "eta(-1) G_1^2 = q " + tag(f));

  // G_1 = (-1)^{n-1} sqrt q for p = 1 mod 4, (-1)^{n-1} i^n sqrt q for p = 3 mod 4.
  std::complex<double> predicted(n % 2 == 1 ? sq : -sq, 0.0);
  if (p % 4 == 3) {
    static const std::complex<double> powers[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    predicted *= powers[n % 4];
  }
  const double err = std::abs(g1.eval() - predicted);
  bool exact = err <= 1e-9 * sq;
  std::string detail = "G_1 = " + g1.to_string() + " " + tag(f);
  if (n % 2 == 0) {
    const std::int64_t v = static_cast<std::int64_t>(std::llround(predicted.real()));
    exact = exact && g1.is_integer() && g1.as_integer() == v;
    detail = "integer value, " + detail;
  }
  r.check("gauss-closed-value", json::array({num(g1.eval().real()), num(g1.eval().imag())}),
          json::array({num(predicted.real()), num(predicted.imag())}), exact, detail);

  double worst_k = 0;
  for (std::uint32_t a = 0; a < q; ++a) {
    for (std::uint32_t b = 0; b < q; ++b) {
      worst_k = std::max(worst_k, std::abs(kloosterman(f, FqElem{a}, FqElem{b}, true).eval()));
      if (a != 0 && b != 0) worst_k = std::max(worst_k, std::abs(kloosterman(f, FqElem{a}, FqElem{b}, false).eval()));
    }
  }
  r.check("kloosterman-bound", num(worst_k), num(2 * sq), worst_k <= 2 * sq + 1e-6,
          "max |K| over all parameters, plain and eta-twisted " + tag(f));
  return r;
}

RatioKind ratio_kind(const std::string& claim) {
  const auto slash = claim.rfind('/');
  const std::string base = slash == std::string::npos ? claim : claim.substr(slash + 1);
  if (base == "energy-upper" || base == "max-N" || base == "max-W") return RatioKind::upper;
  if (base == "sumset-lower-3" || base == "sumset-lower-2" || base == "sumset-mixed" || base == "iterated-sumset") {
    return RatioKind::lower;
  }
  if (base == "units-threshold" || base == "product-det-full") return RatioKind::threshold;
  return RatioKind::none;
}

void apply_ratio_policy(Report& r, std::optional<double> limit) {
  // claim -> q -> implied constant
  std::map<std::string, std::map<std::uint32_t, double>> constants;
  for (const auto& row : r.table) {
    const RatioKind kind = ratio_kind(row.claim);
    if (kind == RatioKind::none) continue;
    double c = 0;
    if (kind == RatioKind::upper) {
      c = row.ratio;
    } else if (kind == RatioKind::lower) {
      c = row.ratio == 0 ? INFINITY : 1.0 / row.ratio;
    } else {
      if (!row.pass) continue;
      c = row.ratio;
    }
    auto& slot = constants[row.claim];
    const auto it = slot.find(row.q);
    if (it == slot.end()) {
      slot[row.q] = c;
    } else {
      it->second = kind == RatioKind::threshold ? std::min(it->second, c) : std::max(it->second, c);
    }
  }
  for (const auto& [claim, by_q] : constants) {
    std::string summary;
    double worst = 0;
    for (const auto& [q, c] : by_q) {
      summary += (summary.empty() ? "" : ", ") + ("q=" + std::to_string(q) + ": ") + fmt6(c);
      worst = std::max(worst, c);
    }
    r.flags.push_back("empirical constant " + claim + ": " + summary);
    const auto first = by_q.begin();
    for (const auto& [q, c] : by_q) {
      if (c > 4 * first->second) {
        r.flags.push_back("ratio growth " + claim + ": constant " + fmt6(c) + " at q=" +
                          std::to_string(q) + " exceeds 4x the value " + fmt6(first->second) +
                          " at q=" + std::to_string(first->first) + " (inconsistent with a fixed constant)");
        break;
      }
    }
    if (limit) {
      r.check("ratio-bound " + claim, num(worst), num(*limit), worst <= *limit,
              "largest implied constant across q");
    }
  }
}

}  // namespace detsum
