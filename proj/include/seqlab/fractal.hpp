#pragma once
//---------------------------------------------------------------------------
// fractal.hpp - discrete fractal-dimension estimators for subsets of the
// integers: mass dimensions over dyadic-style scales, an exact interval-cover
// optimizer per annulus, a summability-based Hausdorff-dimension estimate,
// an upper entropy index from greedy disjoint-interval packing, and growth
// bound checkers that certify when the estimators must agree.
//
// Asymptotic notions are finitized with declared rules: liminf/limsup become
// min/max over the last three observed scales, and both series summability
// and "tends to zero" are judged by a fitted geometric tail ratio below 0.95
// (trailing zero terms count as vanished tails).  Every report carries the
// raw profiles so callers can re-judge.
//---------------------------------------------------------------------------

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "seqlab/stats.hpp"
#include "seqlab/util.hpp"

namespace seqlab {

//---------------------------------------------------------------------------
// Integer sets.  Queries may run on the two-sided reflection A u -A so that
// one-sided constructions can be measured with symmetric windows.
//---------------------------------------------------------------------------

struct IntegerSet {
  std::vector<std::int64_t> points;  // sorted, distinct
  bool symmetric_reflect = false;

  static IntegerSet of(std::vector<std::int64_t> pts, bool reflect = false) {
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    IntegerSet s;
    s.points = std::move(pts);
    s.symmetric_reflect = reflect;
    return s;
  }

  // Elements of the (possibly reflected) set inside [lo, hi), sorted.
  std::vector<std::int64_t> in_range(std::int64_t lo, std::int64_t hi) const {
    std::vector<std::int64_t> out;
    auto push_range = [&](std::int64_t a, std::int64_t b, bool negate) {
      auto it = std::lower_bound(points.begin(), points.end(), a);
      auto en = std::lower_bound(points.begin(), points.end(), b);
      for (; it != en; ++it) out.push_back(negate ? -*it : *it);
    };
    push_range(lo, hi, false);
    if (symmetric_reflect) {
      // x in [lo, hi) with -x in points  <=>  -x in (-hi, -lo]
      std::vector<std::int64_t> neg;
      auto it = std::lower_bound(points.begin(), points.end(), -hi + 1);
      auto en = std::lower_bound(points.begin(), points.end(), -lo + 1);
      for (; it != en; ++it) neg.push_back(-*it);
      std::reverse(neg.begin(), neg.end());
      std::vector<std::int64_t> merged;
      std::merge(out.begin(), out.end(), neg.begin(), neg.end(),
                 std::back_inserter(merged));
      merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
      out = std::move(merged);
    }
    return out;
  }

  std::int64_t count_in(std::int64_t lo, std::int64_t hi) const {
    return static_cast<std::int64_t>(in_range(lo, hi).size());
  }
};

namespace detail {

inline std::int64_t ipow_checked(std::int64_t b, std::int64_t e) {
  std::int64_t v = 1;
  for (std::int64_t i = 0; i < e; ++i) {
    if (v > std::numeric_limits<std::int64_t>::max() / b)
      throw usage_error("scale overflows 64-bit range");
    v *= b;
  }
  return v;
}

}  // namespace detail

//---------------------------------------------------------------------------
// Annuli [-r^n, r^n) \ [-r^{n-1}, r^{n-1}); the innermost one (n = 1) is the
// full window [-r, r).  Their diameter is the hull cardinality 2 r^n.
//---------------------------------------------------------------------------

struct Annulus {
  std::int64_t r = 0;
  std::int64_t n = 0;

  static Annulus of(std::int64_t r, std::int64_t n) {
    if (r < 2 || n < 1) throw usage_error("annulus needs r >= 2, n >= 1");
    detail::ipow_checked(r, n);
    return Annulus{r, n};
  }
  std::int64_t outer() const { return detail::ipow_checked(r, n); }
  std::int64_t inner() const { return n == 1 ? 0 : detail::ipow_checked(r, n - 1); }
  std::int64_t diameter() const { return 2 * outer(); }

  std::vector<std::int64_t> members(const IntegerSet& a) const {
    std::int64_t out = outer(), in = inner();
    if (n == 1) return a.in_range(-out, out);
    std::vector<std::int64_t> left = a.in_range(-out, -in);
    std::vector<std::int64_t> right = a.in_range(in, out);
    left.insert(left.end(), right.begin(), right.end());
    return left;
  }
};

//---------------------------------------------------------------------------
// Exact minimal cover cost.  Covers use half-open integer intervals whose
// cost is cardinality^alpha; an optimal cover of a finite set may be assumed
// to have every interval end on covered points, so a quadratic DP over the
// sorted points is exact.  The inner loop prunes as soon as the span cost
// alone exceeds the best candidate, since spans only grow leftward.
//---------------------------------------------------------------------------

inline double min_cover_cost(const std::vector<std::int64_t>& pts,
                             double alpha) {
  if (alpha <= 0.0) throw usage_error("cover cost needs alpha > 0");
  if (pts.size() > 60000)
    throw usage_error("annulus too dense for the exact cover optimizer");
  std::size_t m = pts.size();
  std::vector<double> dp(m + 1, 0.0);
  for (std::size_t i = 1; i <= m; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = i; j >= 1; --j) {
      double span = static_cast<double>(pts[i - 1] - pts[j - 1] + 1);
      double span_cost = std::pow(span, alpha);
      if (span_cost >= best) break;
      best = std::min(best, dp[j - 1] + span_cost);
    }
    dp[i] = best;
  }
  return dp[m];
}

// Normalized cover cost of A within one annulus.
inline double nu_alpha(const IntegerSet& a, const Annulus& f, double alpha) {
  if (alpha <= 0.0) throw usage_error("nu_alpha needs alpha > 0");
  std::vector<std::int64_t> pts = f.members(a);
  if (pts.empty()) return 0.0;
  return min_cover_cost(pts, alpha) /
         std::pow(static_cast<double>(f.diameter()), alpha);
}

//---------------------------------------------------------------------------
// Mass dimensions: log |A n [-n/2, n/2)| / log n along n = r^j.  The lower
// and upper values are the min/max over the last (up to) three scales.
//---------------------------------------------------------------------------

struct MassDimReport {
  std::vector<std::int64_t> scales;
  std::vector<std::int64_t> counts;
  std::vector<double> log_ratios;
  double lower = 0.0;
  double upper = 0.0;
};

inline MassDimReport mass_dim_estimate(const IntegerSet& a, std::int64_t r,
                                       std::int64_t n_max) {
  if (r < 2 || n_max < r) throw usage_error("mass_dim needs r >= 2, n_max >= r");
  MassDimReport rep;
  for (std::int64_t n = r; n <= n_max && n >= 1;) {
    std::int64_t c = a.count_in(-(n / 2), n - n / 2);
    rep.scales.push_back(n);
    rep.counts.push_back(c);
    rep.log_ratios.push_back(
        c > 0 ? std::log(static_cast<double>(c)) / std::log(static_cast<double>(n))
              : 0.0);
    if (n > n_max / r) break;
    n *= r;
  }
  std::size_t k = rep.log_ratios.size();
  std::size_t from = k > 3 ? k - 3 : 0;
  rep.lower = *std::min_element(rep.log_ratios.begin() + from, rep.log_ratios.end());
  rep.upper = *std::max_element(rep.log_ratios.begin() + from, rep.log_ratios.end());
  return rep;
}

//---------------------------------------------------------------------------
// Hausdorff-dimension estimate: per-annulus normalized cover costs summed
// over n; an alpha is accepted once the term sequence has a fitted geometric
// tail ratio below 0.95 (trailing zero terms count as vanished tails).  The
// estimate is the least accepted alpha on a 0.01 grid, capped at 1.
//---------------------------------------------------------------------------

struct HausdorffReport {
  std::vector<double> alphas;
  std::vector<std::vector<double>> terms;  // per alpha, indexed by n-1
  std::vector<bool> summable;
  double estimate = 1.0;
};

namespace detail {

// Summability of a finite nonnegative tail: a sequence ending in zero has a
// vanished tail and is trivially summable; otherwise the positive terms must
// be few (<= 1) or fit a geometric ratio < 0.95.
inline bool tail_summable(const std::vector<double>& terms) {
  if (terms.empty() || terms.back() == 0.0) return true;
  std::vector<double> pos;
  for (double t : terms)
    if (t > 0.0) pos.push_back(t);
  if (pos.size() <= 1) return true;
  return fitted_geometric_ratio(pos) < 0.95;
}

}  // namespace detail

inline HausdorffReport hausdorff_dim_estimate(const IntegerSet& a,
                                              std::int64_t r,
                                              std::int64_t n_max) {
  if (r < 2 || n_max < r) throw usage_error("hausdorff needs r >= 2, n_max >= r");
  std::int64_t depth = 0;
  while (detail::ipow_checked(r, depth + 1) <= n_max) ++depth;
  if (depth < 2) throw usage_error("hausdorff needs at least two scales");
  HausdorffReport rep;
  std::vector<std::vector<std::int64_t>> pts;
  for (std::int64_t n = 1; n <= depth; ++n)
    pts.push_back(Annulus::of(r, n).members(a));
  bool found = false;
  for (int g = 1; g <= 100; ++g) {
    double alpha = g / 100.0;
    std::vector<double> t;
    for (std::int64_t n = 1; n <= depth; ++n) {
      double d = std::pow(static_cast<double>(Annulus::of(r, n).diameter()), alpha);
      t.push_back(pts[static_cast<std::size_t>(n - 1)].empty()
                      ? 0.0
                      : min_cover_cost(pts[static_cast<std::size_t>(n - 1)], alpha) / d);
    }
    bool sum = detail::tail_summable(t);
    rep.alphas.push_back(alpha);
    rep.terms.push_back(std::move(t));
    rep.summable.push_back(sum);
    if (sum && !found) {
      rep.estimate = alpha;
      found = true;
    }
  }
  if (!found) rep.estimate = 1.0;
  return rep;
}

//---------------------------------------------------------------------------
// Greedy packing count: the maximum number of disjoint half-open intervals
// of length 2d centered in the given sorted points.  Leftmost-first greedy
// placement is optimal by the usual exchange argument.
//---------------------------------------------------------------------------

inline std::int64_t disjoint_interval_count(const std::vector<std::int64_t>& pts,
                                            std::int64_t d) {
  if (d < 1) throw usage_error("interval packing needs d >= 1");
  std::int64_t count = 0;
  double last_end = -std::numeric_limits<double>::infinity();
  for (std::int64_t x : pts) {
    if (static_cast<double>(x - d) >= last_end) {
      ++count;
      last_end = static_cast<double>(x + d);
    }
  }
  return count;
}

//---------------------------------------------------------------------------
// Upper entropy index: for each annulus the expression
//   max_{1 <= d <= r^{n(1-eps)}} (d r^{-n})^alpha N(d, A n I_n)
// is evaluated exactly by enumerating the O(|pts|) segments on which the
// packing count is constant (it is nonincreasing in d, so each segment's
// maximum sits at its right end).  The estimate is the least grid alpha for
// which the expression decays (fitted geometric tail ratio below 0.95, or a
// vanished tail) for every eps in {0.1, 0.2}, capped at 1.
//---------------------------------------------------------------------------

struct EntropyReport {
  std::vector<double> epsilons;
  std::vector<double> alphas;
  // expressions[e][a] is the per-annulus profile for epsilons[e], alphas[a]
  std::vector<std::vector<std::vector<double>>> expressions;
  std::vector<std::vector<bool>> to_zero;
  double estimate = 1.0;
};

namespace detail {

// Right endpoints of the maximal d-segments on which the packing count is
// constant, over 1 <= d <= d_max.
inline std::vector<std::pair<std::int64_t, std::int64_t>> packing_segments(
    const std::vector<std::int64_t>& pts, std::int64_t d_max) {
  std::vector<std::pair<std::int64_t, std::int64_t>> seg;  // (d, count at d)
  std::int64_t d = 1;
  while (d <= d_max) {
    std::int64_t v = disjoint_interval_count(pts, d);
    if (v == 0) break;
    std::int64_t lo = d, hi = d_max;  // largest d' with count still v
    while (lo < hi) {
      std::int64_t mid = lo + (hi - lo + 1) / 2;
      if (disjoint_interval_count(pts, mid) == v)
        lo = mid;
      else
        hi = mid - 1;
    }
    seg.emplace_back(lo, v);
    d = lo + 1;
  }
  return seg;
}

inline bool decays_to_zero(const std::vector<double>& terms) {
  return tail_summable(terms);
}

}  // namespace detail

inline EntropyReport entropy_index(const IntegerSet& a, std::int64_t r,
                                   std::int64_t n_max) {
  if (r < 2 || n_max < r) throw usage_error("entropy needs r >= 2, n_max >= r");
  std::int64_t depth = 0;
  while (detail::ipow_checked(r, depth + 1) <= n_max) ++depth;
  if (depth < 2) throw usage_error("entropy needs at least two scales");
  EntropyReport rep;
  rep.epsilons = {0.1, 0.2};
  for (int g = 1; g <= 100; ++g) rep.alphas.push_back(g / 100.0);

  // packing segments per (annulus, eps) are alpha-independent
  std::vector<std::vector<std::int64_t>> pts;
  for (std::int64_t n = 1; n <= depth; ++n)
    pts.push_back(Annulus::of(r, n).members(a));
  rep.expressions.assign(rep.epsilons.size(), {});
  rep.to_zero.assign(rep.epsilons.size(), {});
  std::vector<std::vector<double>> accepted_at(rep.epsilons.size());
  for (std::size_t e = 0; e < rep.epsilons.size(); ++e) {
    double eps = rep.epsilons[e];
    std::vector<std::vector<std::pair<std::int64_t, std::int64_t>>> segs;
    for (std::int64_t n = 1; n <= depth; ++n) {
      double dmaxf = std::pow(static_cast<double>(r),
                              static_cast<double>(n) * (1.0 - eps));
      std::int64_t d_max = std::max<std::int64_t>(1, static_cast<std::int64_t>(dmaxf));
      segs.push_back(detail::packing_segments(pts[static_cast<std::size_t>(n - 1)], d_max));
    }
    for (double alpha : rep.alphas) {
      std::vector<double> expr;
      for (std::int64_t n = 1; n <= depth; ++n) {
        double rn = std::pow(static_cast<double>(r), static_cast<double>(n));
        double best = 0.0;
        for (auto [d, cnt] : segs[static_cast<std::size_t>(n - 1)])
          best = std::max(best, std::pow(static_cast<double>(d) / rn, alpha) *
                                    static_cast<double>(cnt));
        expr.push_back(best);
      }
      rep.to_zero[e].push_back(detail::decays_to_zero(expr));
      rep.expressions[e].push_back(std::move(expr));
    }
  }
  rep.estimate = 1.0;
  for (std::size_t a_i = 0; a_i < rep.alphas.size(); ++a_i) {
    bool all = true;
    for (std::size_t e = 0; e < rep.epsilons.size(); ++e)
      all = all && rep.to_zero[e][a_i];
    if (all) {
      rep.estimate = rep.alphas[a_i];
      break;
    }
  }
  return rep;
}

//---------------------------------------------------------------------------
// Growth-bound checkers.  Both fit the best constants for a two-sided
// polynomial growth law over a range of scales and report whether positive
// constants exist without violations; "no decay toward zero" of the fitted
// lower ratios is judged by a fitted geometric ratio >= 0.95, and the upper
// ratios symmetrically must not grow beyond ratio 1/0.95.  When the lower
// bound must hold around every member, a fixed-seed sample of up to 10^3
// members plus both extremes is tested.
//---------------------------------------------------------------------------

struct GrowthBoundReport {
  double alpha = 0.0;
  std::int64_t n_lo = 0;
  std::int64_t n_hi = 0;
  std::vector<double> lower_ratios;  // fitted c' candidates per scale
  std::vector<double> upper_ratios;  // fitted c candidates per scale
  double c_prime = 0.0;              // min of lower ratios
  double c = 0.0;                    // max of upper ratios
  bool lower_ok = false;
  bool upper_ok = false;
  bool holds = false;
};

namespace detail {

inline void check_growth_args(double alpha, std::int64_t r, std::int64_t n_lo,
                              std::int64_t n_hi) {
  if (alpha <= 0.0) throw usage_error("growth check needs alpha > 0");
  if (r < 2) throw usage_error("growth check needs r >= 2");
  if (n_lo < 1 || n_hi < n_lo + 2)
    throw usage_error("growth check needs at least three scales");
}

// Exact max over all integer x of |A n [x - r^n, x + r^n)| via a two-pointer
// sweep anchored at the points themselves.
inline std::int64_t max_window_count(const std::vector<std::int64_t>& pts,
                                     std::int64_t half_width) {
  std::int64_t best = 0;
  std::size_t lo = 0;
  for (std::size_t hi = 0; hi < pts.size(); ++hi) {
    while (pts[hi] - pts[lo] >= 2 * half_width) ++lo;
    best = std::max<std::int64_t>(best, static_cast<std::int64_t>(hi - lo + 1));
  }
  return best;
}

inline void finish_growth_report(GrowthBoundReport& rep) {
  rep.c_prime = rep.lower_ratios.empty()
                    ? 0.0
                    : *std::min_element(rep.lower_ratios.begin(), rep.lower_ratios.end());
  rep.c = rep.upper_ratios.empty()
              ? 0.0
              : *std::max_element(rep.upper_ratios.begin(), rep.upper_ratios.end());
  bool lower_positive = rep.c_prime > 0.0;
  rep.lower_ok = lower_positive &&
                 fitted_geometric_ratio(rep.lower_ratios) >= 0.95;
  rep.upper_ok = true;
  for (double u : rep.upper_ratios) rep.upper_ok = rep.upper_ok && u > 0.0;
  rep.upper_ok = rep.upper_ok && !rep.upper_ratios.empty() &&
                 fitted_geometric_ratio(rep.upper_ratios) <= 1.0 / 0.95;
  rep.holds = rep.lower_ok && rep.upper_ok;
}

}  // namespace detail

// Lower growth at the origin window, upper growth around every integer:
// certifies agreement of the Hausdorff and upper-mass estimates.
inline GrowthBoundReport check_origin_growth(const IntegerSet& a, std::int64_t r,
                                             double alpha, std::int64_t n_lo,
                                             std::int64_t n_hi) {
  detail::check_growth_args(alpha, r, n_lo, n_hi);
  GrowthBoundReport rep;
  rep.alpha = alpha;
  rep.n_lo = n_lo;
  rep.n_hi = n_hi;
  std::int64_t span = detail::ipow_checked(r, n_hi);
  std::vector<std::int64_t> all = a.in_range(-2 * span, 2 * span);
  for (std::int64_t n = n_lo; n <= n_hi; ++n) {
    std::int64_t rn = detail::ipow_checked(r, n);
    double scale = std::pow(static_cast<double>(rn), alpha);
    rep.lower_ratios.push_back(static_cast<double>(a.count_in(-rn, rn)) / scale);
    rep.upper_ratios.push_back(
        static_cast<double>(detail::max_window_count(all, rn)) / scale);
  }
  detail::finish_growth_report(rep);
  return rep;
}

// Lower growth around every member (sampled for large sets), upper growth at
// the origin window: certifies agreement of the entropy and upper-mass
// estimates.
inline GrowthBoundReport check_pointwise_growth(const IntegerSet& a,
                                                std::int64_t r, double alpha,
                                                std::int64_t n_lo,
                                                std::int64_t n_hi) {
  detail::check_growth_args(alpha, r, n_lo, n_hi);
  GrowthBoundReport rep;
  rep.alpha = alpha;
  rep.n_lo = n_lo;
  rep.n_hi = n_hi;
  std::int64_t span = detail::ipow_checked(r, n_hi);
  std::int64_t full = a.symmetric_reflect && !a.points.empty()
                          ? std::max(std::abs(a.points.front()), std::abs(a.points.back()))
                          : 0;
  std::int64_t reach = std::max(span, full) + span;
  std::vector<std::int64_t> all = a.in_range(-reach, reach + 1);
  std::vector<std::int64_t> centers = all;
  if (centers.size() > 1002) {
    std::mt19937_64 rng(0x6d61737364696dULL);  // fixed sampling seed
    std::vector<std::int64_t> sampled = {all.front(), all.back()};
    std::uniform_int_distribution<std::size_t> pick(0, all.size() - 1);
    for (int i = 0; i < 1000; ++i) sampled.push_back(all[pick(rng)]);
    std::sort(sampled.begin(), sampled.end());
    sampled.erase(std::unique(sampled.begin(), sampled.end()), sampled.end());
    centers = std::move(sampled);
  }
  for (std::int64_t n = n_lo; n <= n_hi; ++n) {
    std::int64_t rn = detail::ipow_checked(r, n);
    double scale = std::pow(static_cast<double>(rn), alpha);
    std::int64_t worst = std::numeric_limits<std::int64_t>::max();
    for (std::int64_t x : centers) {
      auto lo = std::lower_bound(all.begin(), all.end(), x - rn);
      auto hi = std::lower_bound(all.begin(), all.end(), x + rn);
      worst = std::min<std::int64_t>(worst, hi - lo);
    }
    if (centers.empty()) worst = 0;
    rep.lower_ratios.push_back(static_cast<double>(worst) / scale);
    rep.upper_ratios.push_back(static_cast<double>(a.count_in(-rn, rn)) / scale);
  }
  detail::finish_growth_report(rep);
  return rep;
}

}  // namespace seqlab
