#pragma once
//---------------------------------------------------------------------------
// grouping.hpp - multiscale clustering of the support of a sparse binary
// window.  The points (positions of ones) first form singletons; maximal
// runs of clusters at small gaps merge level by level, with the gap
// threshold growing geometrically (M^level) and eligibility requiring
// mass >= level.  Merged spans absorb interior "dust" clusters; masses add
// with a deficit of (level-1) per extra constituent.  On top of the forest:
// the chi statistic (largest mass of a cluster starting suspiciously close
// to the origin), the collapsed weighted word psi (one entry of weight
// = mass per cluster, spans squeezed out), thinning (deleting intra-span
// zeros so each cluster becomes one solid run), and genealogy identities.
//---------------------------------------------------------------------------

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "seqlab/binary_seq.hpp"
#include "seqlab/util.hpp"
#include "seqlab/weighted_word.hpp"

namespace seqlab {

namespace detail {
// min(M^e, 2^62) — gap thresholds saturate far beyond any window length.
inline std::int64_t pow_sat(std::int64_t M, std::int64_t e) {
  const std::int64_t cap = std::int64_t{1} << 62;
  std::int64_t r = 1;
  for (std::int64_t t = 0; t < e; ++t) {
    if (r > cap / M) return cap;
    r *= M;
  }
  return r;
}
}  // namespace detail

struct ClusterNode {
  std::int64_t id = -1;
  std::int64_t level = 0;
  std::int64_t mass = 1;
  std::int64_t alpha = 0;  // leftmost member
  std::int64_t omega = 0;  // rightmost member
  std::int64_t gi_lo = 0, gi_hi = 0;        // member range: indices into gamma
  std::vector<std::int64_t> constituents;   // child ids; empty for level <= 0
  bool provisional = false;

  std::int64_t diam() const { return omega - alpha; }
  std::int64_t member_count() const { return gi_hi - gi_lo + 1; }
};

struct ClusterForest {
  std::vector<std::int64_t> gamma;                 // sorted one-positions
  std::vector<ClusterNode> nodes;                  // arena
  std::vector<std::vector<std::int64_t>> levels;   // levels[k] = partition C_k
  std::vector<std::int64_t> final_partition;       // maximal clusters, ordered
  std::int64_t M = 3;
  std::int64_t window_length = 0;

  const ClusterNode& node(std::int64_t id) const {
    return nodes[static_cast<std::size_t>(id)];
  }
  std::vector<std::int64_t> members_of(std::int64_t id) const {
    const ClusterNode& c = node(id);
    return {gamma.begin() + static_cast<std::ptrdiff_t>(c.gi_lo),
            gamma.begin() + static_cast<std::ptrdiff_t>(c.gi_hi + 1)};
  }
};

// d(C, C') for span-ordered disjoint clusters: gap from C's right end to
// C''s left end.
inline std::int64_t cluster_distance(const ClusterNode& a,
                                     const ClusterNode& b) {
  return b.alpha - a.omega;
}

inline ClusterForest build_forest(const Bits& xi, std::int64_t M) {
  if (M < 3) throw usage_error("build_forest: M must be >= 3");
  ClusterForest f;
  f.M = M;
  f.window_length = static_cast<std::int64_t>(xi.size());
  for (std::size_t i = 0; i < xi.size(); ++i)
    if (xi[i]) f.gamma.push_back(static_cast<std::int64_t>(i + 1));

  std::vector<std::int64_t> cur;
  for (std::size_t gi = 0; gi < f.gamma.size(); ++gi) {
    ClusterNode n;
    n.id = static_cast<std::int64_t>(f.nodes.size());
    n.level = 0;
    n.mass = 1;
    n.alpha = n.omega = f.gamma[gi];
    n.gi_lo = n.gi_hi = static_cast<std::int64_t>(gi);
    f.nodes.push_back(n);
    cur.push_back(n.id);
  }
  f.levels.push_back(cur);

  std::int64_t max_mass = f.gamma.empty() ? 0 : 1;
  for (std::int64_t lvl = 1; lvl <= max_mass || lvl == 1; ++lvl) {
    std::int64_t threshold = detail::pow_sat(M, lvl);
    // eligible subsequence: clusters of mass >= lvl, in span order
    std::vector<std::size_t> elig;
    for (std::size_t i = 0; i < cur.size(); ++i)
      if (f.node(cur[i]).mass >= lvl) elig.push_back(i);
    if (elig.size() < 2) break;  // no level can merge anything anymore

    std::vector<std::int64_t> next;
    std::size_t consumed_upto = 0;  // index into cur
    bool merged_any = false;
    for (std::size_t e = 0; e < elig.size();) {
      // maximal run of eligible clusters at successive gaps < threshold
      std::size_t e2 = e;
      while (e2 + 1 < elig.size() &&
             cluster_distance(f.node(cur[elig[e2]]),
                              f.node(cur[elig[e2 + 1]])) < threshold)
        ++e2;
      if (e2 == e) {
        ++e;
        continue;
      }
      // emit everything before the run untouched
      while (consumed_upto < elig[e]) next.push_back(cur[consumed_upto++]);
      ClusterNode n;
      n.id = static_cast<std::int64_t>(f.nodes.size());
      n.level = lvl;
      std::int64_t sum = 0;
      for (std::size_t t = e; t <= e2; ++t) {
        n.constituents.push_back(cur[elig[t]]);
        sum += f.node(cur[elig[t]]).mass;
      }
      std::int64_t nr = static_cast<std::int64_t>(e2 - e + 1);
      n.mass = sum - (lvl - 1) * (nr - 1);
      const ClusterNode& first = f.node(cur[elig[e]]);
      const ClusterNode& last = f.node(cur[elig[e2]]);
      n.alpha = first.alpha;
      n.omega = last.omega;
      n.gi_lo = first.gi_lo;  // span absorbs interior dust members
      n.gi_hi = last.gi_hi;
      max_mass = std::max(max_mass, n.mass);
      f.nodes.push_back(n);
      next.push_back(n.id);
      merged_any = true;
      consumed_upto = elig[e2] + 1;  // dust inside the span is absorbed
      e = e2 + 1;
    }
    while (consumed_upto < cur.size()) next.push_back(cur[consumed_upto++]);
    cur = std::move(next);
    f.levels.push_back(cur);
    (void)merged_any;
  }
  f.final_partition = cur;

  // provisional marking: the completion margin may reach past the window,
  // directly or through a chain of clusters to the right
  std::int64_t nearest_prov_alpha = -1;
  for (std::size_t i = f.final_partition.size(); i-- > 0;) {
    ClusterNode& c = f.nodes[static_cast<std::size_t>(f.final_partition[i])];
    bool prov = c.omega + detail::pow_sat(M, c.mass + 1) > f.window_length;
    if (!prov && nearest_prov_alpha >= 0 &&
        nearest_prov_alpha - c.omega < detail::pow_sat(M, c.mass + 1))
      prov = true;
    c.provisional = prov;
    if (prov) nearest_prov_alpha = c.alpha;
  }
  return f;
}

//---------------------------------------------------------------------------
// Forest statistics.
//---------------------------------------------------------------------------
inline std::int64_t kappa(const ClusterForest& f, std::int64_t x) {
  for (std::int64_t id : f.final_partition) {
    const ClusterNode& c = f.node(id);
    if (c.alpha <= x && x <= c.omega) {
      if (!std::binary_search(f.gamma.begin() + static_cast<std::ptrdiff_t>(c.gi_lo),
                              f.gamma.begin() + static_cast<std::ptrdiff_t>(c.gi_hi + 1),
                              x))
        throw usage_error("kappa: x is not a point of the window's support");
      return c.level;
    }
  }
  throw usage_error("kappa: x is not a point of the window's support");
}

struct ChiResult {
  bool determined = true;
  std::int64_t chi = 0;
};

// Largest mass of a non-provisional cluster starting closer to the origin
// than M^mass; not determined when a provisional cluster is itself close
// enough that one more merge could create such a violation.
inline ChiResult chi(const ClusterForest& f) {
  ChiResult r;
  for (std::int64_t id : f.final_partition) {
    const ClusterNode& c = f.node(id);
    if (c.provisional) {
      if (c.alpha < detail::pow_sat(f.M, c.mass + 1)) r.determined = false;
      continue;
    }
    if (c.alpha < detail::pow_sat(f.M, c.mass)) r.chi = std::max(r.chi, c.mass);
  }
  return r;
}

// Collapsed weighted word: the j-th stable cluster contributes one entry of
// weight mass at index alpha_j - sum of earlier stable diameters; the word
// stops just before the first provisional cluster (or the window end).
inline WeightedWord psi_from_xi(const ClusterForest& f) {
  WeightedWord out;
  std::int64_t shrink = 0;
  std::int64_t len = f.window_length;
  std::vector<std::pair<std::int64_t, std::int64_t>> entries;  // (index, mass)
  for (std::int64_t id : f.final_partition) {
    const ClusterNode& c = f.node(id);
    if (c.provisional) {
      len = c.alpha - 1 - shrink;
      break;
    }
    entries.emplace_back(c.alpha - shrink, c.mass);
    shrink += c.diam();
    len = f.window_length - shrink;
  }
  if (len < 0) len = 0;
  out.w.assign(static_cast<std::size_t>(len), 0);
  for (auto [idx, mass] : entries) {
    SEQLAB_CHECK(idx >= 1 && idx <= len, "psi_from_xi: entry beyond the stable region");
    out.w[static_cast<std::size_t>(idx - 1)] = mass;
  }
  require_valid(out, "psi_from_xi");
  return out;
}

// Positions (ascending, in original coordinates) of every zero lying inside
// some maximal cluster's span: the gaps that thinning removes.
inline std::vector<std::int64_t> thin_deletions(const ClusterForest& f) {
  std::vector<std::int64_t> del;
  for (std::int64_t id : f.final_partition) {
    const ClusterNode& c = f.node(id);
    std::int64_t gi = c.gi_lo;
    for (std::int64_t pos = c.alpha; pos <= c.omega; ++pos) {
      if (gi <= c.gi_hi && f.gamma[static_cast<std::size_t>(gi)] == pos)
        ++gi;
      else
        del.push_back(pos);
    }
  }
  return del;
}

// Deletes the intra-span zeros, collapsing each cluster into a solid run.
inline Bits thin_xi(const Bits& xi, const ClusterForest& f) {
  ChiResult c = chi(f);
  if (!c.determined || c.chi != 0)
    throw usage_error("thin_xi: requires a determined chi of zero");
  std::vector<std::int64_t> del = thin_deletions(f);
  Bits out;
  out.reserve(xi.size() - del.size());
  std::size_t di = 0;
  for (std::size_t i = 0; i < xi.size(); ++i) {
    std::int64_t pos = static_cast<std::int64_t>(i + 1);
    if (di < del.size() && del[di] == pos) {
      SEQLAB_CHECK(xi[i] == 0, "thin_xi: deletion list hit a one");
      ++di;
      continue;
    }
    out.push_back(xi[i]);
  }
  return out;
}

// psi <=_M zeta: identical zero patterns, and wherever psi holds k >= 1 the
// other word lies in [k, 3 M^{k-1}].  Checked over the common window.
inline bool preceq_M(const WeightedWord& psi, const WeightedWord& zeta,
                     std::int64_t M) {
  if (M < 3) throw usage_error("preceq_M: M must be >= 3");
  std::size_t n = std::min(psi.w.size(), zeta.w.size());
  for (std::size_t i = 0; i < n; ++i) {
    std::int64_t k = psi.w[i], z = zeta.w[i];
    if ((k == 0) != (z == 0)) return false;
    if (k == 0) continue;
    if (z < k) return false;
    if (z > 3 * detail::pow_sat(M, k - 1)) return false;
  }
  return true;
}

//---------------------------------------------------------------------------
// Genealogy.
//---------------------------------------------------------------------------
struct GenealogyTree {
  std::int64_t root_mass = 0;
  std::vector<std::int64_t> leaf_masses;     // clusters of level <= 1
  std::vector<std::int64_t> branch_levels;   // internal nodes, level >= 2
  std::vector<std::int64_t> branch_degrees;  // their constituent counts

  // sum of leaf masses minus the per-branch deficits returns the root mass
  std::int64_t mass_identity_lhs() const {
    std::int64_t s = 0;
    for (std::int64_t m : leaf_masses) s += m;
    for (std::size_t j = 0; j < branch_levels.size(); ++j)
      s -= (branch_degrees[j] - 1) * (branch_levels[j] - 1);
    return s;
  }
  // branching degrees tie to the leaf count
  bool degree_identity() const {
    std::int64_t s = 0;
    for (std::int64_t d : branch_degrees) s += d - 1;
    return s == static_cast<std::int64_t>(leaf_masses.size()) - 1;
  }
};

inline GenealogyTree genealogy(const ClusterForest& f, std::int64_t id) {
  GenealogyTree t;
  const ClusterNode& root = f.node(id);
  t.root_mass = root.mass;
  std::vector<std::int64_t> stack{id};
  while (!stack.empty()) {
    const ClusterNode& c = f.node(stack.back());
    stack.pop_back();
    if (c.level <= 1) {
      t.leaf_masses.push_back(c.mass);
      continue;
    }
    SEQLAB_CHECK(c.constituents.size() >= 2, "genealogy: branch with < 2 children");
    t.branch_levels.push_back(c.level);
    t.branch_degrees.push_back(static_cast<std::int64_t>(c.constituents.size()));
    for (std::int64_t ch : c.constituents) {
      SEQLAB_CHECK(f.node(ch).level < c.level, "genealogy: levels must decrease");
      stack.push_back(ch);
    }
  }
  return t;
}

inline Bits zero_prefix(Bits xi, std::int64_t n) {
  if (n < 0) throw usage_error("zero_prefix: n must be >= 0");
  std::size_t upto = std::min(static_cast<std::size_t>(n), xi.size());
  std::fill(xi.begin(), xi.begin() + static_cast<std::ptrdiff_t>(upto), 0);
  return xi;
}

//---------------------------------------------------------------------------
// Structural audit used by tests and diagnostics.
//---------------------------------------------------------------------------
inline std::optional<std::string> forest_invariant_violation(
    const ClusterForest& f) {
  auto fail = [](std::string s) { return std::optional<std::string>(std::move(s)); };
  for (const auto& level : f.levels) {
    std::int64_t expect_gi = 0;
    std::int64_t prev_omega = -1;
    for (std::int64_t id : level) {
      const ClusterNode& c = f.node(id);
      if (c.gi_lo != expect_gi) return fail("partition skips or repeats support points");
      expect_gi = c.gi_hi + 1;
      if (c.alpha <= prev_omega) return fail("spans out of order or overlapping");
      prev_omega = c.omega;
    }
    if (expect_gi != static_cast<std::int64_t>(f.gamma.size()))
      return fail("partition does not cover the support");
  }
  for (const ClusterNode& c : f.nodes) {
    if (c.mass < c.level + 1) return fail("mass below level + 1");
    if (c.alpha != f.gamma[static_cast<std::size_t>(c.gi_lo)] ||
        c.omega != f.gamma[static_cast<std::size_t>(c.gi_hi)])
      return fail("span endpoints disagree with members");
    if (c.diam() >= 3 * detail::pow_sat(f.M, c.mass - 1))
      return fail("diameter reaches 3 M^{mass-1}");
    for (std::int64_t ch : c.constituents) {
      if (f.node(ch).mass < c.level) return fail("constituent mass below level");
      if (f.node(ch).mass >= c.mass) return fail("merge failed to increase mass");
    }
  }
  // separation of stable maximal clusters: every pair must be at least
  // M^{min mass} apart, checked per mass level over consecutive members of
  // each mass->=m subsequence (gaps only accumulate rightward)
  std::int64_t top_mass = 0;
  for (std::int64_t id : f.final_partition)
    if (!f.node(id).provisional) top_mass = std::max(top_mass, f.node(id).mass);
  for (std::int64_t m = 1; m <= top_mass; ++m) {
    std::int64_t need = detail::pow_sat(f.M, m);
    const ClusterNode* prev = nullptr;
    for (std::int64_t id : f.final_partition) {
      const ClusterNode& c = f.node(id);
      if (c.provisional || c.mass < m) continue;
      if (prev && cluster_distance(*prev, c) < need)
        return fail("stable clusters too close");
      prev = &c;
    }
  }
  return std::nullopt;
}

}  // namespace seqlab
