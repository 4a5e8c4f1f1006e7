#pragma once
//---------------------------------------------------------------------------
// percolation.hpp - dependent oriented percolation on the quadrant.  A
// window pairs an x-axis weighted word `zeta` with a y-axis weighted word
// `psi`; vertex (x, row) with x, row >= 1 is open iff zeta[x] >= psi[row],
// the origin is open, and the rest of both axes is closed.  Paths move up
// by vertical or northeast-diagonal steps; a path is permitted when the
// x-coordinates of its heavy vertices (rows with positive psi weight, plus
// the origin) strictly increase.
//
// Reachability is computed only at heavy rows plus the requested final row:
// the all-open stretches in between collapse into interval arithmetic.  On
// heavy rows reachable x-sets are stored as intervals *filtered* by the
// row's openness predicate, which keeps hierarchical windows with millions
// of rows tractable; public accessors materialize exact interval lists.
//---------------------------------------------------------------------------

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "seqlab/hierarchy.hpp"
#include "seqlab/schedule.hpp"
#include "seqlab/util.hpp"
#include "seqlab/weighted_word.hpp"

namespace seqlab {

//---------------------------------------------------------------------------
// x-axis label sources.
//---------------------------------------------------------------------------
class ZetaSource {
 public:
  virtual ~ZetaSource() = default;
  virtual std::int64_t width() const = 0;
  virtual std::int64_t at(std::int64_t x) const = 0;  // 1 <= x <= width
  // Positions x in [lo, hi] with value >= w ("qualifying"); w >= 1.
  virtual std::int64_t first_geq(std::int64_t lo, std::int64_t hi,
                                 std::int64_t w) const = 0;
  virtual std::int64_t last_geq(std::int64_t lo, std::int64_t hi,
                                std::int64_t w) const = 0;
  virtual std::int64_t next_geq(std::int64_t x, std::int64_t hi,
                                std::int64_t w) const = 0;  // smallest > x
  virtual std::int64_t count_geq(std::int64_t lo, std::int64_t hi,
                                 std::int64_t w) const = 0;
  // Largest difference between consecutive qualifying positions in [lo, hi]
  // (1 when fewer than two such positions exist).
  virtual std::int64_t max_gap_geq(std::int64_t lo, std::int64_t hi,
                                   std::int64_t w) const = 0;
  // (spec, shift) when this source is a shifted hierarchical sequence.
  virtual std::optional<std::pair<HierarchySpec, std::int64_t>> hierarchical()
      const {
    return std::nullopt;
  }
};

class ExplicitZeta final : public ZetaSource {
 public:
  explicit ExplicitZeta(Weights v) : v_(std::move(v)) {}

  std::int64_t width() const override {
    return static_cast<std::int64_t>(v_.size());
  }
  std::int64_t at(std::int64_t x) const override {
    SEQLAB_CHECK(x >= 1 && x <= width(), "ExplicitZeta: x out of range");
    return v_[static_cast<std::size_t>(x - 1)];
  }
  std::int64_t first_geq(std::int64_t lo, std::int64_t hi,
                         std::int64_t w) const override {
    lo = std::max<std::int64_t>(lo, 1);
    hi = std::min(hi, width());
    for (std::int64_t x = lo; x <= hi; ++x)
      if (v_[static_cast<std::size_t>(x - 1)] >= w) return x;
    return -1;
  }
  std::int64_t last_geq(std::int64_t lo, std::int64_t hi,
                        std::int64_t w) const override {
    lo = std::max<std::int64_t>(lo, 1);
    hi = std::min(hi, width());
    for (std::int64_t x = hi; x >= lo; --x)
      if (v_[static_cast<std::size_t>(x - 1)] >= w) return x;
    return -1;
  }
  std::int64_t next_geq(std::int64_t x, std::int64_t hi,
                        std::int64_t w) const override {
    return first_geq(x + 1, hi, w);
  }
  std::int64_t count_geq(std::int64_t lo, std::int64_t hi,
                         std::int64_t w) const override {
    lo = std::max<std::int64_t>(lo, 1);
    hi = std::min(hi, width());
    std::int64_t c = 0;
    for (std::int64_t x = lo; x <= hi; ++x)
      if (v_[static_cast<std::size_t>(x - 1)] >= w) ++c;
    return c;
  }
  std::int64_t max_gap_geq(std::int64_t lo, std::int64_t hi,
                           std::int64_t w) const override {
    std::int64_t prev = first_geq(lo, hi, w);
    if (prev < 0) return 1;
    std::int64_t gap = 1;
    for (std::int64_t x = next_geq(prev, hi, w); x >= 0;
         x = next_geq(prev, hi, w)) {
      gap = std::max(gap, x - prev);
      prev = x;
    }
    return gap;
  }

 private:
  Weights v_;
};

// Window of a hierarchical sequence shifted by `shift` positions: the value
// at x is zeta_at(spec, shift + x).  Qualifying positions for weight w >= 1
// are exactly x with L^w | (shift + x): an arithmetic progression.
class HierarchicalZeta final : public ZetaSource {
 public:
  HierarchicalZeta(HierarchySpec spec, std::int64_t shift, std::int64_t width)
      : spec_(spec), shift_(shift), width_(width) {
    if (shift < 0 || width < 1) throw usage_error("HierarchicalZeta: bad arguments");
  }

  std::int64_t width() const override { return width_; }
  std::int64_t at(std::int64_t x) const override {
    SEQLAB_CHECK(x >= 1 && x <= width_, "HierarchicalZeta: x out of range");
    return zeta_at(spec_, shift_ + x);
  }
  std::int64_t first_geq(std::int64_t lo, std::int64_t hi,
                         std::int64_t w) const override {
    lo = std::max<std::int64_t>(lo, 1);
    hi = std::min(hi, width_);
    if (lo > hi) return -1;
    std::int64_t s = stride(w);
    if (s < 0) return -1;  // stride beyond any representable position
    std::int64_t r = ((-(shift_ % s)) % s + s) % s;
    std::int64_t x = lo + ((r - lo) % s + s) % s;
    return x <= hi ? x : -1;
  }
  std::int64_t last_geq(std::int64_t lo, std::int64_t hi,
                        std::int64_t w) const override {
    std::int64_t f = first_geq(lo, hi, w);
    if (f < 0) return -1;
    std::int64_t s = stride(w);
    hi = std::min(hi, width_);
    return f + ((hi - f) / s) * s;
  }
  std::int64_t next_geq(std::int64_t x, std::int64_t hi,
                        std::int64_t w) const override {
    return first_geq(x + 1, hi, w);
  }
  std::int64_t count_geq(std::int64_t lo, std::int64_t hi,
                         std::int64_t w) const override {
    std::int64_t f = first_geq(lo, hi, w);
    if (f < 0) return 0;
    return (std::min(hi, width_) - f) / stride(w) + 1;
  }
  std::int64_t max_gap_geq(std::int64_t lo, std::int64_t hi,
                           std::int64_t w) const override {
    (void)lo;
    (void)hi;
    std::int64_t s = stride(w);
    return s < 0 ? 1 : s;
  }
  std::optional<std::pair<HierarchySpec, std::int64_t>> hierarchical()
      const override {
    return std::make_pair(spec_, shift_);
  }

 private:
  // L^w, or -1 when it exceeds every position in the window.
  std::int64_t stride(std::int64_t w) const {
    SEQLAB_CHECK(w >= 1, "HierarchicalZeta: weight must be >= 1");
    std::int64_t s = 1;
    for (std::int64_t t = 0; t < w; ++t) {
      if (s > (shift_ + width_) / spec_.L) return -1;
      s *= spec_.L;
    }
    return s;
  }

  HierarchySpec spec_;
  std::int64_t shift_;
  std::int64_t width_;
};

//---------------------------------------------------------------------------
// The window itself.
//---------------------------------------------------------------------------
struct Vertex {
  std::int64_t x = 0;
  std::int64_t row = 0;
  friend bool operator==(const Vertex&, const Vertex&) = default;
  friend auto operator<=>(const Vertex&, const Vertex&) = default;
};

struct PercWindow {
  std::shared_ptr<const ZetaSource> zeta;
  WeightedWord psi;
  std::int64_t M = 0;  // spacing parameter used by the bound checkers

  std::int64_t width() const { return zeta->width(); }
  std::int64_t height() const { return psi.length(); }

  std::int64_t psi_at(std::int64_t row) const {
    SEQLAB_CHECK(row >= 1 && row <= height(), "PercWindow: row out of range");
    return psi.w[static_cast<std::size_t>(row - 1)];
  }

  std::vector<std::int64_t> heavy_rows(std::int64_t depth) const {
    std::vector<std::int64_t> out;
    depth = std::min(depth, height());
    for (std::int64_t r = 1; r <= depth; ++r)
      if (psi.w[static_cast<std::size_t>(r - 1)] > 0) out.push_back(r);
    return out;
  }
};

inline PercWindow make_perc_window(WeightedWord zeta, WeightedWord psi,
                                   std::int64_t M = 0) {
  require_valid(zeta, "make_perc_window");
  require_valid(psi, "make_perc_window");
  PercWindow pw;
  pw.zeta = std::make_shared<ExplicitZeta>(std::move(zeta.w));
  pw.psi = std::move(psi);
  pw.M = M;
  return pw;
}

inline PercWindow make_hier_perc_window(const HierarchySpec& spec,
                                        std::int64_t shift, std::int64_t width,
                                        WeightedWord psi) {
  require_valid(psi, "make_hier_perc_window");
  PercWindow pw;
  pw.zeta = std::make_shared<HierarchicalZeta>(spec, shift, width);
  pw.psi = std::move(psi);
  pw.M = spec.M;
  return pw;
}

inline bool is_open(const PercWindow& pw, Vertex v) {
  if (v.x < 0 || v.x > pw.width() || v.row < 0 || v.row > pw.height())
    throw usage_error("is_open: vertex outside the window");
  if (v.x == 0 && v.row == 0) return true;
  if (v.x == 0 || v.row == 0) return false;
  return pw.zeta->at(v.x) >= pw.psi_at(v.row);
}

inline bool is_heavy(const PercWindow& pw, Vertex v) {
  if (v.x < 0 || v.x > pw.width() || v.row < 0 || v.row > pw.height())
    throw usage_error("is_heavy: vertex outside the window");
  return v.row == 0 || pw.psi_at(v.row) > 0;
}

//---------------------------------------------------------------------------
// Reachability.
//---------------------------------------------------------------------------

// Reachable x-set at one checkpoint row.  When weight >= 1 the stored
// intervals are filtered: the reachable positions are exactly the x in the
// intervals with zeta[x] >= weight, and interval endpoints qualify.  A
// weight of -1 marks the literal origin row.
struct FilteredReach {
  std::int64_t row = 0;
  std::int64_t weight = -1;
  std::vector<std::pair<std::int64_t, std::int64_t>> ivs;
};

namespace detail {

inline std::vector<std::pair<std::int64_t, std::int64_t>> merge_intervals(
    std::vector<std::pair<std::int64_t, std::int64_t>> iv) {
  std::sort(iv.begin(), iv.end());
  std::vector<std::pair<std::int64_t, std::int64_t>> out;
  for (auto [a, b] : iv) {
    if (!out.empty() && a <= out.back().second + 1)
      out.back().second = std::max(out.back().second, b);
    else
      out.emplace_back(a, b);
  }
  return out;
}

// One DP transition: candidates flow from `cur` up a gap of g rows into the
// checkpoint at `row` with openness threshold `weight`.  Strict transitions
// (into heavy rows) advance x by 1..g; the final non-heavy row allows 0..g.
inline FilteredReach reach_step(const PercWindow& pw, const FilteredReach& cur,
                                std::int64_t row, std::int64_t weight) {
  const ZetaSource& src = *pw.zeta;
  std::int64_t g = row - cur.row;
  SEQLAB_CHECK(g >= 1, "reach_step: checkpoint rows must increase");
  bool strict = weight > 0;
  std::int64_t lo_off = strict ? 1 : 0;
  std::vector<std::pair<std::int64_t, std::int64_t>> cand;
  for (auto [a, b] : cur.ivs) {
    std::int64_t maxgap =
        cur.weight >= 1 ? src.max_gap_geq(a, b, cur.weight) : 1;
    if (maxgap <= g) {
      cand.emplace_back(a + lo_off, b + g);
    } else {
      for (std::int64_t x = a; x >= 0 && x <= b;
           x = src.next_geq(x, b, cur.weight)) {
        cand.emplace_back(x + lo_off, x + g);
        SEQLAB_CHECK(cand.size() < 500000, "reach_step: window too fragmented");
      }
    }
  }
  cand = merge_intervals(std::move(cand));
  FilteredReach next;
  next.row = row;
  next.weight = weight;
  for (auto [a, b] : cand) {
    a = std::max<std::int64_t>(a, 1);
    b = std::min(b, std::min(pw.width(), row));  // orientation: x <= row
    if (a > b) continue;
    if (weight >= 1) {
      std::int64_t f = src.first_geq(a, b, weight);
      if (f < 0) continue;
      next.ivs.emplace_back(f, src.last_geq(a, b, weight));
    } else {
      next.ivs.emplace_back(a, b);
    }
  }
  return next;
}

}  // namespace detail

// Runs the checkpoint DP from a given starting reach set up to `depth`.
// Checkpoints are the heavy rows after the start plus the final row.
inline std::vector<FilteredReach> compute_reach_from(const PercWindow& pw,
                                                     FilteredReach start,
                                                     std::int64_t depth) {
  if (depth < start.row || depth > pw.height())
    throw usage_error("compute_reach_from: bad depth");
  std::vector<FilteredReach> out;
  out.push_back(std::move(start));
  std::vector<std::int64_t> rows;
  for (std::int64_t r : pw.heavy_rows(depth))
    if (r > out.front().row) rows.push_back(r);
  if (rows.empty() || rows.back() != depth) rows.push_back(depth);
  for (std::int64_t r : rows) {
    if (r == out.back().row) continue;  // depth == start row
    std::int64_t w = pw.psi_at(r) > 0 ? pw.psi_at(r) : 0;
    out.push_back(detail::reach_step(pw, out.back(), r, w));
  }
  return out;
}

inline std::vector<FilteredReach> compute_reach(const PercWindow& pw,
                                                std::int64_t depth) {
  FilteredReach origin;
  origin.row = 0;
  origin.weight = -1;
  origin.ivs = {{0, 0}};
  return compute_reach_from(pw, std::move(origin), depth);
}

struct ReachSet {
  std::int64_t row = 0;
  std::vector<std::pair<std::int64_t, std::int64_t>> intervals;
};

// Exact interval list of one filtered reach set.
inline ReachSet materialize_reach(const PercWindow& pw, const FilteredReach& f,
                                  std::size_t cap = 200000) {
  ReachSet out;
  out.row = f.row;
  if (f.weight < 1) {
    out.intervals = f.ivs;
    return out;
  }
  const ZetaSource& src = *pw.zeta;
  for (auto [a, b] : f.ivs) {
    std::int64_t x = src.first_geq(a, b, f.weight);
    while (x >= 0) {
      if (!out.intervals.empty() && x == out.intervals.back().second + 1)
        ++out.intervals.back().second;
      else
        out.intervals.emplace_back(x, x);
      if (out.intervals.size() > cap)
        throw usage_error("materialize_reach: too many intervals");
      x = src.next_geq(x, b, f.weight);
    }
  }
  return out;
}

// Reach sets at the origin, every heavy row up to `depth`, and the final row.
inline std::vector<ReachSet> reach_rows(const PercWindow& pw,
                                        std::int64_t depth = -1) {
  if (depth < 0) depth = pw.height();
  std::vector<ReachSet> out;
  for (const auto& f : compute_reach(pw, depth))
    out.push_back(materialize_reach(pw, f));
  return out;
}

//---------------------------------------------------------------------------
// Paths.
//---------------------------------------------------------------------------
struct PermittedPath {
  std::vector<Vertex> vertices;          // origin first, one vertex per row
  std::vector<std::size_t> heavy_marks;  // indices of heavy vertices

  std::int64_t depth() const {
    return vertices.empty() ? -1 : vertices.back().row;
  }
};

struct PathCheck {
  bool ok = true;
  std::string reason;
};

inline PathCheck is_permitted(const PercWindow& pw, const PermittedPath& path) {
  PathCheck out;
  auto fail = [&](std::string why) {
    out.ok = false;
    out.reason = std::move(why);
    return out;
  };
  if (path.vertices.empty() || !(path.vertices.front() == Vertex{0, 0}))
    return fail("path must start at the origin");
  std::int64_t last_heavy_x = -1;
  for (std::size_t i = 0; i < path.vertices.size(); ++i) {
    Vertex v = path.vertices[i];
    if (i > 0) {
      Vertex u = path.vertices[i - 1];
      if (v.row != u.row + 1 || (v.x != u.x && v.x != u.x + 1))
        return fail("steps must be vertical or northeast-diagonal");
    }
    if (!is_open(pw, v)) return fail("path visits a closed vertex");
    if (is_heavy(pw, v)) {
      if (v.x <= last_heavy_x)
        return fail("heavy x-coordinates must strictly increase");
      last_heavy_x = v.x;
    }
  }
  return out;
}

// Fills rows between anchor vertices: diagonals first, then verticals.
namespace detail {
inline void interpolate(std::vector<Vertex>& out, Vertex from, Vertex to) {
  SEQLAB_CHECK(to.row > from.row && to.x >= from.x &&
                   to.x - from.x <= to.row - from.row,
               "interpolate: anchors not connectable");
  Vertex cur = from;
  while (cur.row < to.row) {
    if (cur.x < to.x)
      cur = {cur.x + 1, cur.row + 1};
    else
      cur = {cur.x, cur.row + 1};
    out.push_back(cur);
  }
}
}  // namespace detail

// Finds one open permitted path from the origin to row `depth`, or nullopt.
// Success requires a nonempty reach set at the last heavy row <= depth; the
// all-open rows above it are always traversable.  Tie-break: the leftmost
// reachable x at each heavy row, chosen scanning from the top down.
inline std::optional<PermittedPath> find_permitted_path(const PercWindow& pw,
                                                        std::int64_t depth) {
  if (depth < 0 || depth > pw.height())
    throw usage_error("find_permitted_path: depth out of range");
  if (pw.width() < 1 && depth > 0) return std::nullopt;
  auto reach = compute_reach(pw, depth);
  // checkpoints: reach[0] = origin; heavy rows; final row (unless heavy).
  // A nonempty final reach is equivalent to a nonempty reach at the last
  // heavy row, because the all-open rows above it extend any survivor.
  std::size_t n = reach.size();
  if (reach.back().ivs.empty()) return std::nullopt;
  // choose anchors: leftmost at the top checkpoint, then leftmost
  // compatible predecessor at each heavy checkpoint below
  std::vector<Vertex> anchors(n);
  const ZetaSource& src = *pw.zeta;
  {
    const FilteredReach& top = reach[n - 1];
    anchors[n - 1] = {top.ivs.front().first, top.row};
  }
  for (std::size_t i = n - 1; i-- > 0;) {
    const FilteredReach& cur = reach[i];
    Vertex above = anchors[i + 1];
    std::int64_t g = reach[i + 1].row - cur.row;
    bool strict = reach[i + 1].weight > 0;
    std::int64_t hi_x = strict ? above.x - 1 : above.x;
    std::int64_t lo_x = above.x - g;
    std::int64_t chosen = -1;
    for (auto [a, b] : cur.ivs) {
      std::int64_t lo = std::max(a, lo_x);
      std::int64_t hi = std::min(b, hi_x);
      if (lo > hi) continue;
      std::int64_t f = cur.weight >= 1 ? src.first_geq(lo, hi, cur.weight)
                       : cur.weight == -1 ? (lo <= 0 && 0 <= hi ? 0 : -1)
                                          : lo;
      if (f >= 0) {
        chosen = f;
        break;
      }
    }
    SEQLAB_CHECK(chosen >= 0, "find_permitted_path: backtrack found no predecessor");
    anchors[i] = {chosen, cur.row};
  }
  PermittedPath path;
  path.vertices.push_back({0, 0});
  for (std::size_t i = 1; i < n; ++i)
    detail::interpolate(path.vertices, anchors[i - 1], anchors[i]);
  for (std::size_t i = 0; i < path.vertices.size(); ++i)
    if (is_heavy(pw, path.vertices[i])) path.heavy_marks.push_back(i);
  return path;
}

//---------------------------------------------------------------------------
// Witness extraction.  Walking the path's heavy vertices (x_k, l_k) bottom
// up, the schedule erases every positive zeta entry strictly between
// consecutive heavy x's, reduces zeta[x_k] to psi[l_k], and deletes on the
// psi side the zeros that slide psi[l_k] into the collapsed position of x_k.
// Replaying it makes the words agree on their first x_K - sum(m_k) entries,
// where m_k counts the erased in-between entries.
//---------------------------------------------------------------------------
inline WitnessSchedule extract_witness(const PermittedPath& path,
                                       const PercWindow& pw) {
  PathCheck chk = is_permitted(pw, path);
  if (!chk.ok) throw usage_error("extract_witness: malformed path: " + chk.reason);
  const ZetaSource& src = *pw.zeta;
  WitnessSchedule out;
  std::int64_t removed = 0;   // total in-between entries erased so far
  std::int64_t prev_x = 0;    // x_{k-1}
  std::int64_t prev_row = 0;  // l_{k-1}
  std::int64_t prefix = 0;    // P_{k-1} = x_{k-1} - removed-before-k
  for (std::size_t mark : path.heavy_marks) {
    Vertex v = path.vertices[mark];
    if (v.row == 0) continue;  // origin
    std::int64_t value = src.at(v.x);
    std::int64_t weight = pw.psi_at(v.row);
    SEQLAB_CHECK(value >= weight, "extract_witness: heavy vertex not open");
    // erase the positive entries strictly between prev_x and x_k
    std::int64_t m_k = 0;
    for (std::int64_t j = src.next_geq(prev_x, v.x - 1, 1); j >= 0;
         j = src.next_geq(j, v.x - 1, 1)) {
      out.push(Side::eta, DeleteKind::one, j - removed - m_k, src.at(j));
      ++m_k;
    }
    // reduce zeta[x_k] to the row weight
    out.push(Side::eta, DeleteKind::one, v.x - removed - m_k, value - weight);
    // align psi: delete the separating zeros at the fixed collapsed index
    std::int64_t d_k = (v.row - prev_row) - (v.x - prev_x) + m_k;
    SEQLAB_CHECK(d_k >= 0, "extract_witness: negative zero-deletion count");
    out.push(Side::xi, DeleteKind::zero, prefix + 1, d_k);
    removed += m_k;
    prev_x = v.x;
    prev_row = v.row;
    prefix = v.x - removed;
  }
  out.target_length = prefix;
  return out;
}

//---------------------------------------------------------------------------
// Bound checkers.
//---------------------------------------------------------------------------
struct BoundReport {
  bool applicable = false;
  std::string reason;  // why inapplicable, when it is
  bool holds = false;
  bool single_interval = false;
  std::int64_t l = 0, r = 0;
  std::int64_t bound = 0;
  std::int64_t row = 0;
};

namespace detail {
// max { sum_{r=1}^{k-1} (L^r + 1) * floor(span / M^r), 1 }
inline std::int64_t c1_bound(std::int64_t L, std::int64_t M, std::int64_t k,
                             std::int64_t span) {
  __int128 sum = 0;
  __int128 Lr = 1, Mr = 1;
  for (std::int64_t r = 1; r <= k - 1; ++r) {
    Lr *= L;
    Mr *= M;
    if (Mr > span) break;  // floor term vanishes from here on
    sum += (Lr + 1) * (span / static_cast<std::int64_t>(Mr));
  }
  if (sum < 1) sum = 1;
  SEQLAB_CHECK(sum < (static_cast<__int128>(1) << 62), "c1_bound: overflow");
  return static_cast<std::int64_t>(sum);
}
}  // namespace detail

// Reach-segment bounds at row i_k - 1: the leftmost reachable x is at most
// B = max{ sum_{r<k} (L^r+1) floor((i_k-1)/M^r), 1 } and the rightmost at
// least i_k - B, with the reach a single interval.
inline BoundReport check_c1_bounds(const PercWindow& pw, std::int64_t k) {
  BoundReport rep;
  auto hier = pw.zeta->hierarchical();
  if (k < 1) {
    rep.reason = "k must be >= 1";
    return rep;
  }
  if (!hier) {
    rep.reason = "zeta is not a hierarchical window";
    return rep;
  }
  auto [spec, shift] = *hier;
  std::int64_t Lk = 1;
  for (std::int64_t t = 0; t < k; ++t) {
    if (Lk > (std::int64_t{1} << 40)) break;
    Lk *= spec.L;
  }
  if (shift % Lk != 0) {
    rep.reason = "shift is not a multiple of L^k";
    return rep;
  }
  std::int64_t M = pw.M > 0 ? pw.M : spec.M;
  if (M < 3 * (spec.L + 1)) {
    rep.reason = "M below 3(L+1)";
    return rep;
  }
  if (!is_M_spaced(pw.psi, M, k).ok) {
    rep.reason = "psi is not M-spaced at level k";
    return rep;
  }
  auto ik = first_index_at_least(pw.psi, k);
  if (!ik) {
    rep.reason = "no row of weight >= k in the window";
    return rep;
  }
  rep.applicable = true;
  rep.row = *ik - 1;
  auto reach = compute_reach(pw, *ik - 1);
  ReachSet v = materialize_reach(pw, reach.back());
  rep.single_interval = v.intervals.size() == 1;
  rep.bound = detail::c1_bound(spec.L, M, k, *ik - 1);
  if (v.intervals.empty()) {
    rep.holds = false;
    return rep;
  }
  rep.l = v.intervals.front().first;
  rep.r = v.intervals.back().second;
  rep.holds =
      rep.single_interval && rep.l <= rep.bound && rep.r >= *ik - rep.bound;
  return rep;
}

struct SegmentReport {
  bool applicable = false;
  std::string reason;
  bool holds = false;
  bool single_interval = false;
  std::int64_t l1 = 0, r1 = 0, l2 = 0, r2 = 0;
  std::int64_t size2 = 0;  // cardinality of the reachable set at row j2-1
  std::int64_t correction = 0;
};

// Propagation bounds between consecutive rows of weight >= k: starting from
// a segment I1 at row j1-1 (psi[j1] = k, j2 the next row of weight >= k),
// the reach I2 at row j2-1 satisfies
//   l(I2) <= l(I1) + L^k + S,   r(I2) >= r(I1) + (j2-j1-1) - L^k - S,
//   |I2| >= |I1| + (j2-j1-1) - 2 L^k - 2 S,
// with S = sum_{r<k} (L^r+1) floor((j2-j1-1)/M^r).
inline SegmentReport check_st_bounds(std::pair<std::int64_t, std::int64_t> I1,
                                     const PercWindow& pw, std::int64_t j1,
                                     std::int64_t j2) {
  SegmentReport rep;
  auto hier = pw.zeta->hierarchical();
  if (!hier) {
    rep.reason = "zeta is not a hierarchical window";
    return rep;
  }
  auto [spec, shift] = *hier;
  (void)shift;
  if (j1 < 1 || j2 <= j1 || j2 > pw.height()) {
    rep.reason = "need 1 <= j1 < j2 <= height";
    return rep;
  }
  std::int64_t k = pw.psi_at(j1);
  if (k < 1) {
    rep.reason = "psi[j1] must be positive";
    return rep;
  }
  for (std::int64_t r = j1 + 1; r < j2; ++r)
    if (pw.psi_at(r) >= k) {
      rep.reason = "j2 is not the next row of weight >= k";
      return rep;
    }
  if (pw.psi_at(j2) < k) {
    rep.reason = "psi[j2] must be >= psi[j1]";
    return rep;
  }
  std::int64_t M = pw.M > 0 ? pw.M : spec.M;
  if (!is_M_spaced(pw.psi, M, k).ok) {
    rep.reason = "psi is not M-spaced at level k";
    return rep;
  }
  std::int64_t Lk = 1;
  for (std::int64_t t = 0; t < k && Lk < pw.width(); ++t) Lk *= spec.L;
  if (I1.second - I1.first + 1 < Lk) {
    rep.reason = "I1 shorter than L^k";
    return rep;
  }
  if (I1.first < 1 || I1.second > pw.width()) {
    rep.reason = "I1 outside the window";
    return rep;
  }
  rep.applicable = true;
  FilteredReach start;
  start.row = j1 - 1;
  start.weight = 0;
  start.ivs = {I1};
  auto reach = compute_reach_from(pw, std::move(start), j2 - 1);
  ReachSet v = materialize_reach(pw, reach.back());
  rep.l1 = I1.first;
  rep.r1 = I1.second;
  rep.single_interval = v.intervals.size() == 1;
  std::int64_t span = j2 - j1 - 1;
  rep.correction = 0;
  {
    __int128 Lr = 1, Mr = 1, sum = 0;
    for (std::int64_t r = 1; r <= k - 1; ++r) {
      Lr *= spec.L;
      Mr *= M;
      if (Mr > span) break;
      sum += (Lr + 1) * (span / static_cast<std::int64_t>(Mr));
    }
    rep.correction = static_cast<std::int64_t>(sum);
  }
  if (v.intervals.empty()) {
    rep.holds = false;
    return rep;
  }
  rep.l2 = v.intervals.front().first;
  rep.r2 = v.intervals.back().second;
  for (auto [a, b] : v.intervals) rep.size2 += b - a + 1;
  std::int64_t i1_size = I1.second - I1.first + 1;
  bool lb = rep.l2 <= rep.l1 + Lk + rep.correction;
  bool rb = rep.r2 >= rep.r1 + span - Lk - rep.correction;
  bool sb = rep.size2 >= i1_size + span - 2 * Lk - 2 * rep.correction;
  rep.holds = rep.single_interval && lb && rb && sb;
  return rep;
}

// Open-cluster-in-slab invariance under x-shifts by multiples of
// L^{psi[i_k]}: the connected cluster of the origin among open vertices in
// rows [0, i_k] is the same set for shift m and shift m'.
inline bool check_shift_invariance(const PercWindow& pw, std::int64_t k,
                                   std::int64_t m, std::int64_t m2) {
  auto hier = pw.zeta->hierarchical();
  if (!hier || hier->second != 0)
    throw usage_error("check_shift_invariance: zeta must be an unshifted hierarchical window");
  HierarchySpec spec = hier->first;
  auto ik = first_index_at_least(pw.psi, k);
  if (!ik) throw usage_error("check_shift_invariance: no row of weight >= k");
  std::int64_t w = pw.psi_at(*ik);
  std::int64_t stride = 1;
  for (std::int64_t t = 0; t < w; ++t) {
    SEQLAB_CHECK(stride < (std::int64_t{1} << 40), "check_shift_invariance: overflow");
    stride *= spec.L;
  }
  std::int64_t rows = *ik;
  SEQLAB_CHECK(pw.width() * (rows + 1) <= 8000000,
               "check_shift_invariance: slab too large for BFS");
  auto cluster = [&](std::int64_t shift_units) {
    PercWindow spw = pw;
    spw.zeta = std::make_shared<HierarchicalZeta>(spec, shift_units * stride,
                                                  pw.width());
    std::vector<Vertex> stack = {{0, 0}};
    std::vector<std::vector<bool>> seen(
        static_cast<std::size_t>(rows + 1),
        std::vector<bool>(static_cast<std::size_t>(pw.width() + 1), false));
    seen[0][0] = true;
    std::vector<Vertex> members;
    auto try_push = [&](Vertex v) {
      if (v.x < 0 || v.x > spw.width() || v.row < 0 || v.row > rows) return;
      if (seen[static_cast<std::size_t>(v.row)][static_cast<std::size_t>(v.x)])
        return;
      if (!is_open(spw, v)) return;
      seen[static_cast<std::size_t>(v.row)][static_cast<std::size_t>(v.x)] = true;
      stack.push_back(v);
    };
    while (!stack.empty()) {
      Vertex v = stack.back();
      stack.pop_back();
      members.push_back(v);
      try_push({v.x, v.row + 1});
      try_push({v.x, v.row - 1});
      try_push({v.x + 1, v.row + 1});
      try_push({v.x - 1, v.row - 1});
    }
    std::sort(members.begin(), members.end());
    return members;
  };
  return cluster(m) == cluster(m2);
}

// Exact integer evaluation of  a >= Lt^k + 2a * sum_{j=1}^{k-1} (Lt/M)^j,
// cleared of denominators by multiplying through with M^{k-1}.
inline bool check_buraco(std::int64_t a, std::int64_t k, std::int64_t Lt,
                         std::int64_t M) {
  if (k < 1 || Lt < 1 || M < 3 * Lt) throw usage_error("check_buraco: need k >= 1 and M >= 3*L");
  __int128 Mk = 1;
  for (std::int64_t t = 0; t < k; ++t) Mk *= M;
  if (static_cast<__int128>(a) < Mk) throw usage_error("check_buraco: need a >= M^k");
  __int128 lhs = static_cast<__int128>(a);
  __int128 rhs = 1;
  for (std::int64_t t = 0; t < k; ++t) rhs *= Lt;  // Lt^k
  __int128 Mk1 = 1;
  for (std::int64_t t = 0; t < k - 1; ++t) Mk1 *= M;  // M^{k-1}
  lhs *= Mk1;
  rhs *= Mk1;
  // 2a * sum_{j=1}^{k-1} Lt^j M^{k-1-j}
  __int128 sum = 0;
  __int128 Lj = 1;
  __int128 Mj = Mk1;
  for (std::int64_t j = 1; j <= k - 1; ++j) {
    Lj *= Lt;
    Mj /= M;
    sum += Lj * Mj;
  }
  rhs += 2 * static_cast<__int128>(a) * sum;
  return lhs >= rhs;
}

}  // namespace seqlab
