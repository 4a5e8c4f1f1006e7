#pragma once
//---------------------------------------------------------------------------
// pipeline.hpp
//
// End-to-end Monte Carlo harness.  Each trial samples a Bernoulli window,
// groups it into a cluster forest, gates on the forest diagnostics (chi and
// M-spacing), percolates the grouped word against the hierarchical
// environment, extracts a compatibility witness, and then verifies that
// witness twice: by direct replay at the run-length level and at the bit
// level, and independently by a dynamic-programming oracle on a truncated
// prefix.  Failures are recorded per trial and never abort a batch.
//---------------------------------------------------------------------------

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "seqlab/binary_seq.hpp"
#include "seqlab/grouping.hpp"
#include "seqlab/hierarchy.hpp"
#include "seqlab/percolation.hpp"
#include "seqlab/schedule.hpp"
#include "seqlab/stats.hpp"
#include "seqlab/util.hpp"
#include "seqlab/weighted_word.hpp"

namespace seqlab {

//---------------------------------------------------------------------------
// Configuration.
//---------------------------------------------------------------------------
struct ExperimentConfig {
  std::int64_t L = 2;                  // hierarchy branching parameter
  double p = 1e-4;                     // Bernoulli density of the sample
  std::int64_t window_length = 1000000;
  std::int64_t depth = -1;             // percolation depth; -1 = full height
  std::int64_t trials = 200;
  std::uint64_t seed = 1;              // trial i uses seed ^ i
  std::int64_t oracle_cap = 2000;      // max prefix length re-checked by DP
  std::int64_t binary_budget = 4000000;  // max environment bits per trial
  std::string output_path;             // empty = stdout
  std::string format = "json";         // json | csv

  bool in_regime() const { return p < HierarchySpec::of(L).p_threshold; }

  void validate() const {
    HierarchySpec::of(L);  // rejects L < 2
    if (!(p >= 0.0) || p > 1.0)
      throw usage_error("ExperimentConfig: p must lie in [0, 1]");
    if (window_length < 1)
      throw usage_error("ExperimentConfig: window_length must be >= 1");
    if (trials < 1) throw usage_error("ExperimentConfig: trials must be >= 1");
    if (depth < -1)
      throw usage_error("ExperimentConfig: depth must be >= 0, or -1 for automatic");
    if (oracle_cap < 0)
      throw usage_error("ExperimentConfig: oracle_cap must be >= 0");
    if (binary_budget < 1)
      throw usage_error("ExperimentConfig: binary_budget must be >= 1");
    if (format != "json" && format != "csv")
      throw usage_error("ExperimentConfig: format must be json or csv");
  }

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

// Smallest L >= 2 whose hierarchical zero set has dimension exceeding
// 1 - margin.  The dimension log L / log(3(L+1)) is increasing in L and
// tends to 1, so a binary search over an expanding bracket suffices.
inline std::int64_t smallest_L_for_dimension(double margin) {
  if (!(margin > 0.0) || margin > 1.0)
    throw usage_error("smallest_L_for_dimension: margin must lie in (0, 1]");
  const double target = 1.0 - margin;
  auto dim = [](std::int64_t l) {
    return std::log(static_cast<double>(l)) / std::log(3.0 * (static_cast<double>(l) + 1.0));
  };
  if (dim(2) > target) return 2;
  std::int64_t lo = 2, hi = 2;
  const std::int64_t cap = std::int64_t{1} << 60;
  while (dim(hi) <= target) {
    if (hi >= cap)
      throw usage_error("smallest_L_for_dimension: margin too small for the search range");
    hi *= 4;
  }
  while (hi - lo > 1) {
    std::int64_t mid = lo + (hi - lo) / 2;
    (dim(mid) > target ? hi : lo) = mid;
  }
  return hi;
}

//---------------------------------------------------------------------------
// Per-trial record.  `witness_ok` means both replays (run-length level over
// the full target depth and bit level over the budget-truncated prefix)
// certified their targets; `oracle_ok` means the independent DP check on the
// consumed prefix agreed.  `success` requires both.
//---------------------------------------------------------------------------
struct TrialRecord {
  std::int64_t trial = 0;
  std::uint64_t seed = 0;
  std::string chi_status;       // "zero" | "positive" | "not_determined"
  std::int64_t chi_value = -1;  // -1 when not determined
  bool m_spaced_ok = false;
  std::int64_t path_depth_target = -1;
  std::int64_t path_reached_depth = -1;
  bool witness_ok = false;
  bool oracle_ok = false;
  bool success = false;
  std::int64_t weighted_target = 0;  // certified run-length prefix
  std::int64_t binary_target = 0;    // certified bit prefix (truncated leg)
  std::int64_t spot_target = 0;      // prefix re-checked by the DP oracle
  std::string failure_reason;        // empty on success

  friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

struct PipelineSummary {
  std::int64_t trials = 0;
  std::int64_t successes = 0;
  double success_fraction = 0.0;
  WilsonInterval ci{0.0, 0.0, 1.0};
  std::int64_t chi_zero = 0;
  std::int64_t chi_positive = 0;
  std::int64_t chi_not_determined = 0;
  std::int64_t spacing_failures = 0;
  std::int64_t blocked_windows = 0;
  std::int64_t replay_failures = 0;
  std::int64_t oracle_failures = 0;
  std::int64_t exception_failures = 0;
};

struct PipelineResult {
  ExperimentConfig config;
  std::vector<TrialRecord> records;
};

namespace detail {

// Mirror of sample_bernoulli's generator consumption: one unit draw per bit,
// so thresholding the same stream at several densities yields coupled
// samples that agree with sample_bernoulli at every density.
inline std::vector<double> uniform_stream(std::int64_t n, std::uint64_t seed) {
  if (n < 0) throw usage_error("uniform_stream: n must be >= 0");
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::vector<double> out(static_cast<std::size_t>(n));
  for (double& v : out) v = uni(gen);
  return out;
}

inline Bits threshold_bits(const std::vector<double>& u, double p) {
  Bits b(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) b[i] = u[i] < p ? 1 : 0;
  return b;
}

inline std::int64_t common_prefix_bits(const Bits& a, const Bits& b) {
  std::size_t n = std::min(a.size(), b.size());
  std::size_t i = 0;
  while (i < n && a[i] == b[i]) ++i;
  return static_cast<std::int64_t>(i);
}

}  // namespace detail

//---------------------------------------------------------------------------
// Optional capture of the schedules a trial constructs, for callers that
// want to store or display the witnesses rather than just their verdicts.
//---------------------------------------------------------------------------
struct WitnessCapture {
  WitnessSchedule weighted;  // over (environment word, grouped word)
  WitnessSchedule binary;    // over (environment bits, original sample prefix)
  std::int64_t eta_length = 0;       // environment bits materialized
  std::int64_t xi_prefix_length = 0; // original sample bits covered
  std::int64_t truncated_depth = 0;  // rows kept by the bit budget
};

//---------------------------------------------------------------------------
// One trial.
//---------------------------------------------------------------------------
inline TrialRecord run_trial(const ExperimentConfig& cfg, std::int64_t index,
                             WitnessCapture* capture = nullptr) {
  TrialRecord rec;
  rec.trial = index;
  rec.seed = cfg.seed ^ static_cast<std::uint64_t>(index);
  try {
    const HierarchySpec spec = HierarchySpec::of(cfg.L);
    const Bits xi = sample_bernoulli(cfg.window_length, cfg.p, rec.seed);

    // Grouping gates.
    const ClusterForest forest = build_forest(xi, spec.M);
    const ChiResult cr = chi(forest);
    if (!cr.determined) {
      rec.chi_status = "not_determined";
      rec.failure_reason = "chi_not_determined";
      return rec;
    }
    rec.chi_value = cr.chi;
    if (cr.chi != 0) {
      rec.chi_status = "positive";
      rec.failure_reason = "chi_positive";
      return rec;
    }
    rec.chi_status = "zero";

    const WeightedWord psi = psi_from_xi(forest);
    rec.m_spaced_ok = is_M_spaced(psi, spec.M).ok;
    if (!rec.m_spaced_ok) {
      rec.failure_reason = "psi_not_m_spaced";
      return rec;
    }

    const std::int64_t height = psi.length();
    const std::int64_t depth =
        cfg.depth < 0 ? height : std::min(cfg.depth, height);
    rec.path_depth_target = depth;

    if (depth == 0) {
      // Nothing to percolate: the empty witness certifies the empty prefix,
      // and the oracle confirms it on empty windows.
      rec.path_reached_depth = 0;
      rec.witness_ok = true;
      rec.oracle_ok = prefix_compatible_oracle(Bits{}, Bits{}, 0).has_value();
      rec.success = rec.witness_ok && rec.oracle_ok;
      if (!rec.success) rec.failure_reason = "oracle_refuted";
      return rec;
    }

    // Percolation.
    PercWindow pw = make_hier_perc_window(spec, 0, cfg.window_length, psi);
    const std::vector<FilteredReach> reach = compute_reach(pw, depth);
    rec.path_reached_depth = depth;
    for (const FilteredReach& fr : reach) {
      if (fr.ivs.empty()) {
        rec.path_reached_depth = std::max<std::int64_t>(fr.row - 1, 0);
        break;
      }
    }
    if (rec.path_reached_depth < depth) {
      rec.failure_reason = "window_blocked";
      return rec;
    }
    std::optional<PermittedPath> path = find_permitted_path(pw, depth);
    SEQLAB_CHECK(path.has_value(), "run_trial: nonempty reach but no path");
    const std::vector<Vertex>& vs = path->vertices;
    SEQLAB_CHECK(static_cast<std::int64_t>(vs.size()) == depth + 1,
                 "run_trial: path does not span the target depth");

    // Run-length-level witness over the full target depth, checked by replay.
    WitnessSchedule wit = extract_witness(*path, pw);
    rec.weighted_target = wit.target_length;
    if (capture) capture->weighted = wit;
    {
      const WeightedWord zw = zeta_window(spec, cfg.window_length);
      auto replayed = replay_weighted(zw, psi, wit);
      if (common_prefix_length(replayed.first.w, replayed.second.w) <
          wit.target_length) {
        rec.failure_reason = "weighted_replay_short";
        return rec;
      }
    }

    // Bit-level witness on a budget-truncated sub-path.  The cut row d* is
    // the deepest row whose column fits in the bit budget once the
    // environment word is expanded.
    std::int64_t dstar = 0;
    {
      std::int64_t bits = 0;
      std::int64_t x_prev = 0;
      for (std::int64_t r = 1; r <= depth; ++r) {
        SEQLAB_CHECK(vs[static_cast<std::size_t>(r)].row == r,
                     "run_trial: path rows out of order");
        const std::int64_t x = vs[static_cast<std::size_t>(r)].x;
        bool over = false;
        for (std::int64_t j = x_prev + 1; j <= x && !over; ++j) {
          const std::int64_t v = tilde_zeta_at(spec, j);
          if (bits > cfg.binary_budget - std::max<std::int64_t>(v, 1)) over = true;
          else bits += v > 0 ? v : 1;
        }
        if (over) break;
        dstar = r;
        x_prev = x;
      }
    }

    if (dstar == 0) {
      // Even the first column exceeds the budget; certify the empty prefix.
      rec.binary_target = 0;
      rec.spot_target = 0;
      rec.witness_ok = true;
      rec.oracle_ok = prefix_compatible_oracle(Bits{}, Bits{}, 0).has_value();
      rec.success = rec.witness_ok && rec.oracle_ok;
      if (!rec.success) rec.failure_reason = "oracle_refuted";
      return rec;
    }

    // Expanded-side row weights: actual run lengths of the thinned sample.
    const Bits thin = thin_xi(xi, forest);
    const WeightedWord thin_enc = encode(thin);
    SEQLAB_CHECK(static_cast<std::int64_t>(thin_enc.w.size()) >= dstar,
                 "run_trial: thinned word shorter than the truncated path");
    WeightedWord psit;
    psit.w.assign(thin_enc.w.begin(), thin_enc.w.begin() + dstar);
    for (std::int64_t r = 1; r <= dstar; ++r)
      SEQLAB_CHECK((psi.w[static_cast<std::size_t>(r - 1)] > 0) ==
                       (psit.w[static_cast<std::size_t>(r - 1)] > 0),
                   "run_trial: grouped and thinned zero patterns differ");

    PermittedPath sub;
    sub.vertices.assign(vs.begin(), vs.begin() + dstar + 1);
    for (std::size_t m : path->heavy_marks)
      if (static_cast<std::int64_t>(m) <= dstar) sub.heavy_marks.push_back(m);

    const std::int64_t x_max = sub.vertices.back().x;
    const WeightedWord tz =
        tilde_zeta_window(spec, std::max<std::int64_t>(x_max, 1));
    PercWindow pwt = make_perc_window(tz, psit, spec.M);

    // Re-certify the truncated path on the expanded window.  The expanded
    // environment dominates the expanded rows wherever the original window
    // was open, so this must succeed; a rejection is recorded, not thrown.
    WitnessSchedule witt;
    try {
      witt = extract_witness(sub, pwt);
    } catch (const usage_error&) {
      rec.failure_reason = "tilde_window_rejected";
      return rec;
    }
    WitnessSchedule bin = translate_witness(witt, tz, psit);
    rec.binary_target = bin.target_length;

    // Bit-level replay on (environment bits, original sample prefix).  The
    // schedule first removes the thinning deletions that fall inside the
    // covered prefix, then applies the translated steps, which were built
    // against exactly that thinned state.
    const Bits eta = decode(tz);
    const std::vector<std::int64_t> dels_all = thin_deletions(forest);
    const std::int64_t t_len = decoded_length(psit.w);
    std::int64_t cnt = 0;
    for (std::int64_t pos : dels_all) {
      if (pos <= t_len + cnt) ++cnt;
      else break;
    }
    const std::int64_t o_len = t_len + cnt;
    SEQLAB_CHECK(o_len <= cfg.window_length,
                 "run_trial: original prefix exceeds the window");
    const Bits xi_prefix(xi.begin(), xi.begin() + o_len);
    {
      // Cross-check the prefix bookkeeping: removing the covered thinning
      // deletions from the original prefix must reproduce the decoded
      // expanded-side word.
      Bits got;
      got.reserve(static_cast<std::size_t>(t_len));
      std::int64_t dp = 0;
      for (std::int64_t pos = 1; pos <= o_len; ++pos) {
        if (dp < cnt && dels_all[static_cast<std::size_t>(dp)] == pos) {
          ++dp;
          continue;
        }
        got.push_back(xi_prefix[static_cast<std::size_t>(pos - 1)]);
      }
      SEQLAB_CHECK(got == decode(psit), "run_trial: thinned prefix mismatch");
    }

    WitnessSchedule full;
    for (std::int64_t t = 0; t < cnt; ++t)
      full.push(Side::xi, DeleteKind::zero,
                dels_all[static_cast<std::size_t>(t)] - t, 1);
    for (const WitnessStep& st : bin.steps) full.steps.push_back(st);
    full.target_length = bin.target_length;
    if (capture) {
      capture->binary = full;
      capture->eta_length = static_cast<std::int64_t>(eta.size());
      capture->xi_prefix_length = o_len;
      capture->truncated_depth = dstar;
    }

    BinaryReplayer re(eta), rx(xi_prefix);
    for (const WitnessStep& st : full.steps)
      (st.side == Side::eta ? re : rx).apply(st);
    if (detail::common_prefix_bits(re.current(), rx.current()) <
        bin.target_length) {
      rec.failure_reason = "binary_replay_short";
      return rec;
    }
    rec.witness_ok = true;

    // Independent DP check.  Truncate both sides to the exact prefixes the
    // witness consumed for its first t surviving symbols, with t capped so
    // the DP table stays small; the restricted witness solves the truncated
    // instance, so a correct oracle must confirm it.
    std::int64_t t_spot = 0, we = 0, wx = 0;
    const std::int64_t cells = 32LL * 1024 * 1024;
    for (std::int64_t t = 1; t <= std::min(bin.target_length, cfg.oracle_cap);
         ++t) {
      const std::int64_t a = re.original_position(t);
      const std::int64_t b = rx.original_position(t);
      if ((a + 1) * (b + 1) > cells) break;
      t_spot = t;
      we = a;
      wx = b;
    }
    rec.spot_target = t_spot;
    const Bits eo(eta.begin(), eta.begin() + we);
    const Bits xo(xi_prefix.begin(), xi_prefix.begin() + wx);
    rec.oracle_ok = prefix_compatible_oracle(eo, xo, t_spot).has_value();
    if (!rec.oracle_ok) {
      rec.failure_reason = "oracle_refuted";
      return rec;
    }
    rec.success = true;
  } catch (const std::exception& e) {
    rec.witness_ok = false;
    rec.oracle_ok = false;
    rec.success = false;
    rec.failure_reason = std::string("exception: ") + e.what();
  }
  return rec;
}

inline PipelineResult run_pipeline(const ExperimentConfig& cfg) {
  cfg.validate();
  PipelineResult out;
  out.config = cfg;
  out.records.reserve(static_cast<std::size_t>(cfg.trials));
  for (std::int64_t i = 0; i < cfg.trials; ++i)
    out.records.push_back(run_trial(cfg, i));
  return out;
}

inline PipelineSummary summarize(const PipelineResult& r) {
  PipelineSummary s;
  s.trials = static_cast<std::int64_t>(r.records.size());
  for (const TrialRecord& rec : r.records) {
    if (rec.success) ++s.successes;
    if (rec.chi_status == "zero") ++s.chi_zero;
    else if (rec.chi_status == "positive") ++s.chi_positive;
    else if (rec.chi_status == "not_determined") ++s.chi_not_determined;
    if (rec.failure_reason == "psi_not_m_spaced") ++s.spacing_failures;
    else if (rec.failure_reason == "window_blocked") ++s.blocked_windows;
    else if (rec.failure_reason == "weighted_replay_short" ||
             rec.failure_reason == "tilde_window_rejected" ||
             rec.failure_reason == "binary_replay_short")
      ++s.replay_failures;
    else if (rec.failure_reason == "oracle_refuted") ++s.oracle_failures;
    else if (rec.failure_reason.rfind("exception:", 0) == 0)
      ++s.exception_failures;
  }
  if (s.trials > 0) {
    s.success_fraction =
        static_cast<double>(s.successes) / static_cast<double>(s.trials);
    s.ci = wilson_interval(s.successes, s.trials);
  }
  return s;
}

//---------------------------------------------------------------------------
// Chi-zero estimation, with an optional density sweep coupled through a
// shared uniform stream per trial.
//---------------------------------------------------------------------------
struct ChiZeroReport {
  double p = 0.0;
  std::int64_t trials = 0;
  std::int64_t determined = 0;
  std::int64_t zero = 0;
  std::int64_t not_determined = 0;
  double zero_fraction = 0.0;            // zero / trials
  double not_determined_fraction = 0.0;  // not_determined / trials
  WilsonInterval ci{0.0, 0.0, 1.0};      // on zero / trials
  std::vector<std::pair<std::int64_t, std::int64_t>> histogram;  // chi -> count
};

namespace detail {

struct ChiZeroAccum {
  std::int64_t determined = 0;
  std::int64_t zero = 0;
  std::map<std::int64_t, std::int64_t> hist;

  void add(const ChiResult& c) {
    if (!c.determined) return;
    ++determined;
    ++hist[c.chi];
    if (c.chi == 0) ++zero;
  }

  ChiZeroReport finish(double p, std::int64_t trials) const {
    ChiZeroReport rep;
    rep.p = p;
    rep.trials = trials;
    rep.determined = determined;
    rep.zero = zero;
    rep.not_determined = trials - determined;
    if (trials > 0) {
      rep.zero_fraction =
          static_cast<double>(zero) / static_cast<double>(trials);
      rep.not_determined_fraction =
          static_cast<double>(rep.not_determined) / static_cast<double>(trials);
      rep.ci = wilson_interval(zero, trials);
    }
    rep.histogram.assign(hist.begin(), hist.end());
    return rep;
  }
};

}  // namespace detail

inline ChiZeroReport estimate_chi_zero(const ExperimentConfig& cfg) {
  cfg.validate();
  const HierarchySpec spec = HierarchySpec::of(cfg.L);
  detail::ChiZeroAccum acc;
  for (std::int64_t i = 0; i < cfg.trials; ++i) {
    const std::uint64_t seed_i = cfg.seed ^ static_cast<std::uint64_t>(i);
    const Bits xi = sample_bernoulli(cfg.window_length, cfg.p, seed_i);
    acc.add(chi(build_forest(xi, spec.M)));
  }
  return acc.finish(cfg.p, cfg.trials);
}

// Coupled sweep: every density sees the same per-trial uniform stream, so a
// sample at a smaller density is pointwise dominated by the sample at a
// larger one.  At any single density the result matches estimate_chi_zero.
inline std::vector<ChiZeroReport> chi_zero_sweep(const ExperimentConfig& cfg,
                                                 const std::vector<double>& ps) {
  cfg.validate();
  if (ps.empty()) throw usage_error("chi_zero_sweep: need at least one density");
  for (double p : ps)
    if (!(p >= 0.0) || p > 1.0)
      throw usage_error("chi_zero_sweep: densities must lie in [0, 1]");
  const HierarchySpec spec = HierarchySpec::of(cfg.L);
  std::vector<detail::ChiZeroAccum> accs(ps.size());
  for (std::int64_t i = 0; i < cfg.trials; ++i) {
    const std::uint64_t seed_i = cfg.seed ^ static_cast<std::uint64_t>(i);
    const std::vector<double> us =
        detail::uniform_stream(cfg.window_length, seed_i);
    for (std::size_t k = 0; k < ps.size(); ++k) {
      const Bits xi = detail::threshold_bits(us, ps[k]);
      accs[k].add(chi(build_forest(xi, spec.M)));
    }
  }
  std::vector<ChiZeroReport> out;
  out.reserve(ps.size());
  for (std::size_t k = 0; k < ps.size(); ++k)
    out.push_back(accs[k].finish(ps[k], cfg.trials));
  return out;
}

}  // namespace seqlab
