#pragma once
//---------------------------------------------------------------------------
// binary_seq.hpp - binary sequences over {0,1} with one-sided deletion
// operators, Bernoulli window sampling, schedule replay, and an exact
// dynamic-programming oracle deciding whether two windows can be edited
// (deleting 1s on the left side, 0s on the right side) into sequences that
// agree on a prefix of a requested length.
//
// All public indices are 1-based.
//---------------------------------------------------------------------------

#include <algorithm>
#include <bit>
#include <cstdint>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "seqlab/schedule.hpp"
#include "seqlab/util.hpp"

namespace seqlab {

using Bits = std::vector<std::uint8_t>;

//---------------------------------------------------------------------------
// Elementary operators.
//---------------------------------------------------------------------------

// Deletes bit `i` if it is 0, otherwise returns the word unchanged.
inline Bits delete_zero(Bits w, std::int64_t i) {
  if (i < 1 || i > static_cast<std::int64_t>(w.size()))
    throw usage_error("delete_zero: index out of range");
  if (w[i - 1] == 0) w.erase(w.begin() + (i - 1));
  return w;
}

// Deletes bit `i` if it is 1, otherwise returns the word unchanged.
inline Bits delete_one(Bits w, std::int64_t i) {
  if (i < 1 || i > static_cast<std::int64_t>(w.size()))
    throw usage_error("delete_one: index out of range");
  if (w[i - 1] == 1) w.erase(w.begin() + (i - 1));
  return w;
}

// Samples an n-bit window of independent Bernoulli(p) bits.  Bit i uses the
// i-th draw of a mt19937_64 stream seeded with `seed`, via u < p on a
// uniform double in [0,1).
inline Bits sample_bernoulli(std::int64_t n, double p, std::uint64_t seed) {
  if (n < 0 || p < 0.0 || p > 1.0) throw usage_error("sample_bernoulli: bad arguments");
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  Bits out(static_cast<std::size_t>(n));
  for (auto& b : out) b = uni(gen) < p ? 1 : 0;
  return out;
}

inline std::int64_t common_prefix_length(const Bits& a, const Bits& b) {
  std::size_t n = std::min(a.size(), b.size());
  std::size_t i = 0;
  while (i < n && a[i] == b[i]) ++i;
  return static_cast<std::int64_t>(i);
}

//---------------------------------------------------------------------------
// Replay.  BinaryReplayer applies deletion steps to one side in
// O(log n) per unit deletion using an order-statistic Fenwick tree; the
// naive routine below re-derives the same semantics with vector::erase and
// exists to cross-check the fast path.
//---------------------------------------------------------------------------
class BinaryReplayer {
 public:
  explicit BinaryReplayer(Bits bits)
      : bits_(std::move(bits)),
        alive_(Fenwick::from_values(
            std::vector<std::int64_t>(bits_.size(), 1))) {
    alive_count_ = static_cast<std::int64_t>(bits_.size());
  }

  std::int64_t size() const { return alive_count_; }

  // Original (1-based) position of the element currently at `index`.
  std::int64_t original_position(std::int64_t index) const {
    SEQLAB_CHECK(index >= 1 && index <= alive_count_,
                 "BinaryReplayer: index out of range");
    return static_cast<std::int64_t>(alive_.select(index));
  }

  // Number of surviving elements with original position <= orig.
  std::int64_t alive_up_to_original(std::int64_t orig) const {
    if (orig < 1) return 0;
    return alive_.prefix(static_cast<std::size_t>(
        std::min<std::int64_t>(orig, static_cast<std::int64_t>(bits_.size()))));
  }

  void apply(DeleteKind op, std::int64_t index, std::int64_t count = 1) {
    std::uint8_t victim = (op == DeleteKind::zero) ? 0 : 1;
    for (std::int64_t t = 0; t < count; ++t) {
      if (index < 1 || index > alive_count_)
        throw usage_error("BinaryReplayer: step index out of range");
      std::size_t orig = alive_.select(index);
      if (bits_[orig - 1] != victim) break;  // identity now and for all repeats
      alive_.add(orig, -1);
      --alive_count_;
    }
  }

  void apply(const WitnessStep& s) { apply(s.op, s.index, s.count); }

  Bits current() const {
    Bits out;
    out.reserve(static_cast<std::size_t>(alive_count_));
    for (std::size_t i = 0; i < bits_.size(); ++i)
      if (alive_.prefix(i + 1) - alive_.prefix(i) == 1) out.push_back(bits_[i]);
    return out;
  }

  // current() restricted to the first `len` surviving elements.
  Bits current_prefix(std::int64_t len) const {
    Bits out;
    std::int64_t n = std::min(len, alive_count_);
    out.reserve(static_cast<std::size_t>(n));
    for (std::int64_t k = 1; k <= n; ++k)
      out.push_back(bits_[alive_.select(k) - 1]);
    return out;
  }

 private:
  Bits bits_;
  Fenwick alive_;
  std::int64_t alive_count_ = 0;
};

inline Bits naive_apply_binary(Bits w, DeleteKind op, std::int64_t index,
                               std::int64_t count = 1) {
  for (std::int64_t t = 0; t < count; ++t) {
    Bits next = (op == DeleteKind::zero) ? delete_zero(w, index)
                                         : delete_one(w, index);
    if (next.size() == w.size()) return next;  // identity; repeats stay identity
    w = std::move(next);
  }
  return w;
}

// Applies a schedule to the pair (eta, xi) and returns the transformed pair.
inline std::pair<Bits, Bits> replay_binary(const Bits& eta, const Bits& xi,
                                           const WitnessSchedule& sched) {
  BinaryReplayer left(eta), right(xi);
  for (const auto& s : sched.steps)
    (s.side == Side::eta ? left : right).apply(s);
  return {left.current(), right.current()};
}

inline std::pair<Bits, Bits> naive_replay_binary(Bits eta, Bits xi,
                                                 const WitnessSchedule& sched) {
  for (const auto& s : sched.steps) {
    Bits& w = (s.side == Side::eta) ? eta : xi;
    w = naive_apply_binary(std::move(w), s.op, s.index, s.count);
  }
  return {std::move(eta), std::move(xi)};
}

//---------------------------------------------------------------------------
// Exact oracle.  State (i, j) = (symbols consumed from eta, symbols consumed
// from xi).  Transitions: skip eta[i+1] when it is 1; skip xi[j+1] when it is
// 0; consume both when they agree (emitting one output symbol).  Because
// consumed eta-zeros and xi-ones can only be emitted, the emitted length at
// (i, j) is determined: zeros(eta, i) + ones(xi, j).  Reachability is
// computed with one bitset row per i.
//---------------------------------------------------------------------------
class CompatibilityOracle {
 public:
  CompatibilityOracle(const Bits& eta, const Bits& xi) : eta_(eta), xi_(xi) {
    n_ = static_cast<std::int64_t>(eta.size());
    m_ = static_cast<std::int64_t>(xi.size());
    SEQLAB_CHECK((n_ + 1) * (m_ + 1) <= 64LL * 1024 * 1024,
                 "CompatibilityOracle: window pair too large");
    words_ = static_cast<std::size_t>(m_ / 64 + 1);
    zeros_eta_.assign(n_ + 1, 0);
    for (std::int64_t i = 1; i <= n_; ++i)
      zeros_eta_[i] = zeros_eta_[i - 1] + (eta[i - 1] == 0 ? 1 : 0);
    ones_xi_.assign(m_ + 1, 0);
    for (std::int64_t j = 1; j <= m_; ++j)
      ones_xi_[j] = ones_xi_[j - 1] + (xi[j - 1] == 1 ? 1 : 0);

    match_[0].assign(words_, 0);
    match_[1].assign(words_, 0);
    for (std::int64_t j = 1; j <= m_; ++j)
      set_bit(match_[xi[j - 1]], j);
    // Maximal runs of j-positions enterable via a xi-zero deletion.
    for (std::int64_t j = 1; j <= m_; ++j) {
      if (xi[j - 1] != 0) continue;
      std::int64_t a = j;
      while (j < m_ && xi[j] == 0) ++j;
      zero_runs_.emplace_back(a, j);
    }
    run_dp();
  }

  std::int64_t best_emitted() const { return best_; }

  // Cell with emitted >= target, minimal in (i, then j); nullopt if none.
  std::optional<std::pair<std::int64_t, std::int64_t>> find_cell(
      std::int64_t target) const {
    for (std::int64_t i = 0; i <= n_; ++i) {
      std::int64_t need = target - zeros_eta_[i];
      // smallest j with ones_xi_[j] >= need
      std::int64_t jt =
          std::lower_bound(ones_xi_.begin(), ones_xi_.end(), need) -
          ones_xi_.begin();
      if (jt > m_) continue;
      std::int64_t j = first_reachable_at_least(i, jt);
      if (j >= 0) return std::make_pair(i, j);
    }
    return std::nullopt;
  }

  // Reconstructs a deletion schedule reaching the given cell.
  WitnessSchedule schedule_for(std::pair<std::int64_t, std::int64_t> cell) const {
    std::int64_t i = cell.first, j = cell.second;
    SEQLAB_CHECK(reachable(i, j), "CompatibilityOracle: cell not reachable");
    std::vector<std::int64_t> del_eta, del_xi;  // original positions, desc
    while (i > 0 || j > 0) {
      if (i > 0 && j > 0 && eta_[i - 1] == xi_[j - 1] && reachable(i - 1, j - 1)) {
        --i;
        --j;
      } else if (i > 0 && eta_[i - 1] == 1 && reachable(i - 1, j)) {
        del_eta.push_back(i);
        --i;
      } else if (j > 0 && xi_[j - 1] == 0 && reachable(i, j - 1)) {
        del_xi.push_back(j);
        --j;
      } else {
        throw internal_error("CompatibilityOracle: backtrack stuck");
      }
    }
    WitnessSchedule out;
    out.target_length = zeros_eta_[cell.first] + ones_xi_[cell.second];
    append_deletions(out, Side::eta, DeleteKind::one, del_eta);
    append_deletions(out, Side::xi, DeleteKind::zero, del_xi);
    return out;
  }

  bool reachable(std::int64_t i, std::int64_t j) const {
    return (rows_[i][static_cast<std::size_t>(j >> 6)] >>
            (static_cast<std::uint64_t>(j) & 63)) & 1u;
  }

 private:
  using Row = std::vector<std::uint64_t>;

  static void set_bit(Row& r, std::int64_t j) {
    r[static_cast<std::size_t>(j >> 6)] |= 1ULL << (j & 63);
  }

  void run_dp() {
    rows_.assign(n_ + 1, Row(words_, 0));
    set_bit(rows_[0], 0);
    closure(rows_[0]);
    for (std::int64_t i = 1; i <= n_; ++i) {
      Row& cur = rows_[i];
      const Row& prev = rows_[i - 1];
      std::uint8_t b = eta_[i - 1];
      if (b == 1) cur = prev;  // deleting eta[i] keeps j
      // diagonal: consume eta[i] against a matching xi symbol
      std::uint64_t carry = 0;
      for (std::size_t w = 0; w < words_; ++w) {
        std::uint64_t shifted = (prev[w] << 1) | carry;
        carry = prev[w] >> 63;
        cur[w] |= shifted & match_[b][w];
      }
      closure(cur);
    }
    best_ = 0;
    for (std::int64_t i = 0; i <= n_; ++i) {
      std::int64_t j = highest_reachable(i);
      if (j >= 0) best_ = std::max(best_, zeros_eta_[i] + ones_xi_[j]);
    }
  }

  // Flood reachability rightwards through maximal zero runs of xi.
  void closure(Row& r) const {
    for (const auto& [a, b] : zero_runs_) {
      std::int64_t q = first_set_in(r, a - 1, b - 1);
      if (q >= 0) set_range(r, q + 1, b);
    }
  }

  std::int64_t first_set_in(const Row& r, std::int64_t lo, std::int64_t hi) const {
    if (lo < 0) lo = 0;
    for (std::int64_t w = lo >> 6; w <= (hi >> 6); ++w) {
      std::uint64_t v = r[static_cast<std::size_t>(w)];
      if (w == (lo >> 6)) v &= ~0ULL << (lo & 63);
      if (w == (hi >> 6) && (hi & 63) != 63) v &= (1ULL << ((hi & 63) + 1)) - 1;
      if (v) return (w << 6) + std::countr_zero(v);
    }
    return -1;
  }

  static void set_range(Row& r, std::int64_t lo, std::int64_t hi) {
    for (std::int64_t w = lo >> 6; w <= (hi >> 6); ++w) {
      std::uint64_t m = ~0ULL;
      if (w == (lo >> 6)) m &= ~0ULL << (lo & 63);
      if (w == (hi >> 6) && (hi & 63) != 63) m &= (1ULL << ((hi & 63) + 1)) - 1;
      r[static_cast<std::size_t>(w)] |= m;
    }
  }

  std::int64_t highest_reachable(std::int64_t i) const {
    const Row& r = rows_[i];
    for (std::int64_t w = static_cast<std::int64_t>(words_) - 1; w >= 0; --w)
      if (r[static_cast<std::size_t>(w)])
        return (w << 6) + 63 -
               std::countl_zero(r[static_cast<std::size_t>(w)]);
    return -1;
  }

  std::int64_t first_reachable_at_least(std::int64_t i, std::int64_t jt) const {
    if (jt < 0) jt = 0;
    if (jt > m_) return -1;
    return first_set_in(rows_[i], jt, m_);
  }

  // Original deletion positions (descending) -> counted steps on current
  // indices: after t prior deletions position p sits at p - t.
  static void append_deletions(WitnessSchedule& out, Side side, DeleteKind op,
                               std::vector<std::int64_t>& desc) {
    std::sort(desc.begin(), desc.end());
    std::int64_t removed = 0;
    std::size_t k = 0;
    while (k < desc.size()) {
      std::int64_t cur = desc[k] - removed;
      std::int64_t count = 1;
      // consecutive original positions collapse onto one current index
      while (k + count < desc.size() && desc[k + count] == desc[k] + count)
        ++count;
      out.push(side, op, cur, count);
      removed += count;
      k += static_cast<std::size_t>(count);
    }
  }

  Bits eta_, xi_;
  std::int64_t n_ = 0, m_ = 0, best_ = 0;
  std::size_t words_ = 0;
  std::vector<std::int64_t> zeros_eta_, ones_xi_;
  Row match_[2];
  std::vector<std::pair<std::int64_t, std::int64_t>> zero_runs_;
  std::vector<Row> rows_;
};

// Highest common-prefix length attainable by any deletion schedule.
inline std::int64_t oracle_max_emitted(const Bits& eta, const Bits& xi) {
  return CompatibilityOracle(eta, xi).best_emitted();
}

// Finds a schedule certifying a common prefix of at least `target` symbols,
// or nullopt when no schedule over these windows can reach it.
inline std::optional<WitnessSchedule> prefix_compatible_oracle(
    const Bits& eta, const Bits& xi, std::int64_t target) {
  if (target < 0) throw usage_error("prefix_compatible_oracle: negative target");
  if (target > static_cast<std::int64_t>(std::min(eta.size(), xi.size())))
    throw usage_error("prefix_compatible_oracle: target exceeds a window");
  CompatibilityOracle dp(eta, xi);
  auto cell = dp.find_cell(target);
  if (!cell) return std::nullopt;
  return dp.schedule_for(*cell);
}

}  // namespace seqlab
