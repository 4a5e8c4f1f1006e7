#pragma once
//---------------------------------------------------------------------------
// weighted_word.hpp - run-length weighted words.  A weighted word stores,
// per entry, either k >= 1 (a maximal run of k ones, always followed in the
// source by a terminating zero) or 0 (a single zero).  Valid words therefore
// satisfy: a positive entry is never immediately followed by another
// positive entry.  The module provides the encoding from binary windows and
// its inverse, weighted deletion operators (with the run-merge case),
// spacing predicates, shifts, and the translation of weighted deletion
// schedules into binary ones.
//
// All public indices are 1-based.
//---------------------------------------------------------------------------

#include <algorithm>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "seqlab/binary_seq.hpp"
#include "seqlab/schedule.hpp"
#include "seqlab/util.hpp"

namespace seqlab {

using Weights = std::vector<std::int64_t>;

struct WeightedWord {
  Weights w;
  bool last_run_complete = true;  // false if a trailing run was cut off

  std::int64_t length() const { return static_cast<std::int64_t>(w.size()); }
  friend bool operator==(const WeightedWord&, const WeightedWord&) = default;
};

inline bool is_valid_weighted(const Weights& w) {
  for (std::size_t i = 0; i + 1 < w.size(); ++i)
    if (w[i] >= 1 && w[i + 1] != 0) return false;
  for (std::int64_t v : w)
    if (v < 0) return false;
  return true;
}

inline void require_valid(const WeightedWord& v, const char* who) {
  if (!is_valid_weighted(v.w)) throw usage_error(std::string(who) + ": invalid weighted word");
}

//---------------------------------------------------------------------------
// Encoding and decoding.
//---------------------------------------------------------------------------

// Runs of ones become their lengths; each zero becomes a 0 entry.  An
// unterminated trailing run is dropped and flagged, never guessed.
inline WeightedWord encode(const Bits& bits) {
  WeightedWord out;
  std::int64_t run = 0;
  for (std::uint8_t b : bits) {
    if (b == 1) {
      ++run;
    } else {
      if (run > 0) out.w.push_back(run);
      run = 0;
      out.w.push_back(0);
    }
  }
  out.last_run_complete = (run == 0);
  return out;
}

inline Bits decode(const WeightedWord& v) {
  Bits out;
  std::int64_t total = 0;
  for (std::int64_t e : v.w) total += e > 0 ? e : 1;
  out.reserve(static_cast<std::size_t>(total));
  for (std::int64_t e : v.w) {
    if (e > 0)
      out.insert(out.end(), static_cast<std::size_t>(e), 1);
    else
      out.push_back(0);
  }
  return out;
}

// Number of source bits entry i occupies (its run length, or 1 for a zero).
inline std::int64_t entry_bit_length(std::int64_t e) { return e > 0 ? e : 1; }

inline std::int64_t decoded_length(const Weights& w) {
  std::int64_t s = 0;
  for (std::int64_t e : w) s += entry_bit_length(e);
  return s;
}

// First source-bit position of entry i (1-based on both sides).
inline std::int64_t bit_position_of_entry(const Weights& w, std::int64_t i) {
  SEQLAB_CHECK(i >= 1 && i <= static_cast<std::int64_t>(w.size()),
               "bit_position_of_entry: index out of range");
  std::int64_t pos = 1;
  for (std::int64_t j = 0; j < i - 1; ++j) pos += entry_bit_length(w[j]);
  return pos;
}

//---------------------------------------------------------------------------
// Weighted deletion operators.
//---------------------------------------------------------------------------

// Deletes the zero at entry i.  Identity when the entry is a run.  When the
// deleted zero separates two runs they merge into one run; that outcome
// depends on the successor entry, so a would-be merge at the window edge is
// a boundary error rather than a guess.
inline WeightedWord ww_delete_zero(WeightedWord v, std::int64_t i) {
  std::int64_t n = v.length();
  if (i < 1 || i > n) throw usage_error("ww_delete_zero: index out of range");
  Weights& w = v.w;
  if (w[i - 1] >= 1) return v;
  if (i == 1 || w[i - 2] == 0) {
    w.erase(w.begin() + (i - 1));
    return v;
  }
  // left neighbor is a run; merge vs plain removal depends on the successor
  if (i == n)
    throw boundary_error("ww_delete_zero: merge outcome needs the entry after the window");
  if (w[i] == 0) {
    w.erase(w.begin() + (i - 1));
    return v;
  }
  w[i - 2] += w[i];
  w.erase(w.begin() + (i - 1), w.begin() + (i + 1));
  return v;
}

// Deletes one 1 from the run at entry i: identity on zeros, removal of the
// entry for weight 1, decrement otherwise.
inline WeightedWord ww_delete_one(WeightedWord v, std::int64_t i) {
  std::int64_t n = v.length();
  if (i < 1 || i > n) throw usage_error("ww_delete_one: index out of range");
  Weights& w = v.w;
  if (w[i - 1] == 0) return v;
  if (w[i - 1] == 1)
    w.erase(w.begin() + (i - 1));
  else
    --w[i - 1];
  return v;
}

//---------------------------------------------------------------------------
// Position predicates.
//---------------------------------------------------------------------------

// Least n with weights[n] >= k, if any such n is visible in the window.
// Absence in the window never claims nonexistence beyond it.
inline std::optional<std::int64_t> first_index_at_least(const WeightedWord& v,
                                                        std::int64_t k) {
  if (k < 1) throw usage_error("first_index_at_least: k must be >= 1");
  for (std::int64_t i = 1; i <= v.length(); ++i)
    if (v.w[i - 1] >= k) return i;
  return std::nullopt;
}

struct SpacingReport {
  bool ok = true;
  // First violating index pair of the pairwise condition, if any.
  std::optional<std::pair<std::int64_t, std::int64_t>> pair_violation;
  // First level j whose first index of weight >= j sits below M^j, if any.
  std::optional<std::int64_t> level_violation;
};

// Checks, within the window:
//  a) every pair of positive entries i < j obeys j - i >= M^{min(w_i, w_j)};
//  b) for each level j (up to `level` when given, otherwise every level whose
//     first occurrence is visible), the first index with weight >= j is
//     >= M^j.
// Condition a) is verified per weight level w: consecutive members of
// {i : w_i >= w} must differ by at least M^w, which is equivalent to the
// all-pairs statement.
inline SpacingReport is_M_spaced(const WeightedWord& v, std::int64_t M,
                                 std::optional<std::int64_t> level = std::nullopt) {
  if (M < 2) throw usage_error("is_M_spaced: M must be >= 2");
  SpacingReport rep;
  std::vector<std::pair<std::int64_t, std::int64_t>> nz;  // (index, weight)
  std::int64_t max_w = 0;
  for (std::int64_t i = 1; i <= v.length(); ++i)
    if (v.w[i - 1] > 0) {
      nz.emplace_back(i, v.w[i - 1]);
      max_w = std::max(max_w, v.w[i - 1]);
    }
  auto pow_M = [&](std::int64_t e) {
    std::int64_t r = 1;
    for (std::int64_t t = 0; t < e; ++t) {
      if (r > (std::int64_t{1} << 62) / M) return std::int64_t{1} << 62;
      r *= M;
    }
    return r;
  };
  for (std::int64_t w = 1; w <= max_w && !rep.pair_violation; ++w) {
    std::int64_t need = pow_M(w);
    std::int64_t prev = -1;
    for (const auto& [idx, wt] : nz) {
      if (wt < w) continue;
      if (prev >= 0 && idx - prev < need) {
        rep.pair_violation = std::make_pair(prev, idx);
        rep.ok = false;
        break;
      }
      prev = idx;
    }
  }
  std::int64_t top = level ? std::min(*level, max_w) : max_w;
  for (std::int64_t j = 1; j <= top; ++j) {
    auto it = std::find_if(nz.begin(), nz.end(),
                           [&](const auto& e) { return e.second >= j; });
    if (it == nz.end()) continue;  // not visible; the window cannot decide
    if (it->first < pow_M(j)) {
      rep.level_violation = j;
      rep.ok = false;
      break;
    }
  }
  return rep;
}

// Drops the first m entries.
inline WeightedWord shift(WeightedWord v, std::int64_t m) {
  if (m < 0 || m >= v.length()) throw usage_error("shift: m out of range");
  v.w.erase(v.w.begin(), v.w.begin() + m);
  return v;
}

//---------------------------------------------------------------------------
// Replay of weighted schedules.  Fast path uses an order-statistic Fenwick
// tree plus mutable entry values; the naive path re-derives the semantics
// from the elementary operators.
//---------------------------------------------------------------------------
class WeightedReplayer {
 public:
  explicit WeightedReplayer(const WeightedWord& v)
      : vals_(v.w),
        alive_(Fenwick::from_values(std::vector<std::int64_t>(v.w.size(), 1))),
        count_(static_cast<std::int64_t>(v.w.size())),
        complete_(v.last_run_complete) {}

  std::int64_t size() const { return count_; }

  std::int64_t value_at(std::int64_t index) const {
    return vals_[alive_.select(check_index(index)) - 1];
  }

  void apply(const WitnessStep& s) { apply(s.op, s.index, s.count); }

  void apply(DeleteKind op, std::int64_t index, std::int64_t count = 1) {
    if (op == DeleteKind::one)
      apply_delete_one(index, count);
    else
      apply_delete_zero(index, count);
  }

  WeightedWord current() const {
    WeightedWord out;
    out.w.reserve(static_cast<std::size_t>(count_));
    for (std::size_t i = 0; i < vals_.size(); ++i)
      if (alive_.prefix(i + 1) - alive_.prefix(i) == 1) out.w.push_back(vals_[i]);
    out.last_run_complete = complete_;
    return out;
  }

 private:
  std::int64_t check_index(std::int64_t i) const {
    if (i < 1 || i > count_) throw usage_error("WeightedReplayer: index out of range");
    return i;
  }

  void erase(std::size_t orig) {
    alive_.add(orig, -1);
    --count_;
  }

  void apply_delete_one(std::int64_t index, std::int64_t count) {
    check_index(index);
    std::size_t orig = alive_.select(index);
    std::int64_t v = vals_[orig - 1];
    if (v == 0 || count <= 0) return;
    std::int64_t eff = std::min(count, v);
    if (eff < v) {
      vals_[orig - 1] = v - eff;
    } else {
      erase(orig);  // v-1 decrements then the removal
      // any repeats beyond v address the successor entry, a zero: identity
      if (count > v && index > count_)
        throw usage_error("WeightedReplayer: index out of range");
    }
  }

  void apply_delete_zero(std::int64_t index, std::int64_t count) {
    for (std::int64_t t = 0; t < count; ++t) {
      check_index(index);
      std::size_t orig = alive_.select(index);
      if (vals_[orig - 1] != 0) return;  // identity now and for all repeats
      if (index == 1 || vals_[alive_.select(index - 1) - 1] == 0) {
        erase(orig);
        continue;
      }
      if (index == count_)
        throw boundary_error(
            "WeightedReplayer: merge outcome needs the entry after the window");
      std::size_t right = alive_.select(index + 1);
      if (vals_[right - 1] == 0) {
        erase(orig);
      } else {
        vals_[alive_.select(index - 1) - 1] += vals_[right - 1];
        erase(right);
        erase(orig);
      }
    }
  }

  std::vector<std::int64_t> vals_;
  Fenwick alive_;
  std::int64_t count_ = 0;
  bool complete_ = true;
};

inline std::pair<WeightedWord, WeightedWord> replay_weighted(
    const WeightedWord& zeta, const WeightedWord& psi,
    const WitnessSchedule& sched) {
  WeightedReplayer left(zeta), right(psi);
  for (const auto& s : sched.steps) (s.side == Side::eta ? left : right).apply(s);
  return {left.current(), right.current()};
}

inline std::pair<WeightedWord, WeightedWord> naive_replay_weighted(
    WeightedWord zeta, WeightedWord psi, const WitnessSchedule& sched) {
  auto unit = [](WeightedWord w, DeleteKind op, std::int64_t index) {
    return op == DeleteKind::zero ? ww_delete_zero(std::move(w), index)
                                  : ww_delete_one(std::move(w), index);
  };
  for (const auto& s : sched.steps) {
    WeightedWord& w = (s.side == Side::eta) ? zeta : psi;
    for (std::int64_t t = 0; t < s.count; ++t) {
      WeightedWord next = unit(w, s.op, s.index);
      if (next.w == w.w) break;  // identity now and for all repeats
      w = std::move(next);
    }
  }
  return {std::move(zeta), std::move(psi)};
}

inline std::int64_t common_prefix_length(const Weights& a, const Weights& b) {
  std::size_t n = std::min(a.size(), b.size());
  std::size_t i = 0;
  while (i < n && a[i] == b[i]) ++i;
  return static_cast<std::int64_t>(i);
}

//---------------------------------------------------------------------------
// Witness translation: weighted deletion schedules map step-for-step onto
// binary ones.  Deleting a zero entry deletes the corresponding source 0;
// deleting a one from a run deletes the 1 at the run's first source bit.
// The source-bit index of entry i is one plus the decoded length of the
// surviving entries before i, maintained in a Fenwick tree.
//---------------------------------------------------------------------------
namespace detail {

class TranslationSide {
 public:
  TranslationSide(const WeightedWord& v, Side side, WitnessSchedule& out)
      : vals_(v.w),
        alive_(Fenwick::from_values(std::vector<std::int64_t>(v.w.size(), 1))),
        declen_(Fenwick::from_values([&] {
          std::vector<std::int64_t> lens;
          lens.reserve(v.w.size());
          for (std::int64_t e : v.w) lens.push_back(entry_bit_length(e));
          return lens;
        }())),
        count_(static_cast<std::int64_t>(v.w.size())),
        side_(side),
        out_(&out) {}

  std::int64_t size() const { return count_; }

  // Decoded length of the surviving entries 1..index.
  std::int64_t decoded_prefix(std::int64_t index) const {
    if (index <= 0) return 0;
    SEQLAB_CHECK(index <= count_, "TranslationSide: prefix index out of range");
    return declen_.prefix(alive_.select(index));
  }

  void apply(DeleteKind op, std::int64_t index, std::int64_t count) {
    if (op == DeleteKind::one)
      apply_delete_one(index, count);
    else
      apply_delete_zero(index, count);
  }

 private:
  void check_index(std::int64_t i) const {
    if (i < 1 || i > count_) throw usage_error("translate_witness: schedule index out of range");
  }

  std::int64_t bit_index_of(std::size_t orig) const {
    return declen_.prefix(orig - 1) + 1;
  }

  void erase(std::size_t orig) {
    alive_.add(orig, -1);
    declen_.add(orig, -entry_bit_length(vals_[orig - 1]));
    --count_;
  }

  void emit(DeleteKind op, std::int64_t bit_index, std::int64_t count) {
    if (count <= 0) return;
    auto& steps = out_->steps;
    if (!steps.empty() && steps.back().side == side_ && steps.back().op == op &&
        steps.back().index == bit_index)
      steps.back().count += count;
    else
      out_->push(side_, op, bit_index, count);
  }

  void apply_delete_one(std::int64_t index, std::int64_t count) {
    check_index(index);
    std::size_t orig = alive_.select(index);
    std::int64_t v = vals_[orig - 1];
    if (v == 0 || count <= 0) return;
    std::int64_t eff = std::min(count, v);
    emit(DeleteKind::one, bit_index_of(orig), eff);
    if (eff < v) {
      vals_[orig - 1] = v - eff;
      declen_.add(orig, -eff);
    } else {
      erase(orig);
      if (count > v && index > count_)
        throw usage_error("translate_witness: schedule index out of range");
    }
  }

  void apply_delete_zero(std::int64_t index, std::int64_t count) {
    for (std::int64_t t = 0; t < count; ++t) {
      check_index(index);
      std::size_t orig = alive_.select(index);
      if (vals_[orig - 1] != 0) return;
      emit(DeleteKind::zero, bit_index_of(orig), 1);
      if (index == 1 || vals_[alive_.select(index - 1) - 1] == 0) {
        erase(orig);
        continue;
      }
      if (index == count_)
        throw boundary_error(
            "translate_witness: merge outcome needs the entry after the window");
      std::size_t right = alive_.select(index + 1);
      if (vals_[right - 1] == 0) {
        erase(orig);
      } else {
        std::size_t left = alive_.select(index - 1);
        std::int64_t merged = vals_[left - 1] + vals_[right - 1];
        declen_.add(left, merged - vals_[left - 1]);
        vals_[left - 1] = merged;
        erase(right);
        erase(orig);
      }
    }
  }

  std::vector<std::int64_t> vals_;
  Fenwick alive_;
  Fenwick declen_;
  std::int64_t count_;
  Side side_;
  WitnessSchedule* out_;
};

}  // namespace detail

// Translates a weighted-word deletion schedule for (zeta, psi) into a binary
// schedule for (decode(zeta), decode(psi)).  The returned target is the
// decoded length of the certified weighted prefix.
inline WitnessSchedule translate_witness(const WitnessSchedule& s,
                                         const WeightedWord& zeta,
                                         const WeightedWord& psi) {
  require_valid(zeta, "translate_witness");
  require_valid(psi, "translate_witness");
  WitnessSchedule out;
  detail::TranslationSide left(zeta, Side::eta, out);
  detail::TranslationSide right(psi, Side::xi, out);
  for (const auto& st : s.steps)
    (st.side == Side::eta ? left : right).apply(st.op, st.index, st.count);
  std::int64_t p = s.target_length;
  if (p < 0 || p > left.size() || p > right.size())
    throw usage_error("translate_witness: certified prefix exceeds surviving length");
  std::int64_t bits_left = left.decoded_prefix(p);
  std::int64_t bits_right = right.decoded_prefix(p);
  if (bits_left != bits_right)
    throw usage_error("translate_witness: certified prefixes decode to different lengths");
  out.target_length = bits_left;
  return out;
}

}  // namespace seqlab
