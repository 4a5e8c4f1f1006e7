//---------------------------------------------------------------------------
// Tests for weighted words: encoding round trips, weighted deletion
// operators (including the run-merge and window-edge cases), spacing
// predicates, shifts, and schedule translation.  The cross-representation
// commutation suite exhaustively compares every weighted operator
// application against its binary counterpart for all valid words of length
// <= 6 with weights <= 3.
//---------------------------------------------------------------------------

#include <gtest/gtest.h>

#include <functional>
#include <random>

#include "seqlab/weighted_word.hpp"

using namespace seqlab;

namespace {

WeightedWord ww(std::initializer_list<std::int64_t> xs, bool complete = true) {
  WeightedWord v;
  v.w.assign(xs);
  v.last_run_complete = complete;
  return v;
}

Bits bits(std::initializer_list<int> xs) {
  Bits b;
  for (int x : xs) b.push_back(static_cast<std::uint8_t>(x));
  return b;
}

// Enumerates all valid weighted words of length <= max_len, weights <= max_w.
std::vector<Weights> all_valid_words(int max_len, std::int64_t max_w) {
  std::vector<Weights> out;
  std::function<void(Weights&)> rec = [&](Weights& cur) {
    if (!cur.empty()) out.push_back(cur);
    if (static_cast<int>(cur.size()) == max_len) return;
    for (std::int64_t v = 0; v <= max_w; ++v) {
      if (!cur.empty() && cur.back() >= 1 && v != 0) continue;
      cur.push_back(v);
      rec(cur);
      cur.pop_back();
    }
  };
  Weights cur;
  rec(cur);
  return out;
}

// Generates a random M-spaced word: each new positive entry at index
// >= max over levels w <= weight of (last index with weight >= w) + M^w,
// which also places the first weight->level occurrences at index >= M^level.
WeightedWord random_M_spaced(std::mt19937_64& gen, std::int64_t M,
                             std::int64_t max_weight, int n_entries,
                             std::int64_t tail = 3) {
  std::vector<std::int64_t> last(max_weight + 1, 0);
  std::vector<std::pair<std::int64_t, std::int64_t>> placed;  // (index, weight)
  std::int64_t pos = 0;
  for (int e = 0; e < n_entries; ++e) {
    std::int64_t a = 1 + static_cast<std::int64_t>(gen() % max_weight);
    std::int64_t lo = 1;
    std::int64_t mw = 1;
    for (std::int64_t w = 1; w <= a; ++w) {
      mw *= M;
      lo = std::max(lo, last[w] + mw);
    }
    pos = lo + static_cast<std::int64_t>(gen() % 4);
    for (std::int64_t w = 1; w <= a; ++w) last[w] = pos;
    placed.emplace_back(pos, a);
  }
  WeightedWord v;
  v.w.assign(static_cast<std::size_t>(pos + tail), 0);
  for (auto [i, a] : placed) v.w[static_cast<std::size_t>(i - 1)] = a;
  return v;
}

}  // namespace

TEST(Encoding, Examples) {
  WeightedWord e1 = encode(bits({1, 1, 0, 1, 0, 0}));
  EXPECT_EQ(e1.w, Weights({2, 0, 1, 0, 0}));
  EXPECT_TRUE(e1.last_run_complete);

  WeightedWord e2 = encode(bits({0, 0, 0}));
  EXPECT_EQ(e2.w, Weights({0, 0, 0}));
  EXPECT_TRUE(e2.last_run_complete);

  WeightedWord e3 = encode(bits({1, 1}));
  EXPECT_TRUE(e3.w.empty());
  EXPECT_FALSE(e3.last_run_complete);

  EXPECT_EQ(decode(ww({2, 0, 1, 0, 0})), bits({1, 1, 0, 1, 0, 0}));
}

TEST(Encoding, RoundTripAndPositions) {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int t = 0; t < 500; ++t) {
    Bits b(1 + gen() % 40);
    for (auto& x : b) x = uni(gen) < 0.4 ? 1 : 0;
    WeightedWord w = encode(b);
    Bits back = decode(w);
    // decoding restores the input up to the dropped unterminated run
    ASSERT_LE(back.size(), b.size());
    ASSERT_TRUE(std::equal(back.begin(), back.end(), b.begin()));
    if (w.last_run_complete) {
      ASSERT_EQ(back, b);
    }
    ASSERT_TRUE(is_valid_weighted(w.w));
    // entry i occupies source bits starting at the prefix decoded length + 1
    std::int64_t pos = 1;
    for (std::int64_t i = 1; i <= w.length(); ++i) {
      ASSERT_EQ(bit_position_of_entry(w.w, i), pos);
      pos += entry_bit_length(w.w[i - 1]);
    }
  }
}

TEST(DeleteZeroWeighted, Examples) {
  EXPECT_EQ(ww_delete_zero(ww({3, 0, 2, 0}), 2).w, Weights({5, 0}));
  EXPECT_EQ(ww_delete_zero(ww({0, 0, 1, 0}), 1).w, Weights({0, 1, 0}));
  EXPECT_EQ(ww_delete_zero(ww({3, 0}), 1).w, Weights({3, 0}));
  EXPECT_THROW(ww_delete_zero(ww({3, 0}), 2), boundary_error);
  EXPECT_EQ(ww_delete_zero(ww({3, 0, 0}), 2).w, Weights({3, 0}));
  EXPECT_THROW(ww_delete_zero(ww({3, 0}), 3), usage_error);
}

TEST(DeleteOneWeighted, Examples) {
  EXPECT_EQ(ww_delete_one(ww({2, 0}), 1).w, Weights({1, 0}));
  EXPECT_EQ(ww_delete_one(ww({1, 0, 0}), 1).w, Weights({0, 0}));
  EXPECT_EQ(ww_delete_one(ww({0, 0}), 1).w, Weights({0, 0}));
}

TEST(FirstIndexAtLeast, Examples) {
  EXPECT_EQ(first_index_at_least(ww({0, 0, 1, 0, 2}), 2), 5);
  EXPECT_FALSE(first_index_at_least(ww({0, 0, 1, 0, 2}), 3).has_value());
  EXPECT_EQ(first_index_at_least(ww({1, 0}), 1), 1);
  EXPECT_THROW(first_index_at_least(ww({1, 0}), 0), usage_error);
}

TEST(Spacing, ViolationsAndLevels) {
  WeightedWord v = ww({0, 0, 1, 1, 0});
  auto rep = is_M_spaced(v, 3);
  EXPECT_FALSE(rep.ok);
  ASSERT_TRUE(rep.pair_violation.has_value());
  EXPECT_EQ(*rep.pair_violation, (std::pair<std::int64_t, std::int64_t>{3, 4}));

  // all-pairs condition, not only adjacent entries: weights 2,1,2 with gaps
  // of M each violate the pair of 2s, which needs M^2
  WeightedWord u = ww({0, 0, 2, 0, 0, 1, 0, 0, 2, 0});
  auto ru = is_M_spaced(u, 3);
  EXPECT_FALSE(ru.ok);
  ASSERT_TRUE(ru.pair_violation.has_value());
  EXPECT_EQ(*ru.pair_violation, (std::pair<std::int64_t, std::int64_t>{3, 9}));

  // first-occurrence condition: weight 2 first appearing before index M^2
  WeightedWord f = ww({0, 0, 0, 2, 0, 0, 0, 0, 0, 0});
  auto rf = is_M_spaced(f, 3);
  EXPECT_FALSE(rf.ok);
  EXPECT_EQ(rf.level_violation, 2);
  EXPECT_TRUE(is_M_spaced(f, 3, 1).ok);  // monotone: level 1 is fine
}

TEST(Spacing, RandomSpacedWordsPassAndShiftPropertyHolds) {
  std::mt19937_64 gen(77);
  for (int t = 0; t < 1000; ++t) {
    std::int64_t M = 3 + static_cast<std::int64_t>(gen() % 3);
    WeightedWord v = random_M_spaced(gen, M, 3, 1 + gen() % 5);
    auto rep = is_M_spaced(v, M);
    ASSERT_TRUE(rep.ok);
    // shifting at a positive entry of weight m stays spaced up to level m
    for (std::int64_t i = 1; i <= v.length(); ++i) {
      std::int64_t m = v.w[i - 1];
      if (m <= 0 || i >= v.length()) continue;
      WeightedWord sh = shift(v, i);
      ASSERT_TRUE(is_M_spaced(sh, M, m).ok)
          << "M=" << M << " i=" << i << " m=" << m;
    }
  }
}

TEST(Shift, Examples) {
  EXPECT_EQ(shift(ww({0, 1, 0}), 1).w, Weights({1, 0}));
  EXPECT_EQ(shift(ww({0, 0}), 0).w, Weights({0, 0}));
  EXPECT_THROW(shift(ww({0, 0}), 2), usage_error);
  EXPECT_THROW(shift(ww({0, 0}), 3), usage_error);
}

//---------------------------------------------------------------------------
// Cross-representation commutation, exhaustive.
//---------------------------------------------------------------------------
TEST(Commutation, ExhaustiveWeightedVsBinary) {
  auto words = all_valid_words(6, 3);
  std::int64_t checked = 0;
  for (const auto& w : words) {
    WeightedWord v{w, true};
    Bits b = decode(v);
    for (std::int64_t i = 1; i <= v.length(); ++i) {
      std::int64_t pos = bit_position_of_entry(w, i);
      // delete one 1 from the run at entry i == delete the 1 at the run's
      // first source bit
      {
        WeightedWord wd = ww_delete_one(v, i);
        EXPECT_TRUE(is_valid_weighted(wd.w));
        EXPECT_EQ(decode(wd), delete_one(b, pos));
      }
      // delete the zero at entry i == delete the source 0 at its bit
      try {
        WeightedWord wd = ww_delete_zero(v, i);
        EXPECT_TRUE(is_valid_weighted(wd.w));
        EXPECT_EQ(decode(wd), delete_zero(b, pos));
        // re-encoding the binary result reproduces the weighted result
        // whenever no information was lost at the right edge
        WeightedWord re = encode(delete_zero(b, pos));
        if (re.last_run_complete) {
          EXPECT_EQ(re.w, wd.w);
        }
      } catch (const boundary_error&) {
        // exactly the case: zero at the window edge whose left neighbor is
        // a run - the binary result ends in an unterminated run
        EXPECT_EQ(i, v.length());
        EXPECT_EQ(w[i - 1], 0);
        ASSERT_GE(i, 2);
        EXPECT_GE(w[i - 2], 1);
        EXPECT_FALSE(encode(delete_zero(b, pos)).last_run_complete);
      }
      ++checked;
    }
  }
  // all valid words of length <= 6 with weights <= 3, every index: 2022 cases
  EXPECT_EQ(checked, 2022);
}

TEST(Commutation, EncodeDirection) {
  // applying the binary operator then encoding equals the weighted operator
  // on the encoded word, for every complete source window
  auto words = all_valid_words(5, 3);
  for (const auto& w : words) {
    if (!w.empty() && w.back() != 0) continue;  // keep the source complete
    WeightedWord v{w, true};
    Bits b = decode(v);
    for (std::int64_t i = 1; i <= v.length(); ++i) {
      std::int64_t pos = bit_position_of_entry(w, i);
      WeightedWord lhs = encode(delete_one(b, pos));
      EXPECT_EQ(lhs.w, ww_delete_one(v, i).w);
      try {
        WeightedWord rhs = ww_delete_zero(v, i);
        EXPECT_EQ(encode(delete_zero(b, pos)).w, rhs.w);
      } catch (const boundary_error&) {
      }
    }
  }
}

//---------------------------------------------------------------------------
// Replay and translation.
//---------------------------------------------------------------------------
TEST(WeightedReplay, FastMatchesNaive) {
  std::mt19937_64 gen(909);
  auto words = all_valid_words(5, 3);
  for (int t = 0; t < 500; ++t) {
    WeightedWord zeta{words[gen() % words.size()], true};
    WeightedWord psi{words[gen() % words.size()], true};
    WitnessSchedule s;
    WeightedWord cz = zeta, cp = psi;
    for (int k = 0; k < 6; ++k) {
      bool left = gen() % 2 == 0;
      WeightedWord& cur = left ? cz : cp;
      if (cur.length() == 0) continue;
      WitnessStep st;
      st.side = left ? Side::eta : Side::xi;
      st.op = gen() % 2 ? DeleteKind::zero : DeleteKind::one;
      st.index = 1 + static_cast<std::int64_t>(gen() % cur.length());
      st.count = 1;
      try {
        cur = st.op == DeleteKind::zero ? ww_delete_zero(cur, st.index)
                                        : ww_delete_one(cur, st.index);
      } catch (const boundary_error&) {
        continue;  // skip steps the window cannot decide
      }
      s.steps.push_back(st);
    }
    auto [fz, fp] = replay_weighted(zeta, psi, s);
    EXPECT_EQ(fz.w, cz.w);
    EXPECT_EQ(fp.w, cp.w);
    auto [nz, np] = naive_replay_weighted(zeta, psi, s);
    EXPECT_EQ(nz.w, cz.w);
    EXPECT_EQ(np.w, cp.w);
  }
}

TEST(Translate, EmptyScheduleAndExample) {
  WitnessSchedule empty;
  WitnessSchedule te = translate_witness(empty, ww({0, 0}), ww({0}));
  EXPECT_TRUE(te.steps.empty());
  EXPECT_EQ(te.target_length, 0);

  // (2,0) vs (1,0): one weighted delete-one on the left certifies (1,0);
  // the binary schedule certifies the prefix [1,0]
  WitnessSchedule s;
  s.push(Side::eta, DeleteKind::one, 1);
  s.target_length = 2;
  WitnessSchedule tb = translate_witness(s, ww({2, 0}), ww({1, 0}));
  ASSERT_EQ(tb.steps.size(), 1u);
  EXPECT_EQ(tb.steps[0].side, Side::eta);
  EXPECT_EQ(tb.steps[0].op, DeleteKind::one);
  EXPECT_EQ(tb.steps[0].index, 1);
  EXPECT_EQ(tb.target_length, 2);
  auto [e2, x2] = replay_binary(decode(ww({2, 0})), decode(ww({1, 0})), tb);
  EXPECT_EQ(e2, bits({1, 0}));
  EXPECT_EQ(x2, bits({1, 0}));
  EXPECT_GE(common_prefix_length(e2, x2), tb.target_length);
}

TEST(Translate, CommutesWithReplayOnRandomSchedules) {
  std::mt19937_64 gen(1311);
  auto words = all_valid_words(6, 3);
  int translated = 0;
  for (int t = 0; t < 2000; ++t) {
    WeightedWord zeta{words[gen() % words.size()], true};
    WeightedWord psi{words[gen() % words.size()], true};
    WitnessSchedule s;
    WeightedWord cz = zeta, cp = psi;
    for (int k = 0; k < 5; ++k) {
      bool left = gen() % 2 == 0;
      WeightedWord& cur = left ? cz : cp;
      if (cur.length() == 0) continue;
      WitnessStep st;
      st.side = left ? Side::eta : Side::xi;
      st.op = gen() % 2 ? DeleteKind::zero : DeleteKind::one;
      st.index = 1 + static_cast<std::int64_t>(gen() % cur.length());
      st.count = 1 + static_cast<std::int64_t>(gen() % 2);
      try {
        WeightedWord next = cur;
        for (std::int64_t c = 0; c < st.count; ++c)
          next = st.op == DeleteKind::zero ? ww_delete_zero(next, st.index)
                                           : ww_delete_one(next, st.index);
        cur = next;
      } catch (const boundary_error&) {
        continue;
      } catch (const usage_error&) {
        continue;  // index invalidated by earlier shrink
      }
      s.steps.push_back(st);
    }
    s.target_length = common_prefix_length(cz.w, cp.w);
    WitnessSchedule tb = translate_witness(s, zeta, psi);
    ++translated;
    auto [be, bx] = replay_binary(decode(zeta), decode(psi), tb);
    // binary replay of the translated schedule equals decoding the weighted
    // replay results
    EXPECT_EQ(be, decode(cz));
    EXPECT_EQ(bx, decode(cp));
    EXPECT_GE(common_prefix_length(be, bx), tb.target_length);
    EXPECT_EQ(tb.target_length, decoded_length(Weights(
                                    cz.w.begin(), cz.w.begin() + s.target_length)));
  }
  EXPECT_GT(translated, 1500);
}
