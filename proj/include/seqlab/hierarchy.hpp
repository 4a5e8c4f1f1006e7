#pragma once
//---------------------------------------------------------------------------
// hierarchy.hpp - deterministic hierarchical sequences.  For a base L >= 2:
//   * zeta(L)_j   = the exact power of L dividing j (0 when L does not
//                   divide j), giving a self-similar weighted word;
//   * tilde_zeta(L)_j = 3 M^{k-1} with M = 3(L+1) where k = zeta(L)_j >= 1,
//                   and 0 otherwise;
//   * eta(L)      = the binary sequence decoding tilde_zeta(L);
//   * Z(L)        = the positions of the zeros of eta(L).
// Everything is generated by direct formula with O(log j) random access.
//---------------------------------------------------------------------------

#include <cstdint>
#include <vector>

#include "seqlab/binary_seq.hpp"
#include "seqlab/util.hpp"
#include "seqlab/weighted_word.hpp"

namespace seqlab {

struct HierarchySpec {
  std::int64_t L = 2;
  std::int64_t M = 9;          // always 3(L+1)
  double p_threshold = 0.0;    // 1/(576 (L+1)^2) == 1/(64 M^2)

  static HierarchySpec of(std::int64_t L) {
    if (L < 2) throw usage_error("HierarchySpec: L must be >= 2");
    HierarchySpec s;
    s.L = L;
    s.M = 3 * (L + 1);
    s.p_threshold = 1.0 / (576.0 * static_cast<double>(L + 1) * static_cast<double>(L + 1));
    // the two published forms of the threshold coincide identically
    SEQLAB_CHECK(64.0 * s.M * s.M == 576.0 * (L + 1) * (L + 1),
                 "HierarchySpec: threshold forms disagree");
    return s;
  }
};

// Exact power of L dividing j; 0 when L does not divide j.
inline std::int64_t zeta_at(const HierarchySpec& spec, std::int64_t j) {
  if (j < 1) throw usage_error("zeta_at: j must be >= 1");
  std::int64_t k = 0;
  while (j % spec.L == 0) {
    j /= spec.L;
    ++k;
  }
  return k;
}

inline WeightedWord zeta_window(const HierarchySpec& spec, std::int64_t n) {
  if (n < 1) throw usage_error("zeta_window: n must be >= 1");
  WeightedWord out;
  out.w.reserve(static_cast<std::size_t>(n));
  for (std::int64_t j = 1; j <= n; ++j) out.w.push_back(zeta_at(spec, j));
  return out;
}

// Value at j of the sequence shifted by m * L^{n_shift} positions.
inline std::int64_t shifted_zeta_at(const HierarchySpec& spec, std::int64_t m,
                                    std::int64_t n_shift, std::int64_t j) {
  if (m < 0 || n_shift < 0) throw usage_error("shifted_zeta_at: bad shift");
  std::int64_t step = 1;
  for (std::int64_t t = 0; t < n_shift; ++t) {
    SEQLAB_CHECK(step <= (std::int64_t{1} << 62) / spec.L,
                 "shifted_zeta_at: shift overflow");
    step *= spec.L;
  }
  return zeta_at(spec, m * step + j);
}

// 3 M^{k-1}, with overflow reported rather than wrapped.
inline std::int64_t tilde_weight(const HierarchySpec& spec, std::int64_t k) {
  if (k <= 0) return 0;
  std::int64_t v = 3;
  for (std::int64_t t = 1; t < k; ++t) {
    if (v > (std::int64_t{1} << 62) / spec.M)
      throw usage_error("tilde_weight: value overflows 64-bit range");
    v *= spec.M;
  }
  return v;
}

inline std::int64_t tilde_zeta_at(const HierarchySpec& spec, std::int64_t j) {
  return tilde_weight(spec, zeta_at(spec, j));
}

inline WeightedWord tilde_zeta_window(const HierarchySpec& spec, std::int64_t n) {
  if (n < 1) throw usage_error("tilde_zeta_window: n must be >= 1");
  WeightedWord out;
  out.w.reserve(static_cast<std::size_t>(n));
  for (std::int64_t j = 1; j <= n; ++j) out.w.push_back(tilde_zeta_at(spec, j));
  return out;
}

// Number of source bits occupied by the first x entries of tilde_zeta(L):
// a zero entry holds one bit, a positive entry `v` holds v bits.
inline std::int64_t tilde_prefix_bits(const HierarchySpec& spec, std::int64_t x) {
  if (x < 0) throw usage_error("tilde_prefix_bits: x must be >= 0");
  __int128 total = 0;
  for (std::int64_t j = 1; j <= x; ++j) {
    std::int64_t v = tilde_zeta_at(spec, j);
    total += v > 0 ? v : 1;
    if (total > (static_cast<__int128>(1) << 62))
      throw usage_error("tilde_prefix_bits: prefix exceeds 64-bit range");
  }
  return static_cast<std::int64_t>(total);
}

// First n_bits of the binary sequence decoding tilde_zeta(L), generated one
// word entry at a time.
inline Bits eta_window(const HierarchySpec& spec, std::int64_t n_bits) {
  if (n_bits < 1) throw usage_error("eta_window: n_bits must be >= 1");
  Bits out;
  out.reserve(static_cast<std::size_t>(n_bits));
  for (std::int64_t j = 1; static_cast<std::int64_t>(out.size()) < n_bits; ++j) {
    std::int64_t v = tilde_zeta_at(spec, j);
    if (v == 0) {
      out.push_back(0);
    } else {
      std::int64_t take = std::min<std::int64_t>(v, n_bits - out.size());
      out.insert(out.end(), static_cast<std::size_t>(take), 1);
    }
  }
  return out;
}

// Positions (1-based, ascending) of the zeros of eta(L) within [1, n_bits].
// The zero of word entry j sits right after the bits of entries 1..j-1.
inline std::vector<std::int64_t> zero_set(const HierarchySpec& spec,
                                          std::int64_t n_bits) {
  if (n_bits < 1) throw usage_error("zero_set: n_bits must be >= 1");
  std::vector<std::int64_t> zeros;
  __int128 pos = 1;  // bit position where entry j starts
  for (std::int64_t j = 1; pos <= n_bits; ++j) {
    std::int64_t v = tilde_zeta_at(spec, j);
    if (v == 0) {
      zeros.push_back(static_cast<std::int64_t>(pos));
      pos += 1;
    } else {
      pos += v;
    }
  }
  return zeros;
}

}  // namespace seqlab
