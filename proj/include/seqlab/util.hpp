#pragma once
//---------------------------------------------------------------------------
// util.hpp - shared plumbing: error types, order-statistic Fenwick tree,
// bit packing for serialization.
//---------------------------------------------------------------------------

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace seqlab {

inline constexpr const char* kCodeVersion = "seqlab-1.0.0";

// Raised when a request is malformed (bad index, bad arguments).
struct usage_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Raised when an operation needs data beyond the observed window, e.g. a
// zero deletion whose outcome depends on the unobserved successor entry.
struct boundary_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised when a checked internal invariant fails.
struct internal_error : std::logic_error {
  using std::logic_error::logic_error;
};

#define SEQLAB_CHECK(cond, msg)                         \
  do {                                                  \
    if (!(cond)) throw ::seqlab::internal_error(msg);   \
  } while (0)

//---------------------------------------------------------------------------
// Fenwick tree over int64 with prefix sums and a select (k-th order
// statistic) walk.  Indices are 1-based.
//---------------------------------------------------------------------------
class Fenwick {
 public:
  Fenwick() = default;
  explicit Fenwick(std::size_t n) : n_(n), t_(n + 1, 0) {}

  static Fenwick from_values(const std::vector<std::int64_t>& v) {
    Fenwick f(v.size());
    for (std::size_t i = 1; i <= v.size(); ++i) {
      f.t_[i] += v[i - 1];
      std::size_t j = i + (i & (~i + 1));
      if (j <= v.size()) f.t_[j] += f.t_[i];
    }
    return f;
  }

  std::size_t size() const { return n_; }

  void add(std::size_t i, std::int64_t delta) {
    for (; i <= n_; i += i & (~i + 1)) t_[i] += delta;
  }

  // Sum of positions 1..i.
  std::int64_t prefix(std::size_t i) const {
    std::int64_t s = 0;
    if (i > n_) i = n_;
    for (; i > 0; i -= i & (~i + 1)) s += t_[i];
    return s;
  }

  std::int64_t total() const { return prefix(n_); }

  // Smallest index i with prefix(i) >= k (k >= 1).  Requires k <= total().
  std::size_t select(std::int64_t k) const {
    std::size_t pos = 0;
    std::size_t mask = 1;
    while ((mask << 1) <= n_) mask <<= 1;
    for (; mask > 0; mask >>= 1) {
      std::size_t next = pos + mask;
      if (next <= n_ && t_[next] < k) {
        pos = next;
        k -= t_[next];
      }
    }
    return pos + 1;
  }

 private:
  std::size_t n_ = 0;
  std::vector<std::int64_t> t_;
};

//---------------------------------------------------------------------------
// Bit packing: bit i (1-based) maps to byte (i-1)/8, bit 7-((i-1)%8), i.e.
// big-endian within each byte.  Base64 is the standard alphabet with '='
// padding; the explicit bit length travels alongside the encoded payload.
//---------------------------------------------------------------------------
inline std::string pack_bits_base64(const std::vector<std::uint8_t>& bits) {
  static const char* alphabet =
      "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::vector<std::uint8_t> bytes((bits.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < bits.size(); ++i)
    if (bits[i]) bytes[i / 8] |= static_cast<std::uint8_t>(1u << (7 - (i % 8)));
  std::string out;
  out.reserve(((bytes.size() + 2) / 3) * 4);
  for (std::size_t i = 0; i < bytes.size(); i += 3) {
    std::uint32_t v = static_cast<std::uint32_t>(bytes[i]) << 16;
    std::size_t rem = bytes.size() - i;
    if (rem > 1) v |= static_cast<std::uint32_t>(bytes[i + 1]) << 8;
    if (rem > 2) v |= bytes[i + 2];
    out.push_back(alphabet[(v >> 18) & 63]);
    out.push_back(alphabet[(v >> 12) & 63]);
    out.push_back(rem > 1 ? alphabet[(v >> 6) & 63] : '=');
    out.push_back(rem > 2 ? alphabet[v & 63] : '=');
  }
  return out;
}

inline std::vector<std::uint8_t> unpack_bits_base64(const std::string& text,
                                                    std::size_t n_bits) {
  auto val = [](char c) -> int {
    if (c >= 'A' && c <= 'Z') return c - 'A';
    if (c >= 'a' && c <= 'z') return c - 'a' + 26;
    if (c >= '0' && c <= '9') return c - '0' + 52;
    if (c == '+') return 62;
    if (c == '/') return 63;
    if (c == '=') return -1;
    throw usage_error("invalid base64 character");
  };
  std::vector<std::uint8_t> bytes;
  bytes.reserve((text.size() / 4) * 3);
  for (std::size_t i = 0; i + 3 < text.size(); i += 4) {
    int a = val(text[i]), b = val(text[i + 1]);
    int c = val(text[i + 2]), d = val(text[i + 3]);
    if (a < 0 || b < 0) throw usage_error("malformed base64 block");
    std::uint32_t v = (static_cast<std::uint32_t>(a) << 18) |
                      (static_cast<std::uint32_t>(b) << 12) |
                      (c > 0 ? static_cast<std::uint32_t>(c) << 6 : 0u) |
                      (d > 0 ? static_cast<std::uint32_t>(d) : 0u);
    bytes.push_back(static_cast<std::uint8_t>((v >> 16) & 0xFF));
    if (c >= 0) bytes.push_back(static_cast<std::uint8_t>((v >> 8) & 0xFF));
    if (d >= 0) bytes.push_back(static_cast<std::uint8_t>(v & 0xFF));
  }
  if (bytes.size() * 8 < n_bits) throw usage_error("base64 payload too short");
  std::vector<std::uint8_t> bits(n_bits, 0);
  for (std::size_t i = 0; i < n_bits; ++i)
    bits[i] = (bytes[i / 8] >> (7 - (i % 8))) & 1u;
  return bits;
}

}  // namespace seqlab
