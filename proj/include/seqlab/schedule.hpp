#pragma once
//---------------------------------------------------------------------------
// schedule.hpp - deletion schedules ("witnesses").  A schedule lists, per
// side of a sequence pair, which deletion operator to apply at which 1-based
// position of the CURRENT state of that side.  Steps carry a repeat count so
// operator powers stay one step; replaying a counted step equals replaying
// the unit step `count` times.
//---------------------------------------------------------------------------

#include <cstdint>
#include <string>
#include <vector>

#include "seqlab/util.hpp"

namespace seqlab {

enum class Side : std::uint8_t { eta = 0, xi = 1 };
enum class DeleteKind : std::uint8_t { zero = 0, one = 1 };

inline const char* to_string(Side s) { return s == Side::eta ? "eta" : "xi"; }
inline const char* to_string(DeleteKind k) {
  return k == DeleteKind::zero ? "delete_zero" : "delete_one";
}

struct WitnessStep {
  Side side;
  DeleteKind op;
  std::int64_t index = 1;  // 1-based position in the current state
  std::int64_t count = 1;  // number of consecutive applications

  friend bool operator==(const WitnessStep&, const WitnessStep&) = default;
};

// A deletion schedule together with the length of the common prefix it
// certifies once both sides have been transformed.
struct WitnessSchedule {
  std::vector<WitnessStep> steps;
  std::int64_t target_length = 0;

  void push(Side side, DeleteKind op, std::int64_t index, std::int64_t count = 1) {
    if (count <= 0) return;
    steps.push_back({side, op, index, count});
  }
};

}  // namespace seqlab
