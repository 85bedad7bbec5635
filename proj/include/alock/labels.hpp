#pragma once

#include <cstdint>

namespace alock {

// Control points shared by the operational lock machines and the
// transition-system checker; the bisimulation harness drives both sides at
// this granularity.  kP1/kNcs/kEnter/kCs/kExit belong to the surrounding
// request loop, the c-labels to the cohort queue, the g-labels to the global
// tie-break, and the r-labels to the hand-off on release.
enum class Label : uint8_t {
  kP1, kNcs, kEnter, kP2, kCs, kExit,
  kC1, kSwap, kCwait, kC2, kC3, kC4, kC5, kC6, kC7, kC8, kC9, kC10,
  kG1, kGwait, kG2, kG3, kG4,
  kCas, kR1, kR2, kR3,
};

const char* to_string(Label l);

}  // namespace alock
