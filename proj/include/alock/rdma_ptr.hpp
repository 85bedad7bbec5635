#pragma once

#include <cassert>
#include <cstdint>

namespace alock {

// Global pointer into the partitioned memory image: a 4-bit node id in the
// top bits and a 60-bit byte offset into that node's arena below it.  Raw
// value 0 doubles as the null pointer, which is why the arena allocator never
// hands out offset 0 on any node.
class RdmaPtr {
 public:
  static constexpr uint64_t kNodeBits = 4;
  static constexpr uint64_t kAddrBits = 60;
  static constexpr uint32_t kMaxNodes = 1u << kNodeBits;
  static constexpr uint64_t kAddrMask = (uint64_t{1} << kAddrBits) - 1;

  constexpr RdmaPtr() = default;

  static constexpr RdmaPtr from_raw(uint64_t raw) {
    RdmaPtr p;
    p.raw_ = raw;
    return p;
  }

  static constexpr RdmaPtr make(uint32_t node, uint64_t addr) {
    assert(node < kMaxNodes);
    assert(addr <= kAddrMask);
    return from_raw((uint64_t{node} << kAddrBits) | addr);
  }

  constexpr uint64_t raw() const { return raw_; }
  constexpr uint32_t node() const { return static_cast<uint32_t>(raw_ >> kAddrBits); }
  constexpr uint64_t addr() const { return raw_ & kAddrMask; }
  constexpr bool null() const { return raw_ == 0; }

  // Same node, offset advanced by `bytes`.
  constexpr RdmaPtr plus(uint64_t bytes) const {
    assert(addr() + bytes <= kAddrMask);
    return from_raw(raw_ + bytes);
  }

  friend constexpr bool operator==(RdmaPtr a, RdmaPtr b) { return a.raw_ == b.raw_; }
  friend constexpr bool operator!=(RdmaPtr a, RdmaPtr b) { return a.raw_ != b.raw_; }

 private:
  uint64_t raw_ = 0;
};

inline constexpr RdmaPtr kNullPtr{};

}  // namespace alock
