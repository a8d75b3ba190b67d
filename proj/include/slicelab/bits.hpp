#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace slicelab {

/// Subset of [n] for n <= 64. Variable i (1-based) is bit i-1.
using Mask = std::uint64_t;

inline constexpr int kMaxExactVars = 64;

inline constexpr Mask bit_of(int i) { return Mask{1} << (i - 1); }

inline int popcount(Mask m) { return std::popcount(m); }

inline Mask full_mask(int n) {
  return n >= 64 ? ~Mask{0} : (Mask{1} << n) - 1;
}

inline bool contains(Mask m, int i) { return (m >> (i - 1)) & 1U; }

/// 1-based indices of the set bits, ascending.
inline std::vector<int> indices_of(Mask m) {
  std::vector<int> out;
  out.reserve(std::popcount(m));
  while (m) {
    out.push_back(std::countr_zero(m) + 1);
    m &= m - 1;
  }
  return out;
}

inline Mask mask_of(const std::vector<int>& indices) {
  Mask m = 0;
  for (int i : indices) {
    if (i < 1 || i > kMaxExactVars) throw std::out_of_range("variable index out of range");
    m |= bit_of(i);
  }
  return m;
}

/// Next mask with the same popcount in increasing numeric order (Gosper).
inline Mask next_same_popcount(Mask m) {
  const Mask c = m & (~m + 1);
  const Mask r = m + c;
  return (((r ^ m) >> 2) / c) | r;
}

/// All k-subsets of [n] as masks, ascending.
inline std::vector<Mask> k_subsets(int n, int k) {
  std::vector<Mask> out;
  if (k < 0 || k > n || n > kMaxExactVars) return out;
  if (k == 0) {
    out.push_back(0);
    return out;
  }
  const Mask limit_bit = n == 64 ? 0 : Mask{1} << n;
  Mask m = full_mask(k);
  while (true) {
    out.push_back(m);
    if (m == (full_mask(k) << (n - k))) break;
    m = next_same_popcount(m);
    if (limit_bit && m >= limit_bit) break;
  }
  return out;
}

/// Calls fn(sub) for every submask of m, including 0 and m.
template <class Fn>
void for_each_submask(Mask m, Fn&& fn) {
  Mask s = m;
  while (true) {
    fn(s);
    if (s == 0) break;
    s = (s - 1) & m;
  }
}

}  // namespace slicelab
