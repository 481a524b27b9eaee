#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

// Bitstring helpers. Strings hold ASCII '0'/'1' with the leftmost character
// as bit 1 (the convention used by all public interfaces). Masks put bit p
// of the string at bit position p-1.

namespace exactq::bits {

inline bool is_bitstring(std::string_view s) {
  for (char c : s)
    if (c != '0' && c != '1') return false;
  return true;
}

inline void require_bitstring(std::string_view s, std::size_t len,
                              const char* what) {
  if (s.size() != len) {
    throw std::invalid_argument(std::string(what) + ": expected length " +
                                std::to_string(len) + ", got " +
                                std::to_string(s.size()));
  }
  if (!is_bitstring(s)) {
    throw std::invalid_argument(std::string(what) +
                                ": characters must be '0' or '1'");
  }
}

inline int weight(std::string_view s) {
  int w = 0;
  for (char c : s) w += (c == '1');
  return w;
}

inline int hamming(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("hamming: length mismatch");
  }
  int h = 0;
  for (std::size_t i = 0; i < a.size(); ++i) h += (a[i] != b[i]);
  return h;
}

inline std::uint32_t mask_from_string(std::string_view s) {
  std::uint32_t m = 0;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s[i] == '1') m |= (1u << i);
  return m;
}

inline std::string string_from_mask(int n, std::uint32_t m) {
  std::string s(static_cast<std::size_t>(n), '0');
  for (int i = 0; i < n; ++i)
    if (m & (1u << i)) s[static_cast<std::size_t>(i)] = '1';
  return s;
}

}  // namespace exactq::bits
