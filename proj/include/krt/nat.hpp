#pragma once

/**
 * @file nat.hpp
 * @brief Arbitrary-precision naturals plus the low-level bit machinery the
 *        rest of the library is built on.
 *
 * Every object the library manipulates -- data, program codes, budgets, step
 * counts -- is a natural number.  We use boost::multiprecision::cpp_int and
 * maintain non-negativity by construction (all subtractions are truncated).
 *
 * The hot operations are bit interleaving and de-interleaving (the pairing
 * function lives on top of them), so they are implemented over exported byte
 * buffers with 256-entry lookup tables rather than per-bit loops.
 */

#include <boost/multiprecision/cpp_int.hpp>

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace krt {

using Nat = boost::multiprecision::cpp_int;

/// Thrown when a computation exceeds a host resource guard (memory, depth,
/// table size).  This is a host limitation, never a semantic outcome.
struct resource_error : std::runtime_error {
  explicit resource_error(const std::string& what) : std::runtime_error(what) {}
};

/// Number of binary digits of k, with bitlen(0) defined as 1 (the digit "0").
inline std::size_t bitlen_sz(const Nat& k) {
  if (k == 0) return 1;
  return static_cast<std::size_t>(msb(k)) + 1;
}

/// bitlen as a Nat (the published operation; see numcode.hpp).
inline Nat bitlen(const Nat& k) { return Nat(bitlen_sz(k)); }

namespace detail {

/// Little-endian byte image of v (at least one byte; 0 -> {0}).
inline std::vector<std::uint8_t> to_bytes(const Nat& v) {
  std::vector<std::uint8_t> out;
  export_bits(v, std::back_inserter(out), 8, /*msv_first=*/false);
  if (out.empty()) out.push_back(0);
  return out;
}

inline Nat from_bytes(const std::vector<std::uint8_t>& bytes) {
  Nat v;
  import_bits(v, bytes.begin(), bytes.end(), 8, /*msv_first=*/false);
  return v;
}

/// spread_table[b] has bit i of b at position 2*i.
inline const std::array<std::uint16_t, 256>& spread_table() {
  static const std::array<std::uint16_t, 256> table = [] {
    std::array<std::uint16_t, 256> t{};
    for (unsigned b = 0; b < 256; ++b) {
      std::uint16_t s = 0;
      for (unsigned i = 0; i < 8; ++i)
        if (b & (1u << i)) s |= static_cast<std::uint16_t>(1u << (2 * i));
      t[b] = s;
    }
    return t;
  }();
  return table;
}

/// compact_table[w] gathers the even-position bits of the byte w into 4 bits.
inline const std::array<std::uint8_t, 256>& compact_table() {
  static const std::array<std::uint8_t, 256> table = [] {
    std::array<std::uint8_t, 256> t{};
    for (unsigned w = 0; w < 256; ++w) {
      std::uint8_t c = 0;
      for (unsigned i = 0; i < 4; ++i)
        if (w & (1u << (2 * i))) c |= static_cast<std::uint8_t>(1u << i);
      t[w] = c;
    }
    return t;
  }();
  return table;
}

}  // namespace detail

/// Value with bit i of v moved to position 2*i (even positions; odd are 0).
inline Nat spread_even(const Nat& v) {
  if (v == 0) return Nat(0);
  const auto bytes = detail::to_bytes(v);
  const auto& tab = detail::spread_table();
  std::vector<std::uint8_t> out(bytes.size() * 2);
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    const std::uint16_t s = tab[bytes[i]];
    out[2 * i] = static_cast<std::uint8_t>(s & 0xff);
    out[2 * i + 1] = static_cast<std::uint8_t>(s >> 8);
  }
  return detail::from_bytes(out);
}

/// Gather the even-position bits of v (inverse of spread_even on its range).
inline Nat compact_even(const Nat& v) {
  if (v == 0) return Nat(0);
  auto bytes = detail::to_bytes(v);
  if (bytes.size() % 2) bytes.push_back(0);
  const auto& tab = detail::compact_table();
  std::vector<std::uint8_t> out(bytes.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const std::uint8_t lo = tab[bytes[2 * i]];
    const std::uint8_t hi = tab[bytes[2 * i + 1]];
    out[i] = static_cast<std::uint8_t>(lo | (hi << 4));
  }
  return detail::from_bytes(out);
}

/// Gather the odd-position bits of v.
inline Nat compact_odd(const Nat& v) { return compact_even(v >> 1); }

/// Truncated subtraction: max(a - b, 0).
inline Nat monus(const Nat& a, const Nat& b) { return a <= b ? Nat(0) : Nat(a - b); }

/// Parse a non-negative decimal string (throws std::runtime_error on junk).
inline Nat nat_from_dec(const std::string& s) {
  if (s.empty()) throw std::runtime_error("empty number");
  for (char c : s)
    if (c < '0' || c > '9') throw std::runtime_error("bad decimal digit in '" + s + "'");
  return Nat(s);
}

/// Canonical base-two string, most significant digit first ("0" for zero).
inline std::string to_binary_string(const Nat& v) {
  if (v == 0) return "0";
  const std::size_t n = bitlen_sz(v);
  std::string s(n, '0');
  for (std::size_t i = 0; i < n; ++i)
    if (bit_test(v, static_cast<unsigned>(n - 1 - i))) s[i] = '1';
  return s;
}

/// Parse a base-two string (digits '0'/'1', MSB first).
inline Nat nat_from_binary(const std::string& s) {
  if (s.empty()) throw std::runtime_error("empty binary literal");
  Nat v = 0;
  for (char c : s) {
    if (c != '0' && c != '1') throw std::runtime_error("bad binary digit in '" + s + "'");
    v <<= 1;
    if (c == '1') v += 1;
  }
  return v;
}

/// 64-bit FNV-1a style hash over the byte image (for cache keys).
inline std::uint64_t nat_hash(const Nat& v) {
  std::uint64_t h = 1469598103934665603ull;
  const auto bytes = detail::to_bytes(v);
  for (std::uint8_t b : bytes) {
    h ^= b;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace krt
