#pragma once

/**
 * @file numcode.hpp
 * @brief Numeric codings: the pairing bijection, fixed-arity tuples, digit
 *        length, codes for sets of cardinality at most two, and primes.
 *
 * pair_encode(x, y) interleaves the binary digits of x and y, alternating
 * between them and starting on the right with y's least significant digit:
 * bit i of y lands at position 2*i, bit i of x at position 2*i + 1.
 *
 * Worked example: x = 15 = 1111b and y = 2 = 0010b interleave to 10101110b,
 * i.e. pair_encode(15, 2) = 174.
 *
 * The map is a bijection N x N -> N; tuples are right-nested pairs
 * <x1, x2, ..., xn> = <x1, <x2, ..., xn>> and the arity is always supplied by
 * the caller (no length prefix is stored).
 */

#include "krt/nat.hpp"

#include <utility>
#include <vector>

namespace krt {

/// Interleave x (odd bit positions) with y (even bit positions).
inline Nat pair_encode(const Nat& x, const Nat& y) {
  return (spread_even(x) << 1) | spread_even(y);
}

/// Inverse of pair_encode.
inline std::pair<Nat, Nat> pair_decode(const Nat& z) {
  return {compact_odd(z), compact_even(z)};
}

/// First component <- odd bit positions.
inline Nat pair_left(const Nat& z) { return compact_odd(z); }

/// Second component <- even bit positions.
inline Nat pair_right(const Nat& z) { return compact_even(z); }

/// Right-nested tuple of the given values (arity >= 1; arity 1 is identity).
inline Nat tuple_encode(const std::vector<Nat>& xs) {
  if (xs.empty()) throw std::invalid_argument("tuple_encode: arity must be >= 1");
  Nat acc = xs.back();
  for (std::size_t i = xs.size() - 1; i-- > 0;) acc = pair_encode(xs[i], acc);
  return acc;
}

/// Inverse of tuple_encode at the given arity.
inline std::vector<Nat> tuple_decode(const Nat& z, std::size_t arity) {
  if (arity == 0) throw std::invalid_argument("tuple_decode: arity must be >= 1");
  std::vector<Nat> out;
  out.reserve(arity);
  Nat rest = z;
  for (std::size_t i = 0; i + 1 < arity; ++i) {
    auto [l, r] = pair_decode(rest);
    out.push_back(std::move(l));
    rest = std::move(r);
  }
  out.push_back(std::move(rest));
  return out;
}

/**
 * Codes for finite sets of cardinality at most two.
 *
 *   {}        -> 0
 *   {u}       -> <u, 0> + 1
 *   {u, u+v}  -> <u, v> + 1   (u = min, v = positive difference)
 *
 * Decoding is total on N: every positive c yields {u, u+v} from
 * (u, v) = pair_decode(c - 1), which collapses to a singleton when v = 0.
 */
inline Nat set_encode(const std::vector<Nat>& elems) {
  if (elems.empty()) return Nat(0);
  if (elems.size() == 1) return pair_encode(elems[0], Nat(0)) + 1;
  if (elems.size() == 2) {
    const Nat& a = elems[0] <= elems[1] ? elems[0] : elems[1];
    const Nat& b = elems[0] <= elems[1] ? elems[1] : elems[0];
    if (a == b) return pair_encode(a, Nat(0)) + 1;
    return pair_encode(a, Nat(b - a)) + 1;
  }
  throw std::invalid_argument("set_encode: cardinality must be <= 2");
}

/// Total decoder; returns the elements in increasing order.
inline std::vector<Nat> set_decode(const Nat& code) {
  if (code == 0) return {};
  auto [u, v] = pair_decode(Nat(code - 1));
  if (v == 0) return {u};
  return {u, Nat(u + v)};
}

/// n-th prime with nth_prime(0) = 2, nth_prime(1) = 3, nth_prime(4) = 11.
inline Nat nth_prime(const Nat& n) {
  // Trial division is plenty at the scales this library drives; guard the
  // index so a stray huge argument fails loudly instead of spinning.
  if (n > 100000) throw resource_error("nth_prime: index above host guard (100000)");
  const std::uint64_t target = n.convert_to<std::uint64_t>();
  std::vector<std::uint64_t> primes;
  primes.reserve(target + 1);
  for (std::uint64_t cand = 2;; ++cand) {
    bool composite = false;
    for (std::uint64_t p : primes) {
      if (p * p > cand) break;
      if (cand % p == 0) {
        composite = true;
        break;
      }
    }
    if (!composite) {
      primes.push_back(cand);
      if (primes.size() == target + 1) return Nat(cand);
    }
  }
}

}  // namespace krt
