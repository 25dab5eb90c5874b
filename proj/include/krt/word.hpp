#pragma once

/**
 * @file word.hpp
 * @brief Shared immutable machine values with structure caches.
 *
 * Register contents, simulation inputs, and memo entries all share `Word`s —
 * reference-counted immutable naturals.  A WordVal lazily caches the facts
 * that make interleave-pairing cheap to use at scale:
 *
 *   left/right   the components when the value was built by (or already
 *                split with) the pairing bijection, so splitting a pair that
 *                was assembled in-machine costs nothing;
 *   spread       spread_even(n), so pairing the same operand repeatedly
 *                re-uses the interleaved form;
 *   hash         a content hash for memo keys;
 *   body         an owner-tagged slot where an interpreter can park the
 *                decoded program for this value (type-erased here to keep
 *                this header independent of the machine).
 *
 * All caches are value-level: they depend only on `n`, never on who computed
 * it, so sharing WordVals across runs and systems is sound.  Single-threaded
 * by design.
 */

#include "krt/nat.hpp"

#include <array>
#include <memory>
#include <optional>

namespace krt {

struct WordVal;
using Word = std::shared_ptr<const WordVal>;

struct WordVal {
  Nat n;

  mutable Word left;                    // compact_odd(n), when known
  mutable Word right;                   // compact_even(n), when known
  mutable std::optional<Nat> spread;    // spread_even(n), when known
  mutable std::uint64_t hash = 0;
  mutable bool hash_ready = false;
  mutable const void* body_owner = nullptr;      // which interpreter cached
  mutable std::shared_ptr<const void> body_ref;  // ... its decoded program

  explicit WordVal(Nat v) : n(std::move(v)) {}

  const Nat& spread_bits() const {
    if (!spread) spread = spread_even(n);
    return *spread;
  }

  std::uint64_t hash_value() const {
    if (!hash_ready) {
      hash = nat_hash(n);
      hash_ready = true;
    }
    return hash;
  }
};

namespace detail {
inline const std::array<Word, 1024>& small_words() {
  static const auto table = [] {
    std::array<Word, 1024> t;
    for (std::size_t i = 0; i < t.size(); ++i)
      t[i] = std::make_shared<WordVal>(Nat(i));
    return t;
  }();
  return table;
}
}  // namespace detail

inline Word make_word(Nat v) {
  if (v < 1024) return detail::small_words()[v.convert_to<std::size_t>()];
  return std::make_shared<WordVal>(std::move(v));
}

inline const Word& zero_word() { return detail::small_words()[0]; }
inline const Word& one_word() { return detail::small_words()[1]; }

/// <a, b> with provenance, so left_word/right_word on the result are O(1).
inline Word pair_word(const Word& a, const Word& b) {
  Nat n = (a->spread_bits() << 1) | b->spread_bits();
  auto w = std::make_shared<WordVal>(std::move(n));
  w->left = a;
  w->right = b;
  return w;
}

inline Word left_word(const Word& w) {
  if (!w->left) w->left = make_word(compact_odd(w->n));
  return w->left;
}

inline Word right_word(const Word& w) {
  if (!w->right) w->right = make_word(compact_even(w->n));
  return w->right;
}

}  // namespace krt
