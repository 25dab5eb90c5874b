#pragma once

/**
 * @file sentence.hpp
 * @brief First-order sentence templates the provability oracle is queried on.
 *
 * Only a handful of closed sentence shapes ever get asked about, so sentences
 * are represented as typed templates with numeral slots instead of a general
 * term language:
 *
 *   Equiv(a, b, sys)          "the sys-programs a and b compute the same function"
 *   ExistsDistinctEquiv(sys)  "(exists q, r with q != r) sys_q = sys_r"
 *   IsUniversal(u, sys)       "u is universal in sys"
 *   ExistsUniversal(sys)      "(exists u) u is universal in sys"
 *   HaltsWith(p, x, y)        "base program p halts on x with output y"
 *
 * A SystemTag names the program system a sentence talks about.  The base
 * system is `phi`; a derived system is identified by the code that defines it,
 * so tags of derived systems carry that code.
 *
 * Numerals are stored as naturals and rendered in base two, which keeps the
 * serialized length linear in the numeral's digit count.  The canonical
 * serialization is injective; it doubles as the pattern syntax for oracle
 * scripts, where numeral slots (and a derived tag's defining code) may be
 * wildcards.
 */

#include "krt/nat.hpp"
#include "krt/numcode.hpp"

#include <array>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace krt {

enum class SystemKind : std::uint8_t { phi = 0, psi = 1, eta = 2, theta = 3, zeta = 4 };

inline const char* system_kind_name(SystemKind k) {
  switch (k) {
    case SystemKind::phi: return "phi";
    case SystemKind::psi: return "psi";
    case SystemKind::eta: return "eta";
    case SystemKind::theta: return "theta";
    case SystemKind::zeta: return "zeta";
  }
  return "?";
}

/// Which program system a sentence refers to.  Derived systems (everything
/// except phi) are named by their defining code.
struct SystemTag {
  SystemKind kind = SystemKind::phi;
  Nat defining = 0;  // meaningful iff kind != phi

  static SystemTag base() { return {}; }
  static SystemTag derived(SystemKind k, Nat defining_code) {
    return {k, std::move(defining_code)};
  }

  bool operator==(const SystemTag& o) const {
    if (kind != o.kind) return false;
    return kind == SystemKind::phi || defining == o.defining;
  }

  /// Numeric code: <kind, defining>; phi is always <0,0> = 0.
  Nat code() const {
    return pair_encode(Nat(static_cast<unsigned>(kind)),
                       kind == SystemKind::phi ? Nat(0) : defining);
  }
};

enum class SentenceKind : std::uint8_t {
  equiv = 0,
  exists_distinct_equiv = 1,
  is_universal = 2,
  exists_universal = 3,
  halts_with = 4,
};

inline const char* sentence_kind_name(SentenceKind k) {
  switch (k) {
    case SentenceKind::equiv: return "equiv";
    case SentenceKind::exists_distinct_equiv: return "existsdistinct";
    case SentenceKind::is_universal: return "isuniversal";
    case SentenceKind::exists_universal: return "existsuniversal";
    case SentenceKind::halts_with: return "haltswith";
  }
  return "?";
}

/// Number of numeral slots each template carries.
inline std::size_t sentence_arity(SentenceKind k) {
  switch (k) {
    case SentenceKind::equiv: return 2;
    case SentenceKind::exists_distinct_equiv: return 0;
    case SentenceKind::is_universal: return 1;
    case SentenceKind::exists_universal: return 0;
    case SentenceKind::halts_with: return 3;
  }
  return 0;
}

inline bool sentence_kind_has_tag(SentenceKind k) {
  return k != SentenceKind::halts_with;  // HaltsWith is about the base system
}

struct Sentence {
  SentenceKind kind = SentenceKind::exists_distinct_equiv;
  SystemTag sys;            // ignored for halts_with
  std::vector<Nat> slots;   // numerals, sentence_arity(kind) of them

  bool operator==(const Sentence& o) const {
    if (kind != o.kind || slots != o.slots) return false;
    return !sentence_kind_has_tag(kind) || sys == o.sys;
  }

  static Sentence equiv(Nat a, Nat b, SystemTag tag) {
    return {SentenceKind::equiv, std::move(tag), {std::move(a), std::move(b)}};
  }
  static Sentence exists_distinct_equiv(SystemTag tag) {
    return {SentenceKind::exists_distinct_equiv, std::move(tag), {}};
  }
  static Sentence is_universal(Nat u, SystemTag tag) {
    return {SentenceKind::is_universal, std::move(tag), {std::move(u)}};
  }
  static Sentence exists_universal(SystemTag tag) {
    return {SentenceKind::exists_universal, std::move(tag), {}};
  }
  static Sentence halts_with(Nat p, Nat x, Nat y) {
    return {SentenceKind::halts_with, SystemTag::base(),
            {std::move(p), std::move(x), std::move(y)}};
  }

  /**
   * Numeric code <kind, <tag, payload>> where payload right-nests the slots
   * (0 when there are none).  This is the form machine programs assemble with
   * pairing instructions before an oracle query.
   */
  Nat code() const {
    Nat payload = 0;
    if (!slots.empty()) payload = tuple_encode(slots);
    const Nat tag_code = sentence_kind_has_tag(kind) ? sys.code() : Nat(0);
    return pair_encode(Nat(static_cast<unsigned>(kind)),
                       pair_encode(tag_code, payload));
  }

  /// Inverse of code(); empty when the number is not a sentence code.
  static std::optional<Sentence> from_code(const Nat& z) {
    auto [k, rest] = pair_decode(z);
    if (k > 4) return std::nullopt;
    const auto kind = static_cast<SentenceKind>(k.convert_to<unsigned>());
    auto [tag_code, payload] = pair_decode(rest);
    Sentence s;
    s.kind = kind;
    if (sentence_kind_has_tag(kind)) {
      auto [sk, defining] = pair_decode(tag_code);
      if (sk > 4) return std::nullopt;
      s.sys.kind = static_cast<SystemKind>(sk.convert_to<unsigned>());
      if (s.sys.kind == SystemKind::phi && defining != 0) return std::nullopt;
      s.sys.defining = std::move(defining);
    } else if (tag_code != 0) {
      return std::nullopt;
    }
    const std::size_t arity = sentence_arity(kind);
    if (arity == 0) {
      if (payload != 0) return std::nullopt;
    } else {
      s.slots = tuple_decode(payload, arity);
    }
    return s;
  }

  std::string serialize() const;
};

namespace detail {

inline const std::array<const char*, 3>& slot_names(SentenceKind k) {
  static const std::array<const char*, 3> equiv_names{"a", "b", ""};
  static const std::array<const char*, 3> universal_names{"u", "", ""};
  static const std::array<const char*, 3> halts_names{"p", "x", "y"};
  static const std::array<const char*, 3> none{"", "", ""};
  switch (k) {
    case SentenceKind::equiv: return equiv_names;
    case SentenceKind::is_universal: return universal_names;
    case SentenceKind::halts_with: return halts_names;
    default: return none;
  }
}

}  // namespace detail

inline std::string Sentence::serialize() const {
  std::ostringstream out;
  out << sentence_kind_name(kind);
  if (sentence_kind_has_tag(kind)) {
    out << " sys=" << system_kind_name(sys.kind);
    if (sys.kind != SystemKind::phi) out << ':' << to_binary_string(sys.defining);
  }
  const auto& names = detail::slot_names(kind);
  for (std::size_t i = 0; i < slots.size(); ++i)
    out << ' ' << names[i] << '=' << to_binary_string(slots[i]);
  return out.str();
}

/**
 * A sentence shape with optional holes, used by scripted oracles.  A hole in
 * a numeral slot (or in a derived tag's defining code) matches any value, so
 * self-referential sentences can be targeted before their own code is known.
 */
struct SentencePattern {
  SentenceKind kind = SentenceKind::exists_distinct_equiv;
  SystemKind sys_kind = SystemKind::phi;
  std::optional<Nat> defining;             // nullopt = wildcard (non-phi only)
  std::vector<std::optional<Nat>> slots;   // nullopt = wildcard

  bool matches(const Sentence& s) const {
    if (s.kind != kind) return false;
    if (sentence_kind_has_tag(kind)) {
      if (s.sys.kind != sys_kind) return false;
      if (sys_kind != SystemKind::phi && defining && *defining != s.sys.defining)
        return false;
    }
    for (std::size_t i = 0; i < slots.size(); ++i)
      if (slots[i] && *slots[i] != s.slots[i]) return false;
    return true;
  }

  std::string serialize() const {
    std::ostringstream out;
    out << sentence_kind_name(kind);
    if (sentence_kind_has_tag(kind)) {
      out << " sys=" << system_kind_name(sys_kind);
      if (sys_kind != SystemKind::phi)
        out << ':' << (defining ? to_binary_string(*defining) : std::string("*"));
    }
    const auto& names = detail::slot_names(kind);
    for (std::size_t i = 0; i < slots.size(); ++i)
      out << ' ' << names[i] << '='
          << (slots[i] ? to_binary_string(*slots[i]) : std::string("*"));
    return out.str();
  }
};

namespace detail {

inline std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> parts;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) parts.push_back(tok);
  return parts;
}

inline std::optional<SentenceKind> kind_from_name(const std::string& name) {
  for (unsigned k = 0; k <= 4; ++k) {
    const auto kind = static_cast<SentenceKind>(k);
    if (name == sentence_kind_name(kind)) return kind;
  }
  return std::nullopt;
}

inline std::optional<SystemKind> system_kind_from_name(const std::string& name) {
  for (unsigned k = 0; k <= 4; ++k) {
    const auto kind = static_cast<SystemKind>(k);
    if (name == system_kind_name(kind)) return kind;
  }
  return std::nullopt;
}

}  // namespace detail

/**
 * Parse the canonical serialization of a sentence pattern.  Set
 * `allow_wildcards` to false to demand a fully concrete sentence.
 * Throws std::runtime_error with a description on malformed input.
 */
inline SentencePattern parse_sentence_pattern(const std::string& text,
                                              bool allow_wildcards = true) {
  const auto parts = detail::split_ws(text);
  if (parts.empty()) throw std::runtime_error("empty sentence");
  const auto kind = detail::kind_from_name(parts[0]);
  if (!kind) throw std::runtime_error("unknown sentence kind '" + parts[0] + "'");

  SentencePattern pat;
  pat.kind = *kind;
  std::size_t next = 1;
  if (sentence_kind_has_tag(*kind)) {
    if (next >= parts.size() || parts[next].rfind("sys=", 0) != 0)
      throw std::runtime_error("expected sys= tag in sentence '" + text + "'");
    std::string tag = parts[next].substr(4);
    const auto colon = tag.find(':');
    std::string sys_name = colon == std::string::npos ? tag : tag.substr(0, colon);
    const auto sk = detail::system_kind_from_name(sys_name);
    if (!sk) throw std::runtime_error("unknown system tag '" + sys_name + "'");
    pat.sys_kind = *sk;
    if (*sk == SystemKind::phi) {
      if (colon != std::string::npos)
        throw std::runtime_error("phi carries no defining code");
    } else {
      if (colon == std::string::npos)
        throw std::runtime_error("derived system tag needs :code or :*");
      const std::string code = tag.substr(colon + 1);
      if (code == "*") {
        if (!allow_wildcards) throw std::runtime_error("wildcard not allowed here");
        pat.defining = std::nullopt;
      } else {
        pat.defining = nat_from_binary(code);
      }
    }
    ++next;
  }

  const std::size_t arity = sentence_arity(*kind);
  const auto& names = detail::slot_names(*kind);
  pat.slots.resize(arity);
  for (std::size_t i = 0; i < arity; ++i, ++next) {
    const std::string prefix = std::string(names[i]) + "=";
    if (next >= parts.size() || parts[next].rfind(prefix, 0) != 0)
      throw std::runtime_error("expected " + prefix + "... in sentence '" + text + "'");
    const std::string val = parts[next].substr(prefix.size());
    if (val == "*") {
      if (!allow_wildcards) throw std::runtime_error("wildcard not allowed here");
      pat.slots[i] = std::nullopt;
    } else {
      pat.slots[i] = nat_from_binary(val);
    }
  }
  if (next != parts.size())
    throw std::runtime_error("trailing tokens in sentence '" + text + "'");
  return pat;
}

/// Parse a fully concrete sentence (no wildcards).
inline Sentence parse_sentence(const std::string& text) {
  const SentencePattern pat = parse_sentence_pattern(text, /*allow_wildcards=*/false);
  Sentence s;
  s.kind = pat.kind;
  if (sentence_kind_has_tag(pat.kind)) {
    s.sys.kind = pat.sys_kind;
    if (pat.sys_kind != SystemKind::phi) s.sys.defining = *pat.defining;
  }
  s.slots.reserve(pat.slots.size());
  for (const auto& slot : pat.slots) s.slots.push_back(*slot);
  return s;
}

/// Fill a template's numeral slots; the value count must match the arity.
inline Sentence substitute(SentenceKind kind, SystemTag tag, std::vector<Nat> values) {
  if (values.size() != sentence_arity(kind))
    throw std::invalid_argument("substitute: arity mismatch");
  return Sentence{kind, std::move(tag), std::move(values)};
}

}  // namespace krt
