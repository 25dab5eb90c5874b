#pragma once

/**
 * @file universal.hpp
 * @brief Universal simulation entry points and verifiable run certificates.
 *
 * A certificate {p, x, y, t} claims "program p on input x halts with output
 * y after exactly t steps".  Verification is strict replay: run p on x with
 * budget exactly t and demand Halted{y, t}.  Because step counts are
 * budget-independent and exact, a certificate with an inflated t fails (the
 * replay halts earlier than claimed) just as surely as one with t too small
 * (the replay runs out of budget).
 */

#include "krt/machine.hpp"
#include "krt/nat.hpp"

#include <optional>
#include <sstream>
#include <string>

namespace krt {

/// Run p on x through the universal program u = [EXT sim; HALT r0].
inline RunOutcome run_via_universal(System& sys, const Nat& p, const Nat& x,
                                    const Nat& budget,
                                    EngineMode mode = EngineMode::accelerated) {
  return sys.run(universal_code(), pair_encode(p, x), budget, mode);
}

struct Certificate {
  Nat p;
  Nat x;
  Nat y;
  Nat t;

  bool operator==(const Certificate&) const = default;

  std::string serialize() const {
    std::ostringstream out;
    out << "p=" << p.str() << " x=" << x.str() << " y=" << y.str()
        << " t=" << t.str();
    return out.str();
  }

  static std::optional<Certificate> parse(const std::string& text) {
    std::istringstream in(text);
    std::string tok;
    const std::string names[4] = {"p=", "x=", "y=", "t="};
    Nat vals[4];
    for (int i = 0; i < 4; ++i) {
      if (!(in >> tok)) return std::nullopt;
      if (tok.rfind(names[i], 0) != 0) return std::nullopt;
      try {
        vals[i] = nat_from_dec(tok.substr(2));
      } catch (const std::exception&) {
        return std::nullopt;
      }
    }
    if (in >> tok) return std::nullopt;  // trailing junk
    return Certificate{vals[0], vals[1], vals[2], vals[3]};
  }
};

/// Emit a certificate by running p on x (within `budget`); empty if the run
/// does not halt in budget.
inline std::optional<Certificate> make_certificate(System& sys, const Nat& p,
                                                   const Nat& x, const Nat& budget) {
  const RunOutcome out = sys.run(p, x, budget);
  if (!is_halted(out)) return std::nullopt;
  const Halted& h = as_halted(out);
  return Certificate{p, x, h.value, h.steps};
}

/// Strict replay check: exact output and exact step count at budget t.
inline bool verify_certificate(System& sys, const Certificate& c) {
  const RunOutcome out = sys.run(c.p, c.x, c.t);
  if (!is_halted(out)) return false;
  const Halted& h = as_halted(out);
  return h.value == c.y && h.steps == c.t;
}

}  // namespace krt
