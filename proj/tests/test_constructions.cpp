#include <catch2/catch_amalgamated.hpp>

#include "krt/constructions.hpp"
#include "krt/machine.hpp"
#include "krt/oracle.hpp"
#include "krt/progen.hpp"
#include "support.hpp"

#include <algorithm>
#include <memory>
#include <set>
#include <variant>
#include <vector>

using namespace krt;

namespace {

const Nat kBig = Nat(1) << 40;

/// Oracle that logs every query and answers a fixed verdict.
struct RecordingOracle final : Oracle {
  mutable std::vector<std::pair<Sentence, Nat>> log;
  bool fire = false;
  bool query(const Sentence& s, const Nat& x) const override {
    log.emplace_back(s, x);
    return fire;
  }
  std::optional<Nat> threshold(const Sentence&) const override {
    if (fire) return Nat(0);
    return std::nullopt;
  }
};

std::shared_ptr<const Oracle> scripted(const std::string& pattern,
                                       std::uint64_t from_budget) {
  auto o = std::make_shared<ScriptedOracle>();
  o->add(parse_sentence_pattern(pattern), Nat(from_budget));
  return o;
}

Nat run_value(System& sys, const Nat& p, const Nat& x, const Nat& budget = kBig) {
  const RunOutcome out = sys.run(p, x, budget);
  REQUIRE(is_halted(out));
  return as_halted(out).value;
}

Nat apply_value(const DerivedSystem& d, const Nat& p, const Nat& x,
                const Nat& budget = kBig) {
  const RunOutcome out = d.apply(p, x, budget);
  REQUIRE(is_halted(out));
  return as_halted(out).value;
}

bool apply_oob(const DerivedSystem& d, const Nat& p, const Nat& x,
               const Nat& budget) {
  return std::holds_alternative<OutOfBudget>(d.apply(p, x, budget));
}

Nat succ_code() { return encode_program({ins_inc(0), ins_halt(0)}); }
Nat ident_code() { return encode_program({ins_halt(0)}); }
Nat double_code() {
  return encode_program({ins_copy(1, 0), ins_add(0, 1), ins_halt(0)});
}
Nat const7_code() { return encode_program({ins_const(0, 7), ins_halt(0)}); }
Nat swap_code() {
  return encode_program(
      {ins_unl(1, 0), ins_unr(2, 0), ins_pair(0, 2, 1), ins_halt(0)});
}
Nat spin_code() { return encode_program({ins_jmp(0)}); }

struct Sample {
  Nat code;
  Nat input;
  Nat expect;
};

std::vector<Sample> halting_samples() {
  std::vector<Sample> out;
  for (std::uint64_t x : {0ull, 1ull, 2ull, 5ull, 9ull, 30ull}) {
    out.push_back({succ_code(), Nat(x), Nat(x + 1)});
    out.push_back({double_code(), Nat(x), Nat(2 * x)});
    out.push_back({const7_code(), Nat(x), Nat(7)});
    out.push_back({ident_code(), Nat(x), Nat(x)});
    out.push_back({swap_code(), pair_encode(Nat(x), Nat(x + 3)),
                   pair_encode(Nat(x + 3), Nat(x))});
  }
  return out;
}

Nat pow_nat(Nat base, std::uint64_t exp) {
  Nat acc = 1;
  for (std::uint64_t i = 0; i < exp; ++i) acc *= base;
  return acc;
}

}  // namespace

// ---------------------------------------------------------------------------
// psi / eta / theta
// ---------------------------------------------------------------------------

TEST_CASE("silent psi, eta, theta are transparent interpreters",
          "[constructions]") {
  for (DerivedSystem d : {psi_build(), eta_build(), theta_build()}) {
    for (const Sample& s : halting_samples())
      REQUIRE(apply_value(d, s.code, s.input) == s.expect);
    // Divergent underlying program stays divergent.
    REQUIRE(apply_oob(d, spin_code(), Nat(0), Nat(1) << 20));
    // Abnormal code devours the budget like the base system does.
    REQUIRE(apply_oob(d, Nat(9), Nat(4), Nat(1) << 20));
  }
}

TEST_CASE("guarded interpreters query their own defining sentence",
          "[constructions]") {
  auto rec = std::make_shared<RecordingOracle>();

  SECTION("psi asks for a distinct equivalent of itself") {
    const DerivedSystem d = psi_build(rec);
    REQUIRE(apply_value(d, succ_code(), Nat(6)) == Nat(7));
    REQUIRE(rec->log.size() == 1);
    const Sentence expect = Sentence::exists_distinct_equiv(
        SystemTag::derived(SystemKind::psi, d.e));
    REQUIRE(rec->log[0].first.code() == expect.code());
    REQUIRE(rec->log[0].second == Nat(6));
  }

  SECTION("eta tags the same sentence shape with its own kind") {
    const DerivedSystem d = eta_build(rec);
    REQUIRE(apply_value(d, double_code(), Nat(3)) == Nat(6));
    REQUIRE(rec->log.size() == 1);
    const Sentence expect = Sentence::exists_distinct_equiv(
        SystemTag::derived(SystemKind::eta, d.e));
    REQUIRE(rec->log[0].first.code() == expect.code());
  }

  SECTION("eta skips the oracle entirely on its own code") {
    rec->fire = true;  // an outer query would fire and output e instead
    const DerivedSystem d = eta_build(rec);
    const Nat y = pair_encode(succ_code(), Nat(4));
    // eta_e(y) = phi_e(y): only the inner interpretation of <succ, 4> asks,
    // fires, and outputs succ.  The exempted outer call contributes nothing.
    REQUIRE(apply_value(d, d.e, y) == succ_code());
    REQUIRE(rec->log.size() == 1);
    REQUIRE(rec->log[0].second == Nat(4));
  }

  SECTION("theta asks whether a universal theta-program exists") {
    const DerivedSystem d = theta_build(rec);
    REQUIRE(apply_value(d, const7_code(), Nat(11)) == Nat(7));
    REQUIRE(rec->log.size() == 1);
    const Sentence expect = Sentence::exists_universal(
        SystemTag::derived(SystemKind::theta, d.e));
    REQUIRE(rec->log[0].first.code() == expect.code());
    REQUIRE(rec->log[0].second == Nat(11));
  }
}

TEST_CASE("fired psi collapses to the identity on codes", "[constructions]") {
  const DerivedSystem d = psi_build(scripted("existsdistinct sys=psi:*", 3));
  // Above the threshold every program, even a garbage code, outputs itself.
  for (std::uint64_t x = 3; x < 10; ++x) {
    REQUIRE(apply_value(d, succ_code(), Nat(x)) == succ_code());
    REQUIRE(apply_value(d, Nat(5), Nat(x)) == Nat(5));
  }
  // Below the threshold it is still the plain interpreter.
  REQUIRE(apply_value(d, succ_code(), Nat(2)) == Nat(3));
  REQUIRE(apply_oob(d, Nat(5), Nat(2), Nat(1) << 20));
  // And psi_e itself collapses: psi_e(x) = e.
  REQUIRE(apply_value(d, d.e, Nat(5)) == d.e);
}

TEST_CASE("fired eta exempts exactly its own code", "[constructions]") {
  const DerivedSystem d = eta_build(scripted("existsdistinct sys=eta:*", 3));
  for (std::uint64_t x = 3; x < 8; ++x) {
    REQUIRE(apply_value(d, succ_code(), Nat(x)) == succ_code());
    REQUIRE(apply_value(d, double_code(), Nat(x)) == double_code());
  }
  REQUIRE(apply_value(d, double_code(), Nat(1)) == Nat(2));
  // eta_e(y) = phi_e(y): running e on y re-enters the interpreter, which
  // reads y as <p, x>; with p = succ fired, that inner call outputs succ.
  const Nat y = pair_encode(succ_code(), Nat(4));
  REQUIRE(apply_value(d, d.e, y) == succ_code());
  REQUIRE(apply_value(d, d.e, y) == run_value(*d.sys, d.e, y));
}

TEST_CASE("fired theta collapses to the identity on codes", "[constructions]") {
  const DerivedSystem d = theta_build(scripted("existsuniversal sys=theta:*", 3));
  for (std::uint64_t x = 3; x < 8; ++x) {
    REQUIRE(apply_value(d, double_code(), Nat(x)) == double_code());
    REQUIRE(apply_value(d, Nat(12), Nat(x)) == Nat(12));
  }
  REQUIRE(apply_value(d, double_code(), Nat(2)) == Nat(4));
  REQUIRE(apply_value(d, d.e, Nat(7)) == d.e);
}

// ---------------------------------------------------------------------------
// trap pair
// ---------------------------------------------------------------------------

TEST_CASE("silent trap candidates both compute the parameter's function",
          "[constructions]") {
  const Nat p = double_code();
  const TrapPair t = trap_pair(p);
  REQUIRE(t.e1 != t.e2);
  const std::vector<Nat> members = set_decode(t.guard_set);
  REQUIRE(members.size() == 2);
  REQUIRE(std::min(t.e1, t.e2) == members[0]);
  REQUIRE(std::max(t.e1, t.e2) == members[1]);
  for (std::uint64_t x = 0; x < 8; ++x) {
    REQUIRE(run_value(*t.sys, t.e1, Nat(x)) == Nat(2 * x));
    REQUIRE(run_value(*t.sys, t.e2, Nat(x)) == Nat(2 * x));
  }
}

TEST_CASE("trap candidates ask about their own equivalence to the parameter",
          "[constructions]") {
  auto rec = std::make_shared<RecordingOracle>();
  const Nat p = double_code();
  const TrapPair t = trap_pair(p, rec);
  REQUIRE(run_value(*t.sys, t.e1, Nat(4)) == Nat(8));
  REQUIRE(rec->log.size() == 1);
  REQUIRE(rec->log[0].first.code() ==
          Sentence::equiv(t.e1, p, SystemTag::base()).code());
  REQUIRE(rec->log[0].second == Nat(4));
  rec->log.clear();
  REQUIRE(run_value(*t.sys, t.e2, Nat(4)) == Nat(8));
  REQUIRE(rec->log.size() == 1);
  REQUIRE(rec->log[0].first.code() ==
          Sentence::equiv(t.e2, p, SystemTag::base()).code());
}

TEST_CASE("a fired equivalence claim is defeated by both candidates",
          "[constructions]") {
  const Nat p = double_code();

  SECTION("wildcard: every equivalence claim fires") {
    const TrapPair t = trap_pair(p, scripted("equiv sys=phi a=* b=*", 0));
    for (std::uint64_t x = 0; x < 8; ++x) {
      REQUIRE(run_value(*t.sys, t.e1, Nat(x)) == Nat(2 * x + 1));
      REQUIRE(run_value(*t.sys, t.e2, Nat(x)) == Nat(0));
    }
  }

  SECTION("concrete claim about e1 flips e1 alone, above its threshold") {
    // Build once silently to learn the candidate codes (construction is
    // deterministic), then script a sentence naming e1 exactly.
    const TrapPair probe = trap_pair(p);
    const std::string pattern = "equiv sys=phi a=" +
                                to_binary_string(probe.e1) +
                                " b=" + to_binary_string(p);
    const TrapPair t = trap_pair(p, scripted(pattern, 5));
    REQUIRE(t.e1 == probe.e1);
    REQUIRE(t.e2 == probe.e2);
    for (std::uint64_t x = 0; x < 10; ++x) {
      REQUIRE(run_value(*t.sys, t.e1, Nat(x)) ==
              Nat(x >= 5 ? 2 * x + 1 : 2 * x));
      REQUIRE(run_value(*t.sys, t.e2, Nat(x)) == Nat(2 * x));
    }
  }
}

// ---------------------------------------------------------------------------
// fixed points
// ---------------------------------------------------------------------------

TEST_CASE("fixed point of a code transformer", "[constructions]") {
  System sys;

  SECTION("identity transformer: the fixed point maps to itself") {
    const FixedPointDemo demo = fixed_point_demo(sys, ident_code(), kBig);
    REQUIRE(demo.q0.has_value());
    REQUIRE(*demo.q0 == demo.p0);
    REQUIRE(demo.certificate.has_value());
    REQUIRE(verify_certificate(sys, *demo.certificate));
  }

  SECTION("constant transformer: the fixed point behaves like the target") {
    const Nat d = encode_program({ins_const(0, double_code()), ins_halt(0)});
    const FixedPointDemo demo = fixed_point_demo(sys, d, kBig);
    REQUIRE(demo.q0.has_value());
    REQUIRE(*demo.q0 == double_code());
    REQUIRE(verify_certificate(sys, *demo.certificate));
    // p0(x) = phi_{d(p0)}(x) = double(x)
    for (std::uint64_t x : {0ull, 4ull, 9ull})
      REQUIRE(run_value(sys, demo.p0, Nat(x)) == Nat(2 * x));
  }

  SECTION("padding transformer: p0's image is its own padding") {
    const FixedPointDemo demo = fixed_point_demo(sys, pad_builder_code(), kBig);
    REQUIRE(demo.q0.has_value());
    REQUIRE(*demo.q0 == pad_once(demo.p0));
    REQUIRE(verify_certificate(sys, *demo.certificate));
    // Equivalent codes, vacuously: each re-enters itself and runs out.
    REQUIRE(std::holds_alternative<OutOfBudget>(
        sys.run(demo.p0, Nat(5), Nat(1) << 16)));
    REQUIRE(std::holds_alternative<OutOfBudget>(
        sys.run(*demo.q0, Nat(5), Nat(1) << 16)));
  }

  SECTION("diverging transformer: no value, no certificate") {
    const FixedPointDemo demo = fixed_point_demo(sys, spin_code(), Nat(1) << 16);
    REQUIRE_FALSE(demo.q0.has_value());
    REQUIRE_FALSE(demo.certificate.has_value());
    REQUIRE(demo.p0 > Nat(0));
  }
}

// ---------------------------------------------------------------------------
// zeta
// ---------------------------------------------------------------------------

TEST_CASE("silent zeta is a transparent interpreter", "[constructions][zeta]") {
  const DerivedSystem d = zeta_build();
  for (const Sample& s : halting_samples())
    REQUIRE(apply_value(d, s.code, s.input) == s.expect);
  REQUIRE(apply_oob(d, spin_code(), Nat(1), Nat(1) << 20));
  REQUIRE(apply_oob(d, Nat(7), Nat(2), Nat(1) << 20));

  SECTION("the interpreter consults the oracle with its own tag") {
    auto rec = std::make_shared<RecordingOracle>();
    const DerivedSystem dr = zeta_build(rec);
    REQUIRE(apply_value(dr, succ_code(), Nat(5)) == Nat(6));
    REQUIRE(rec->log.size() == 1);
    const Sentence expect = Sentence::exists_distinct_equiv(
        SystemTag::derived(SystemKind::zeta, dr.e));
    REQUIRE(rec->log[0].first.code() == expect.code());
    REQUIRE(rec->log[0].second == Nat(5));
  }
}

TEST_CASE("zeta's composition factory is total and correct",
          "[constructions][zeta]") {
  const DerivedSystem d = zeta_build();
  System& sys = *d.sys;

  // c is total, cheap, and always yields an even, well-formed code.
  const std::vector<Nat> junk_inputs = {Nat(0), Nat(3), Nat(1) << 30,
                                        pair_encode(5, 9)};
  for (const Nat& junk : junk_inputs) {
    const Nat y = run_value(sys, d.c, junk, Nat(1) << 20);
    REQUIRE(y % 8 == 0);
    REQUIRE(is_program_code(y));
  }

  // phi_{c(<p, q>)} = zeta_p . zeta_q on real programs.
  const std::vector<std::pair<Nat, Nat>> pairs = {
      {succ_code(), double_code()},
      {double_code(), succ_code()},
      {const7_code(), succ_code()},
      {succ_code(), succ_code()}};
  for (const auto& [p, q] : pairs) {
    const Nat y = run_value(sys, d.c, pair_encode(p, q));
    for (std::uint64_t x : {0ull, 1ull, 5ull}) {
      const Nat inner = apply_value(d, q, Nat(x));
      const Nat expect = apply_value(d, p, inner);
      REQUIRE(run_value(sys, y, Nat(x)) == expect);
    }
  }
}

TEST_CASE("fired zeta seeds diagonal values off the composition machinery",
          "[constructions][zeta]") {
  const DerivedSystem d = zeta_build(scripted("existsdistinct sys=zeta:*", 3));

  // Below the threshold: plain interpretation.
  REQUIRE(apply_value(d, succ_code(), Nat(2)) == Nat(3));
  REQUIRE(apply_oob(d, Nat(5), Nat(2), Nat(1) << 20));

  // Fired, small p away from the machinery: zeta_p(x) = prime(p + 1)^x.
  // (Small p keeps the witness scan short; the values are odd prime powers,
  // so they can never collide with the even codes w and w' produce.)
  for (std::uint64_t x = 3; x < 8; ++x)
    REQUIRE(apply_value(d, Nat(5), Nat(x)) == pow_nat(nth_prime(Nat(6)), x));
  REQUIRE(apply_value(d, Nat(0), Nat(4)) == pow_nat(Nat(3), 4));
  REQUIRE(apply_value(d, Nat(9), Nat(3)) == pow_nat(nth_prime(Nat(10)), 3));

  // The witness w itself is exempt even when fired: zeta_w = phi_w.
  const Nat z = Nat(2);
  REQUIRE(apply_value(d, d.w, z) == run_value(*d.sys, d.w, z));
}

TEST_CASE("zeta value algebra on an explored range", "[constructions][zeta]") {
  static ZetaAlgebra alg(zeta_build(), 40);
  const auto& wv = alg.w_values();
  const auto& wpv = alg.wprime_values();
  REQUIRE(wv.size() == 40);

  SECTION("w' is strictly increasing, even, fresh; w agrees on the range") {
    for (std::size_t z = 0; z < 40; ++z) {
      REQUIRE(wpv[z] % 2 == 0);
      REQUIRE(wpv[z] > Nat(40));
      REQUIRE(wv[z] == wpv[z]);
      if (z > 0) REQUIRE(wpv[z] > wpv[z - 1]);
    }
  }

  SECTION("witness lookup inverts w and sits below the value") {
    for (std::size_t z = 0; z < 40; ++z) {
      const auto back = alg.witness_for(wv[z]);
      REQUIRE(back.has_value());
      REQUIRE(*back == Nat(z));
      REQUIRE(Nat(z) < wv[z]);
      REQUIRE_FALSE(alg.witness_for(wv[z] + 1).has_value());
    }
  }

  SECTION("literal composition agrees with the machine inside the range") {
    for (std::size_t z = 0; z < 40; ++z) {
      const Nat a = pair_left(Nat(z)), b = pair_right(Nat(z));
      const auto v = alg.comp1(ZetaAlgebra::lit(a), ZetaAlgebra::lit(b));
      REQUIRE(v->kind == ZetaAlgebra::Node::lit);
      REQUIRE(v->value == wv[z]);
      REQUIRE(alg.comp1_machine(a, b) == wv[z]);
    }
    REQUIRE_THROWS_AS(alg.comp1_machine(Nat(1) << 20, Nat(2)),
                      std::invalid_argument);
  }

  SECTION("a composed value used as right operand rewrites via its witness") {
    // comp1(a, w(<r, s>)) = comp1(comp1(a, r), s)
    const std::size_t z = 6;  // <1, 2>
    const auto a = ZetaAlgebra::lit(Nat(3));
    const auto lhs = alg.comp1(a, ZetaAlgebra::lit(wv[z]));
    const auto rhs = alg.comp1(alg.comp1(a, ZetaAlgebra::lit(pair_left(Nat(z)))),
                               ZetaAlgebra::lit(pair_right(Nat(z))));
    REQUIRE(ZetaAlgebra::equal(lhs, rhs));
  }

  SECTION("symbolic composition of real programs applies componentwise") {
    const auto v = alg.comp1(ZetaAlgebra::lit(succ_code()),
                             ZetaAlgebra::lit(double_code()));
    REQUIRE(v->kind == ZetaAlgebra::Node::wprime_at);
    REQUIRE(ZetaAlgebra::describe(v).find("w'") != std::string::npos);
    for (std::uint64_t x : {0ull, 3ull, 10ull}) {
      const auto got = alg.zeta_apply(v, Nat(x));
      REQUIRE(got.has_value());
      REQUIRE(*got == Nat(2 * x + 1));
    }
    // A dead component makes the application fail fast instead of hanging.
    const auto dead = alg.comp1(ZetaAlgebra::lit(succ_code()),
                                ZetaAlgebra::lit(Nat(9)));
    REQUIRE_FALSE(alg.zeta_apply(dead, Nat(1)).has_value());
  }

  SECTION("materialized in-range compositions are runnable codes") {
    // w(<1, 2>) is a real program computing zeta_1 . zeta_2; both components
    // are junk codes, so it devours any budget, exactly like its components.
    const std::size_t z = 6;
    REQUIRE(std::holds_alternative<OutOfBudget>(
        alg.system().sys->run(wv[z], Nat(0), Nat(1) << 20)));
  }

  SECTION("composition is associative at the code level") {
    Rng rng(777);
    std::vector<ZetaAlgebra::Val> pool;
    for (std::uint64_t n : {0ull, 1ull, 2ull, 3ull, 5ull, 7ull})
      pool.push_back(ZetaAlgebra::lit(Nat(n)));
    for (const Nat& code : {succ_code(), double_code(), const7_code()})
      pool.push_back(ZetaAlgebra::lit(code));
    for (std::size_t z : {0u, 6u, 17u, 39u})
      pool.push_back(ZetaAlgebra::lit(wv[z]));
    pool.push_back(alg.comp1(pool[1], pool[2]));
    pool.push_back(alg.comp1(pool[6], pool[7]));
    for (int i = 0; i < 40; ++i) {
      const auto& a = pool[rng.below(pool.size())];
      const auto& b = pool[rng.below(pool.size())];
      const auto& c = pool[rng.below(pool.size())];
      REQUIRE(ZetaAlgebra::equal(alg.comp1(alg.comp1(a, b), c),
                                 alg.comp1(a, alg.comp1(b, c))));
    }
  }

  SECTION("chains decompose compositions and fold back") {
    // A plain code is its own chain.
    const auto plain = ZetaAlgebra::lit(Nat(7));
    REQUIRE(alg.chain(plain).size() == 1);
    REQUIRE(ZetaAlgebra::equal(alg.unchain(alg.chain(plain)), plain));

    // An in-range composition value splits into its two parts.
    const std::size_t z = 6;  // <1, 2>
    const auto two = alg.chain(ZetaAlgebra::lit(wv[z]));
    REQUIRE(two.size() == 2);
    REQUIRE(two[0]->value == pair_left(Nat(z)));
    REQUIRE(two[1]->value == pair_right(Nat(z)));

    // A three-fold composition chains to exactly its three factors, none of
    // which is itself a composition value.
    const auto x3 = alg.comp1(
        alg.comp1(ZetaAlgebra::lit(Nat(1)), ZetaAlgebra::lit(Nat(2))),
        ZetaAlgebra::lit(Nat(3)));
    const auto parts = alg.chain(x3);
    REQUIRE(parts.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
      REQUIRE(parts[i]->kind == ZetaAlgebra::Node::lit);
      REQUIRE(parts[i]->value == Nat(i + 1));
      REQUIRE_FALSE(alg.witness_for(parts[i]->value).has_value());
    }
    REQUIRE(ZetaAlgebra::equal(alg.unchain(parts), x3));

    // Same story when the outer factor is a real program.
    const auto y3 = alg.comp1(
        alg.comp1(ZetaAlgebra::lit(succ_code()), ZetaAlgebra::lit(Nat(4))),
        ZetaAlgebra::lit(double_code()));
    const auto yparts = alg.chain(y3);
    REQUIRE(yparts.size() == 3);
    REQUIRE(yparts[0]->value == succ_code());
    REQUIRE(yparts[1]->value == Nat(4));
    REQUIRE(yparts[2]->value == double_code());
    REQUIRE(ZetaAlgebra::equal(alg.unchain(yparts), y3));
  }
}
