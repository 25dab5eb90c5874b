#include <catch2/catch_amalgamated.hpp>

#include "krt/encoding.hpp"
#include "krt/machine.hpp"

#include "support.hpp"

#include <set>

using namespace krt;

namespace {

Program random_program(Rng& rng, std::size_t len) {
  Program prog;
  for (std::size_t i = 0; i < len; ++i) {
    const auto op = static_cast<Op>(rng.below(op_count));
    Instruction ins;
    ins.op = op;
    for (unsigned a = 0; a < op_arity(op); ++a) {
      if (op == Op::constv && a == 1)
        ins.args.push_back(rng.coin() ? rng.nat_up_to_bits(200) : Nat(rng.below(32)));
      else if (op == Op::jmp || (op == Op::jz && a == 1))
        ins.args.push_back(Nat(rng.below(len + 4)));
      else if (op == Op::ext)
        ins.args.push_back(Nat(rng.below(ext_count)));
      else
        ins.args.push_back(Nat(rng.below(64)));
    }
    prog.push_back(std::move(ins));
  }
  return prog;
}

const Program countdown = {ins_jz(0, 3), ins_dec(0), ins_jmp(0), ins_halt(0)};

}  // namespace

TEST_CASE("frozen program codes") {
  CHECK(encode_stream({ins_halt(0)}) == 97);
  CHECK(encode_program({ins_halt(0)}) == 81936);
  CHECK(encode_stream({ins_ext(ext_sim), ins_halt(0)}) == 6113);
  CHECK(universal_code() == pair_encode(Nat(6113), Nat(0)) << 3);
}

TEST_CASE("program encoding round trips") {
  Rng rng(301);
  for (int i = 0; i < 200; ++i) {
    const Program prog = random_program(rng, 1 + rng.below(20));
    const Nat pad = rng.coin() ? Nat(0) : rng.nat_up_to_bits(12);
    const Nat code = encode_program(prog, pad);
    const auto dec = decode_program(code);
    REQUIRE(dec.has_value());
    CHECK(dec->prog == prog);
    CHECK(dec->padding == pad);
  }
}

TEST_CASE("padding yields distinct codes for the same program") {
  const Nat c0 = encode_program(countdown, 0);
  const Nat c1 = encode_program(countdown, 1);
  const Nat c7 = encode_program(countdown, 7);
  CHECK(c0 != c1);
  CHECK(c1 != c7);
  System sys;
  for (const Nat& c : {c0, c1, c7}) {
    const RunOutcome out = sys.run(c, 5, 1000);
    REQUIRE(is_halted(out));
    CHECK(as_halted(out).value == 0);
    CHECK(as_halted(out).steps == 17);
  }
}

TEST_CASE("codes off the normal grid are abnormal") {
  System sys;
  CHECK_FALSE(is_program_code(0));
  CHECK_FALSE(is_program_code(5));       // not a multiple of 8
  CHECK_FALSE(is_program_code(12));      // not a multiple of 8
  CHECK_FALSE(is_program_code(pair_encode(Nat(1), Nat(0)) << 3));  // empty stream
  CHECK_FALSE(is_program_code(pair_encode(Nat(0), Nat(3)) << 3));  // no sentinel
  CHECK(is_program_code(81936));
  CHECK(sys.classify(81936));
  CHECK(std::holds_alternative<AbnormalDivergence>(sys.run(5, 0, 100)));
  CHECK(std::holds_alternative<AbnormalDivergence>(sys.run(0, 0, 100)));

  SECTION("opcode beyond the table") {
    detail::BitWriter w;
    w.push_field(17, opcode_bits);  // no such instruction
    detail::push_delta(w, 0);
    CHECK_FALSE(decode_stream(w.to_sentinel()).has_value());
  }
  SECTION("extension beyond the registry") {
    detail::BitWriter w;
    w.push_field(static_cast<std::uint64_t>(Op::ext), opcode_bits);
    detail::push_delta(w, 3);
    w.push_field(static_cast<std::uint64_t>(Op::halt), opcode_bits);
    detail::push_delta(w, 0);
    CHECK_FALSE(decode_stream(w.to_sentinel()).has_value());
    CHECK_THROWS_AS(encode_stream({ins_ext(3)}), std::invalid_argument);
  }
  SECTION("streams must cut exactly at an instruction boundary") {
    detail::BitWriter w;
    w.push_field(static_cast<std::uint64_t>(Op::halt), opcode_bits);
    detail::push_delta(w, 0);
    w.push_bit(0);  // trailing junk
    CHECK_FALSE(decode_stream(w.to_sentinel()).has_value());
  }
  SECTION("truncated operand") {
    detail::BitWriter w;
    w.push_field(static_cast<std::uint64_t>(Op::constv), opcode_bits);
    detail::push_delta(w, 1);  // first operand only
    CHECK_FALSE(decode_stream(w.to_sentinel()).has_value());
  }
}

TEST_CASE("straight-line arithmetic and exact step counts") {
  System sys;
  // f(x) = 2x + 3
  const Nat prog = encode_program(
      {ins_copy(1, 0), ins_add(0, 1), ins_const(2, 3), ins_add(0, 2), ins_halt(0)});
  for (std::uint64_t x : {0ull, 1ull, 7ull, 1000ull}) {
    const RunOutcome out = sys.run(prog, x, 100);
    REQUIRE(is_halted(out));
    CHECK(as_halted(out).value == 2 * x + 3);
    CHECK(as_halted(out).steps == 5);
  }
  // Exact budget probe: halts at budget 5, not at 4.
  CHECK(is_halted(sys.run(prog, 7, 5)));
  CHECK(std::holds_alternative<OutOfBudget>(sys.run(prog, 7, 4)));
}

TEST_CASE("looping countdown runs in 3x + 2 steps") {
  System sys;
  const Nat prog = encode_program(countdown);
  Rng rng(302);
  for (int i = 0; i < 20; ++i) {
    const std::uint64_t x = rng.below(500);
    const RunOutcome out = sys.run(prog, x, 2000);
    REQUIRE(is_halted(out));
    CHECK(as_halted(out).value == 0);
    CHECK(as_halted(out).steps == 3 * x + 2);
    CHECK(is_halted(sys.run(prog, x, 3 * x + 2)));
    CHECK(std::holds_alternative<OutOfBudget>(sys.run(prog, x, 3 * x + 1)));
  }
}

TEST_CASE("register conventions") {
  System sys;
  // Registers start zero except register 0 = input.
  const RunOutcome na = sys.run(encode_program({ins_halt(3)}), 99, 10);
  REQUIRE(is_halted(na));
  CHECK(as_halted(na).value == 0);
  const RunOutcome id = sys.run(encode_program({ins_halt(0)}), 99, 10);
  REQUIRE(is_halted(id));
  CHECK(as_halted(id).value == 99);
}

TEST_CASE("truncated subtraction and bit operations") {
  System sys;
  const Nat dec_p = encode_program({ins_dec(0), ins_dec(0), ins_halt(0)});
  CHECK(as_halted(sys.run(dec_p, 1, 10)).value == 0);  // floor at zero
  CHECK(as_halted(sys.run(dec_p, 5, 10)).value == 3);

  const Nat sub_p = encode_program({ins_const(1, 9), ins_sub(0, 1), ins_halt(0)});
  CHECK(as_halted(sys.run(sub_p, 4, 10)).value == 0);
  CHECK(as_halted(sys.run(sub_p, 14, 10)).value == 5);

  const Nat shl_p = encode_program({ins_const(1, 3), ins_shl(0, 1), ins_halt(0)});
  CHECK(as_halted(sys.run(shl_p, 5, 10)).value == 40);
  const Nat shr_p = encode_program({ins_const(1, 3), ins_shr(0, 1), ins_halt(0)});
  CHECK(as_halted(sys.run(shr_p, 41, 10)).value == 5);
  CHECK(as_halted(sys.run(shr_p, 0, 10)).value == 0);

  const Nat bl_p = encode_program({ins_bitlen(0, 0), ins_halt(0)});
  CHECK(as_halted(sys.run(bl_p, 0, 10)).value == 1);
  CHECK(as_halted(sys.run(bl_p, 255, 10)).value == 8);
}

TEST_CASE("pairing instructions invert each other in-machine") {
  System sys;
  const Nat roundtrip =
      encode_program({ins_unl(1, 0), ins_unr(2, 0), ins_pair(0, 1, 2), ins_halt(0)});
  const Nat left = encode_program({ins_unl(0, 0), ins_halt(0)});
  const Nat right = encode_program({ins_unr(0, 0), ins_halt(0)});
  Rng rng(303);
  for (int i = 0; i < 50; ++i) {
    const Nat a = rng.nat_up_to_bits(48);
    const Nat b = rng.nat_up_to_bits(48);
    const Nat z = pair_encode(a, b);
    CHECK(as_halted(sys.run(roundtrip, z, 10)).value == z);
    CHECK(as_halted(sys.run(roundtrip, z, 10)).steps == 4);
    CHECK(as_halted(sys.run(left, z, 10)).value == a);
    CHECK(as_halted(sys.run(right, z, 10)).value == b);
  }
}

TEST_CASE("falling off the end or jumping past it spins forever") {
  System sys;
  CHECK(std::holds_alternative<OutOfBudget>(
      sys.run(encode_program({ins_inc(0)}), 3, 100000)));
  CHECK(std::holds_alternative<OutOfBudget>(
      sys.run(encode_program({ins_jmp(5), ins_halt(0)}), 3, 100000)));
  CHECK(std::holds_alternative<OutOfBudget>(
      sys.run(encode_program({ins_jz(1, 9), ins_halt(0)}), 3, 100000)));
}

TEST_CASE("simulation is value-transparent at +2 steps") {
  System sys;
  const Nat prog = encode_program(countdown);
  const Nat& u = universal_code();

  const RunOutcome direct = sys.run(prog, 6, 1000);
  const RunOutcome via_u = sys.run(u, pair_encode(prog, 6), 1000);
  REQUIRE(is_halted(direct));
  REQUIRE(is_halted(via_u));
  CHECK(as_halted(via_u).value == as_halted(direct).value);
  CHECK(as_halted(via_u).steps == as_halted(direct).steps + 2);

  // Exact boundary: 3*6+2 = 20 inner steps, so 22 through u.
  CHECK(is_halted(sys.run(u, pair_encode(prog, 6), 22)));
  CHECK(std::holds_alternative<OutOfBudget>(sys.run(u, pair_encode(prog, 6), 21)));

  // Nesting u inside u adds another 2.
  const Nat twice = pair_encode(u, pair_encode(prog, 6));
  const RunOutcome nested = sys.run(u, twice, 1000);
  REQUIRE(is_halted(nested));
  CHECK(as_halted(nested).value == 0);
  CHECK(as_halted(nested).steps == 24);

  // Simulating an abnormal code devours the whole budget.
  CHECK(std::holds_alternative<OutOfBudget>(sys.run(u, pair_encode(Nat(5), Nat(0)), 100000)));
  // Simulating a spinning program does too.
  const Nat spin = encode_program({ins_inc(0)});
  CHECK(std::holds_alternative<OutOfBudget>(sys.run(u, pair_encode(spin, Nat(0)), 100000)));
}

TEST_CASE("memoized replays are step-exact") {
  System sys;
  const Nat prog = encode_program(countdown);
  const Nat& u = universal_code();

  const RunOutcome first = sys.run(u, pair_encode(prog, 1000), Nat(1) << 64);
  REQUIRE(is_halted(first));
  CHECK(as_halted(first).steps == 3004);

  // Replays (now memo hits) report identical numbers and respect the budget
  // boundary exactly.
  const RunOutcome replay = sys.run(u, pair_encode(prog, 1000), Nat(1) << 64);
  REQUIRE(is_halted(replay));
  CHECK(as_halted(replay).value == as_halted(first).value);
  CHECK(as_halted(replay).steps == 3004);
  CHECK(is_halted(sys.run(u, pair_encode(prog, 1000), 3004)));
  CHECK(std::holds_alternative<OutOfBudget>(sys.run(u, pair_encode(prog, 1000), 3003)));

  // A fresh system reproduces the same numbers from scratch.
  System fresh;
  const RunOutcome again = fresh.run(u, pair_encode(prog, 1000), 3004);
  REQUIRE(is_halted(again));
  CHECK(as_halted(again).steps == 3004);

  // Exhausting the budget first does not poison later complete runs.
  System third;
  CHECK(std::holds_alternative<OutOfBudget>(third.run(prog, 1000, 100)));
  const RunOutcome after = third.run(prog, 1000, 5000);
  REQUIRE(is_halted(after));
  CHECK(as_halted(after).steps == 3002);
  CHECK(std::holds_alternative<OutOfBudget>(third.run(prog, 1000, 3001)));
}

TEST_CASE("oracle extension costs the queried budget") {
  auto oracle = std::make_shared<ScriptedOracle>();
  oracle->add(parse_sentence_pattern("equiv sys=phi a=111 b=1001"), 5);
  System sys(oracle);

  const Nat ask = encode_program({ins_ext(ext_oracle), ins_halt(0)});
  const Nat s = Sentence::equiv(7, 9, SystemTag::base()).code();
  const Nat other = Sentence::equiv(7, 10, SystemTag::base()).code();

  for (std::uint64_t x : {0ull, 4ull}) {
    const RunOutcome out = sys.run(ask, pair_encode(s, x), 1000);
    REQUIRE(is_halted(out));
    CHECK(as_halted(out).value == 0);
    CHECK(as_halted(out).steps == x + 2);
  }
  for (std::uint64_t x : {5ull, 6ull, 50ull}) {
    const RunOutcome out = sys.run(ask, pair_encode(s, x), 1000);
    REQUIRE(is_halted(out));
    CHECK(as_halted(out).value == 1);
    CHECK(as_halted(out).steps == x + 2);
    // The query budget is charged even at the boundary.
    CHECK(is_halted(sys.run(ask, pair_encode(s, x), x + 2)));
    CHECK(std::holds_alternative<OutOfBudget>(sys.run(ask, pair_encode(s, x), x + 1)));
  }
  CHECK(as_halted(sys.run(ask, pair_encode(other, 50), 1000)).value == 0);

  // A non-sentence number answers 0 (still charged).
  const Nat junk = pair_encode(Nat(9), Nat(77));
  const RunOutcome out = sys.run(ask, pair_encode(junk, 3), 1000);
  REQUIRE(is_halted(out));
  CHECK(as_halted(out).value == 0);
  CHECK(as_halted(out).steps == 5);

  // The silent system answers 0 on the very same input.
  System silent;
  CHECK(as_halted(silent.run(ask, pair_encode(s, 50), 1000)).value == 0);
}

TEST_CASE("prime extension computes and charges by bit length") {
  System sys;
  const Nat prog = encode_program({ins_ext(ext_prime), ins_halt(0)});
  const RunOutcome out = sys.run(prog, 4, 1000);
  REQUIRE(is_halted(out));
  CHECK(as_halted(out).value == 11);
  // 1 (EXT) + bitlen(4)=3 + bitlen(11)=4 + 1 (HALT) = 9
  CHECK(as_halted(out).steps == 9);
  CHECK(as_halted(sys.run(prog, 100, 1000)).value == 547);
  CHECK(as_halted(sys.run(prog, 0, 1000)).value == 2);
}

TEST_CASE("engines agree; the pure engine reports two extra steps") {
  System sys;
  const Nat prog = encode_program(countdown);
  for (std::uint64_t x : {0ull, 3ull, 10ull}) {
    const RunOutcome a = sys.run(prog, x, 1000, EngineMode::accelerated);
    const RunOutcome p = sys.run(prog, x, 1000, EngineMode::pure);
    REQUIRE(is_halted(a));
    REQUIRE(is_halted(p));
    CHECK(as_halted(p).value == as_halted(a).value);
    CHECK(as_halted(p).steps == as_halted(a).steps + 2);
    // Halting agreement at the same budget, including the exact boundary.
    const Nat t = as_halted(a).steps;
    CHECK(is_halted(sys.run(prog, x, t, EngineMode::pure)));
    CHECK(std::holds_alternative<OutOfBudget>(
        sys.run(prog, x, t - 1, EngineMode::pure)));
  }
  CHECK(std::holds_alternative<AbnormalDivergence>(sys.run(5, 0, 100, EngineMode::pure)));
  CHECK(std::holds_alternative<OutOfBudget>(
      sys.run(encode_program({ins_inc(0)}), 0, 500, EngineMode::pure)));
}

TEST_CASE("host guards stop runaway values and registers") {
  System sys;
  const Nat blowup = encode_program({ins_shl(0, 0), ins_shl(0, 0), ins_halt(0)});
  CHECK_THROWS_AS(sys.run(blowup, Nat(1) << 20, 1000), resource_error);
  CHECK_THROWS_AS(sys.run(blowup, Nat(1) << 20, 1000, EngineMode::pure), resource_error);

  Program squares;
  for (int i = 0; i < 25; ++i) squares.push_back(ins_mul(0, 0));
  squares.push_back(ins_halt(0));
  CHECK_THROWS_AS(sys.run(encode_program(squares), Nat(1) << 1023, 1000), resource_error);

  Program pairs;
  for (int i = 0; i < 30; ++i) pairs.push_back(ins_pair(0, 0, 0));
  pairs.push_back(ins_halt(0));
  CHECK_THROWS_AS(sys.run(encode_program(pairs), Nat(1) << 1023, 1000), resource_error);

  const Nat big_reg = encode_program({ins_const(Nat(1) << 23, 5), ins_halt(0)});
  CHECK(is_program_code(big_reg));  // normal code, but beyond this host
  CHECK_THROWS_AS(sys.run(big_reg, 0, 1000), resource_error);
}
