#pragma once

/**
 * @file progen.hpp
 * @brief Deterministic random-program generation for conformance testing.
 *
 * The same generator feeds the Catch2 suites, the acceptance binary and the
 * CLI `verify` subcommand, so a seed names one reproducible workload
 * everywhere.
 */

#include "krt/encoding.hpp"
#include "krt/randomgen.hpp"

#include <cstdint>

namespace krt {

struct ProgramGenOptions {
  std::size_t min_len = 3;
  std::size_t max_len = 24;
  std::uint64_t reg_count = 8;    // register operands drawn from [0, reg_count)
  std::uint64_t max_const = 1023; // CONST immediates drawn from [0, max_const]
  bool allow_ext = true;
};

/// Draw a syntactically valid program.  Control flow is unconstrained apart
/// from jump targets staying in [0, len] (target == len spins), so outcomes
/// cover halting, running out of budget and host resource guards; the final
/// instruction is always a HALT so straight-line runs terminate.
inline Program random_program(Rng& rng, const ProgramGenOptions& opt = {}) {
  const std::size_t len =
      opt.min_len + static_cast<std::size_t>(rng.below(opt.max_len - opt.min_len + 1));
  const auto reg = [&] { return Nat(rng.below(opt.reg_count)); };
  Program prog;
  prog.reserve(len);
  for (std::size_t i = 0; i + 1 < len; ++i) {
    // Weighted pick: data ops dominate, control flow moderate, EXT rare.
    const std::uint64_t roll = rng.below(100);
    if (roll < 10) {
      prog.push_back(ins_const(reg(), Nat(rng.below(opt.max_const + 1))));
    } else if (roll < 20) {
      prog.push_back(ins_inc(reg()));
    } else if (roll < 26) {
      prog.push_back(ins_dec(reg()));
    } else if (roll < 34) {
      prog.push_back(ins_copy(reg(), reg()));
    } else if (roll < 42) {
      prog.push_back(ins_add(reg(), reg()));
    } else if (roll < 48) {
      prog.push_back(ins_sub(reg(), reg()));
    } else if (roll < 53) {
      prog.push_back(ins_mul(reg(), reg()));
    } else if (roll < 63) {
      prog.push_back(ins_jz(reg(), Nat(rng.below(len + 1))));
    } else if (roll < 68) {
      prog.push_back(ins_jmp(Nat(rng.below(len + 1))));
    } else if (roll < 74) {
      prog.push_back(ins_pair(reg(), reg(), reg()));
    } else if (roll < 79) {
      prog.push_back(ins_unl(reg(), reg()));
    } else if (roll < 84) {
      prog.push_back(ins_unr(reg(), reg()));
    } else if (roll < 88) {
      prog.push_back(ins_shl(reg(), reg()));
    } else if (roll < 92) {
      prog.push_back(ins_shr(reg(), reg()));
    } else if (roll < 96) {
      prog.push_back(ins_bitlen(reg(), reg()));
    } else if (roll < 98 && opt.allow_ext) {
      prog.push_back(ins_ext(Nat(rng.below(ext_count))));
    } else {
      prog.push_back(ins_halt(reg()));
    }
  }
  prog.push_back(ins_halt(reg()));
  return prog;
}

}  // namespace krt
