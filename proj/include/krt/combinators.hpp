#pragma once

/**
 * @file combinators.hpp
 * @brief Program-forming operators: specialization, composition, padding,
 *        and self-referential (recursion-theorem style) constructions.
 *
 * Everything here manufactures program codes without running them.  The
 * central identity is the one between the host-side specializer smn() and
 * the in-machine specializer emitted by emit_smn_build(): both produce the
 * same numeral for the same arguments, bit for bit.  That is what lets a
 * program hold a "blueprint" of itself and hand out its own code (krt,
 * krt_plain) or an entire family's codes (mixed_rt) while the host predicts
 * every one of those numerals exactly.
 *
 * Guarantees (each pinned by tests, with constant step overheads):
 *   smn(p, a):            runs p on <a, x>;  +6 steps
 *   compose(p0, [p...]):  runs p0 on <p1(x), ..., pm(x)>;  +5m+5 steps
 *   if_then_else(c,p,q):  runs p or q by c(x) != 0;  +9 steps
 *   krt(p, r):            e with e(x) = r(<e, p, x>)
 *   krt_plain(r):         e with e(x) = r(<e, x>)
 *   mixed_rt(tasks, d):   e_1..e_n and a total c with
 *                           e_i(y) = task_i(<e_1..e_n, c, y>)
 *                           c(x) total, and (c(x))(y) = d(<e_1..e_n, c, x, y>)
 *   pad(code), pad_once:  fresh codes for the same function
 */

#include "krt/assembler.hpp"
#include "krt/encoding.hpp"
#include "krt/machine.hpp"
#include "krt/nat.hpp"
#include "krt/numcode.hpp"

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace krt {

/// Code of the program that runs p on <a, x>: the host specializer.
inline Nat smn(const Nat& p, const Nat& a) {
  return encode_program({ins_const(1, a), ins_pair(0, 1, 0), ins_const(1, p),
                         ins_pair(0, 1, 0), ins_ext(ext_sim), ins_halt(0)});
}

/// Code of the standalone in-machine specializer: on <p, a> it outputs
/// smn(p, a).  Total, never simulates anything.
inline const Nat& smn_builder_code() {
  static const Nat code = [] {
    CodeBuilder cb(8);
    const std::uint32_t rp = 1, ra = 2, out = 3;
    const auto s = detail::StreamScratch::claim(cb);
    const std::uint32_t hold = cb.fresh_reg();
    cb.unl(rp, 0);
    cb.unr(ra, 0);
    emit_smn_build(cb, out, rp, ra, s, hold);
    cb.halt(out);
    return encode_program(cb.finish());
  }();
  return code;
}

// ---------------------------------------------------------------------------
// Padding: semantically inert fresh codes.
// ---------------------------------------------------------------------------

/**
 * The next equivalent code after `code`.  Normal codes bump their padding
 * counter (same instruction stream, so identical outcomes and step counts);
 * abnormal codes step to the next abnormal number (all abnormal codes denote
 * the same everywhere-divergent function).  Injective and strictly
 * increasing, so iterating never revisits a code.
 */
inline Nat pad_once(const Nat& code) {
  if (is_program_code(code)) {
    auto [stream, padding] = pair_decode(code >> 3);
    return pair_encode(stream, padding + 1) << 3;
  }
  Nat z = code + 1;
  while (is_program_code(z)) ++z;  // normal codes sit on the 8-grid: gap <= 9
  return z;
}

/// The next EVEN equivalent code above `code`: normal codes bump their
/// padding counter (multiples of eight are even); abnormal codes move to the
/// next even number that is still abnormal.
inline Nat pad(const Nat& code) {
  if (is_program_code(code)) return pad_once(code);
  Nat z = code + 1;
  if ((z & 1) != 0) ++z;
  while (is_program_code(z)) z += 2;
  return z;
}

/// pad_once iterated `times` times.
inline Nat pad_iter(const Nat& code, std::uint64_t times) {
  Nat z = code;
  for (std::uint64_t i = 0; i < times; ++i) z = pad_once(z);
  return z;
}

/// Code of the in-machine padder for normal codes: on a normal code z it
/// outputs pad_once(z) in 8 steps (its behaviour on abnormal inputs is not
/// meaningful — the constructions that inline it only ever pad normal codes).
inline const Nat& pad_builder_code() {
  static const Nat code = [] {
    CodeBuilder cb(8);
    const std::uint32_t three = 1, stream = 2, k = 3;
    cb.constv(three, 3);
    cb.shr(0, three);
    cb.unl(stream, 0);
    cb.unr(k, 0);
    cb.inc(k);
    cb.pair(0, stream, k);
    cb.shl(0, three);
    cb.halt(0);
    return encode_program(cb.finish());
  }();
  return code;
}

// ---------------------------------------------------------------------------
// Composition and branching.
// ---------------------------------------------------------------------------

/// Code running p0 on <p1(x), ..., pm(x)> (argument programs evaluated last
/// to first; a single argument program passes its bare value).
inline Nat compose(const Nat& p0, const std::vector<Nat>& ps) {
  if (ps.empty()) throw std::invalid_argument("compose: need at least one argument program");
  const std::size_t m = ps.size();
  CodeBuilder cb(static_cast<std::uint32_t>(4 + m));
  const std::uint32_t rx = 1, rp = 2, acc = 3;
  const std::uint32_t ybase = 4;  // y_i lives in ybase + i - 1
  cb.copy(rx, 0);
  for (std::size_t i = m; i >= 1; --i) {
    cb.constv(rp, ps[i - 1]);
    cb.pair(0, rp, rx);
    cb.sim();
    cb.copy(static_cast<std::uint32_t>(ybase + i - 1), 0);
  }
  cb.copy(acc, static_cast<std::uint32_t>(ybase + m - 1));
  for (std::size_t i = m - 1; i >= 1; --i)
    cb.pair(acc, static_cast<std::uint32_t>(ybase + i - 1), acc);
  cb.constv(rp, p0);
  cb.pair(0, rp, acc);
  cb.sim();
  cb.halt(0);
  return encode_program(cb.finish());
}

/// Code running then_p(x) when cond(x) != 0, else else_p(x); +9 steps on top
/// of the condition and the taken branch.
inline Nat if_then_else(const Nat& cond, const Nat& then_p, const Nat& else_p) {
  CodeBuilder cb(4);
  const std::uint32_t rx = 1, rp = 2;
  CodeBuilder::Label Lelse = cb.new_label();
  cb.copy(rx, 0);
  cb.constv(rp, cond);
  cb.pair(0, rp, rx);
  cb.sim();
  cb.jz(0, Lelse);
  cb.constv(rp, then_p);
  cb.pair(0, rp, rx);
  cb.sim();
  cb.halt(0);
  cb.place(Lelse);
  cb.constv(rp, else_p);
  cb.pair(0, rp, rx);
  cb.sim();
  cb.halt(0);
  return encode_program(cb.finish());
}

// ---------------------------------------------------------------------------
// Self-referential codes.
// ---------------------------------------------------------------------------

/**
 * A code e = krt(p, r) with e(x) = r(<e, p, x>): r receives the finished
 * code e itself (not a description of it) alongside the parameter p and the
 * input.  Works by specializing a blueprint on its own text: e = smn(q, q)
 * where q, given <z, x>, rebuilds smn(z, z) in-machine and feeds it to r.
 */
inline Nat krt(const Nat& p, const Nat& r) {
  CodeBuilder cb(8);
  const std::uint32_t rz = 1, rx = 2, rself = 3, rt = 4, rv = 5;
  const auto s = detail::StreamScratch::claim(cb);
  const std::uint32_t hold = cb.fresh_reg();
  cb.unl(rz, 0);
  cb.unr(rx, 0);
  emit_smn_build(cb, rself, rz, rz, s, hold);  // self = smn(z, z)
  cb.constv(rt, p);
  cb.pair(rt, rt, rx);     // <p, x>
  cb.pair(rt, rself, rt);  // <self, p, x>
  cb.constv(rv, r);
  cb.pair(0, rv, rt);
  cb.sim();
  cb.halt(0);
  const Nat q = encode_program(cb.finish());
  return smn(q, q);
}

/// A code e = krt_plain(r) with e(x) = r(<e, x>).
inline Nat krt_plain(const Nat& r) {
  CodeBuilder cb(8);
  const std::uint32_t rz = 1, rx = 2, rself = 3, rt = 4, rv = 5;
  const auto s = detail::StreamScratch::claim(cb);
  const std::uint32_t hold = cb.fresh_reg();
  cb.unl(rz, 0);
  cb.unr(rx, 0);
  emit_smn_build(cb, rself, rz, rz, s, hold);
  cb.pair(rt, rself, rx);  // <self, x>
  cb.constv(rv, r);
  cb.pair(0, rv, rt);
  cb.sim();
  cb.halt(0);
  const Nat q = encode_program(cb.finish());
  return smn(q, q);
}

// ---------------------------------------------------------------------------
// A whole family of interdependent codes at once.
// ---------------------------------------------------------------------------

struct MixedSystem {
  Nat master;          // the self-knowing core all members specialize
  std::vector<Nat> e;  // e_1 .. e_n
  Nat c;               // total: c(x) is a fresh code for the delayed task
  Nat driver;          // dispatcher inside every code c produces
};

/**
 * Build codes e_1..e_n plus a total "delayed-member factory" c satisfying
 *
 *     e_i(y)      = task_i(<e_1, ..., e_n, c, y>)          (i = 1..n)
 *     c(x)        halts on every x (it only assembles a code), and
 *     (c(x))(y)   = delayed(<e_1, ..., e_n, c, x, y>)
 *
 * Every member receives the finished codes of the entire family, c included;
 * c's outputs receive them too, plus the argument x they were made from.
 * Tuples are right-nested.
 *
 * All of e_i, c, and c's outputs are specializations of one self-knowing
 * master, so each can rebuild the others' codes in-machine; the host returns
 * the same numerals via smn().
 */
inline MixedSystem mixed_rt(const std::vector<Nat>& tasks, const Nat& delayed) {
  const std::size_t n = tasks.size();
  if (n == 0) throw std::invalid_argument("mixed_rt: need at least one task");

  const std::uint32_t ebase = 8;  // e_1..e_n at ebase.., c right after
  const std::uint32_t creg = static_cast<std::uint32_t>(ebase + n);
  const auto ereg = [&](std::size_t j) {  // 1-based
    return static_cast<std::uint32_t>(ebase + j - 1);
  };

  // Driver: on <<m, x>, y> rebuild the family from m, then run the delayed
  // task on <e_1, ..., e_n, c, x, y>.
  Nat driver;
  {
    CodeBuilder cb(static_cast<std::uint32_t>(ebase + n + 1));
    const std::uint32_t rm = 1, rx = 2, ry = 3, acc = 4, rt = 5, ridx = 6;
    const auto s = detail::StreamScratch::claim(cb);
    const std::uint32_t hold = cb.fresh_reg();
    cb.unl(rt, 0);  // <m, x>
    cb.unr(ry, 0);
    cb.unl(rm, rt);
    cb.unr(rx, rt);
    for (std::size_t j = 1; j <= n; ++j) {
      cb.constv(ridx, j);
      emit_smn_build(cb, ereg(j), rm, ridx, s, hold);
    }
    cb.constv(ridx, n + 1);
    emit_smn_build(cb, creg, rm, ridx, s, hold);
    cb.pair(acc, rx, ry);
    cb.pair(acc, creg, acc);
    for (std::size_t j = n; j >= 1; --j) cb.pair(acc, ereg(j), acc);
    cb.constv(rt, delayed);
    cb.pair(0, rt, acc);
    cb.sim();
    cb.halt(0);
    driver = encode_program(cb.finish());
  }

  // Master task: on <m, <i, y>> rebuild the family, then dispatch on i.
  Nat master_task;
  {
    CodeBuilder cb(static_cast<std::uint32_t>(ebase + n + 1));
    const std::uint32_t rm = 1, ri = 2, ry = 3, acc = 4, rt = 5, rk = 6, ridx = 7;
    const auto s = detail::StreamScratch::claim(cb);
    const std::uint32_t hold = cb.fresh_reg();
    cb.unl(rm, 0);
    cb.unr(rt, 0);
    cb.unl(ri, rt);
    cb.unr(ry, rt);
    for (std::size_t j = 1; j <= n; ++j) {
      cb.constv(ridx, j);
      emit_smn_build(cb, ereg(j), rm, ridx, s, hold);
    }
    cb.constv(ridx, n + 1);
    emit_smn_build(cb, creg, rm, ridx, s, hold);
    cb.pair(acc, creg, ry);  // <e_1, ..., e_n, c, y>
    for (std::size_t j = n; j >= 1; --j) cb.pair(acc, ereg(j), acc);

    std::vector<CodeBuilder::Label> branch(n);
    cb.copy(rk, ri);
    for (std::size_t j = 0; j < n; ++j) {
      branch[j] = cb.new_label();
      cb.dec(rk);
      cb.jz(rk, branch[j]);
    }
    // i = n + 1: assemble a fresh delayed-task code smn(driver, <m, y>).
    cb.constv(rt, driver);
    cb.pair(acc, rm, ry);
    emit_smn_build(cb, rk, rt, acc, s, hold);
    cb.halt(rk);
    for (std::size_t j = 0; j < n; ++j) {
      cb.place(branch[j]);
      cb.constv(rt, tasks[j]);
      cb.pair(0, rt, acc);
      cb.sim();
      cb.halt(0);
    }
    master_task = encode_program(cb.finish());
  }

  MixedSystem out;
  out.master = krt_plain(master_task);
  out.driver = std::move(driver);
  for (std::size_t j = 1; j <= n; ++j) out.e.push_back(smn(out.master, j));
  out.c = smn(out.master, n + 1);
  return out;
}

/**
 * Kleene-style fixed point: a code p0 with p0(x) = (d(p0))(x) whenever d
 * outputs a code on p0.  p0 feeds its own finished code to d, then runs
 * whatever d builds.
 */
inline Nat fixed_point(const Nat& d) {
  CodeBuilder cb(8);
  const std::uint32_t rself = 1, rx = 2, rd = 3;
  cb.unl(rself, 0);
  cb.unr(rx, 0);
  cb.constv(rd, d);
  cb.pair(0, rd, rself);
  cb.sim();               // q = d(self)
  cb.pair(0, 0, rx);
  cb.sim();               // q(x)
  cb.halt(0);
  return krt_plain(encode_program(cb.finish()));
}

}  // namespace krt
