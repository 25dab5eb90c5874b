#pragma once

/**
 * @file assembler.hpp
 * @brief A small structured assembler for register-machine programs.
 *
 * CodeBuilder collects instructions, resolves forward jump labels, and hands
 * out fresh scratch registers.  On top of it sit emitters for the recurring
 * program-building idioms:
 *
 *   emit_append_bits   append a fixed bit chunk to a stream accumulator
 *   emit_append_delta  append the Elias delta code of a register's value
 *   emit_smn_build     specialize: build the code smn(p, a) from registers
 *
 * The in-machine specializer must agree bit for bit with the host-side
 * encoder for the same template — that identity is what lets a program
 * compute other programs' codes (and its own) exactly, and it is pinned by
 * tests.
 */

#include "krt/encoding.hpp"
#include "krt/nat.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace krt {

class CodeBuilder {
 public:
  using Label = std::size_t;

  explicit CodeBuilder(std::uint32_t first_scratch_reg = 8)
      : next_reg_(first_scratch_reg) {}

  Label new_label() {
    labels_.push_back(std::nullopt);
    return labels_.size() - 1;
  }

  void place(Label l) {
    if (labels_.at(l).has_value()) throw std::logic_error("label placed twice");
    labels_[l] = prog_.size();
  }

  Label here() {
    const Label l = new_label();
    place(l);
    return l;
  }

  std::uint32_t fresh_reg() { return next_reg_++; }

  void emit(Instruction ins) { prog_.push_back(std::move(ins)); }

  // Jumps to labels (targets resolved in finish()).
  void jz(std::uint32_t reg, Label l) {
    fixups_.push_back({prog_.size(), l});
    emit(ins_jz(reg, 0));
  }
  void jmp(Label l) {
    fixups_.push_back({prog_.size(), l});
    emit(ins_jmp(0));
  }

  // Plain emitters, so construction code reads like an assembly listing.
  void constv(std::uint32_t r, Nat v) { emit(ins_const(r, std::move(v))); }
  void inc(std::uint32_t r) { emit(ins_inc(r)); }
  void dec(std::uint32_t r) { emit(ins_dec(r)); }
  void copy(std::uint32_t d, std::uint32_t s) { emit(ins_copy(d, s)); }
  void add(std::uint32_t d, std::uint32_t s) { emit(ins_add(d, s)); }
  void sub(std::uint32_t d, std::uint32_t s) { emit(ins_sub(d, s)); }
  void mul(std::uint32_t d, std::uint32_t s) { emit(ins_mul(d, s)); }
  void pair(std::uint32_t d, std::uint32_t a, std::uint32_t b) {
    emit(ins_pair(d, a, b));
  }
  void unl(std::uint32_t d, std::uint32_t s) { emit(ins_unl(d, s)); }
  void unr(std::uint32_t d, std::uint32_t s) { emit(ins_unr(d, s)); }
  void shl(std::uint32_t d, std::uint32_t s) { emit(ins_shl(d, s)); }
  void shr(std::uint32_t d, std::uint32_t s) { emit(ins_shr(d, s)); }
  void bitlen(std::uint32_t d, std::uint32_t s) { emit(ins_bitlen(d, s)); }
  void ext(std::uint64_t k) { emit(ins_ext(k)); }
  void halt(std::uint32_t r) { emit(ins_halt(r)); }
  void sim() { ext(ext_sim); }

  std::size_t size() const { return prog_.size(); }

  Program finish() {
    for (const auto& [idx, label] : fixups_) {
      const auto pos = labels_.at(label);
      if (!pos) throw std::logic_error("unplaced label");
      Instruction& ins = prog_[idx];
      ins.args[ins.op == Op::jz ? 1 : 0] = *pos;
    }
    fixups_.clear();
    return std::move(prog_);
  }

 private:
  Program prog_;
  std::vector<std::optional<std::size_t>> labels_;
  std::vector<std::pair<std::size_t, Label>> fixups_;
  std::uint32_t next_reg_;
};

/// A fixed bit chunk (MSB-first `width` bits of `value`).
struct BitChunk {
  Nat value;
  std::size_t width;
};

namespace detail {

/// Scratch registers shared by the stream-building emitters.
struct StreamScratch {
  std::uint32_t t1, t2, t3, t4;
  static StreamScratch claim(CodeBuilder& cb) {
    return {cb.fresh_reg(), cb.fresh_reg(), cb.fresh_reg(), cb.fresh_reg()};
  }
};

/// acc = (acc << chunk.width) + chunk.value.
inline void emit_append_bits(CodeBuilder& cb, std::uint32_t acc, const BitChunk& chunk,
                             const StreamScratch& s) {
  if (chunk.width == 0) return;
  cb.constv(s.t1, chunk.width);
  cb.shl(acc, s.t1);
  if (chunk.value != 0) {
    cb.constv(s.t1, chunk.value);
    cb.add(acc, s.t1);
  }
}

/**
 * Append the Elias delta code of n = reg[src] (requires n >= 1) to the
 * stream accumulator: zeros, the bit length field, then the low bits.
 * Leaves src intact.
 */
inline void emit_append_delta(CodeBuilder& cb, std::uint32_t acc, std::uint32_t src,
                              const StreamScratch& s) {
  cb.bitlen(s.t1, src);   // t1 = L = bitlen(n)
  cb.bitlen(s.t2, s.t1);  // t2 = bitlen(L)
  cb.dec(s.t2);
  cb.shl(acc, s.t2);      // leading zeros
  cb.inc(s.t2);
  cb.shl(acc, s.t2);
  cb.add(acc, s.t1);      // the L field (its top bit is the terminating 1)
  cb.copy(s.t2, s.t1);
  cb.dec(s.t2);           // t2 = L - 1
  cb.shl(acc, s.t2);      // room for the low bits
  cb.constv(s.t3, 1);
  cb.shl(s.t3, s.t2);     // t3 = 2^(L-1)
  cb.copy(s.t4, src);
  cb.sub(s.t4, s.t3);     // t4 = n - 2^(L-1)
  cb.add(acc, s.t4);
}

/// The specializer template [CONST 1 a; PAIR 0 1 0; CONST 1 p; PAIR 0 1 0;
/// EXT sim; HALT 0] split around its two value operands.
struct SmnChunks {
  BitChunk prefix;  // CONST opcode + delta(reg 1), before delta(a+1)
  BitChunk middle;  // PAIR 0 1 0 + CONST opcode + delta(reg 1), before delta(p+1)
  BitChunk suffix;  // PAIR 0 1 0 + EXT sim + HALT 0
};

template <typename Fill>
inline BitChunk chunk_of(Fill&& fill) {
  BitWriter w;
  fill(w);
  const std::size_t width = w.size();
  Nat value = w.to_sentinel() - (Nat(1) << width);
  return BitChunk{std::move(value), width};
}

inline const SmnChunks& smn_chunks() {
  static const SmnChunks chunks = [] {
    SmnChunks c;
    c.prefix = chunk_of([](BitWriter& w) {
      w.push_field(static_cast<std::uint64_t>(Op::constv), opcode_bits);
      push_delta(w, 1);  // destination register 1
    });
    c.middle = chunk_of([](BitWriter& w) {
      w.push_field(static_cast<std::uint64_t>(Op::pair), opcode_bits);
      push_delta(w, 0);
      push_delta(w, 1);
      push_delta(w, 0);
      w.push_field(static_cast<std::uint64_t>(Op::constv), opcode_bits);
      push_delta(w, 1);
    });
    c.suffix = chunk_of([](BitWriter& w) {
      w.push_field(static_cast<std::uint64_t>(Op::pair), opcode_bits);
      push_delta(w, 0);
      push_delta(w, 1);
      push_delta(w, 0);
      w.push_field(static_cast<std::uint64_t>(Op::ext), opcode_bits);
      push_delta(w, ext_sim);
      w.push_field(static_cast<std::uint64_t>(Op::halt), opcode_bits);
      push_delta(w, 0);
    });
    return c;
  }();
  return chunks;
}

}  // namespace detail

/**
 * Emit code computing reg[out] = smn(reg[p_reg], reg[a_reg]) — the numeric
 * code of the program that runs p on <a, x>.  Bit-identical to the host-side
 * specializer in combinators.hpp.  p_reg and a_reg stay intact (out must
 * differ from both and from the scratch registers).
 */
inline void emit_smn_build(CodeBuilder& cb, std::uint32_t out, std::uint32_t p_reg,
                           std::uint32_t a_reg, const detail::StreamScratch& s,
                           std::uint32_t hold_reg) {
  const auto& chunks = detail::smn_chunks();
  cb.constv(out, 1);  // stream sentinel
  detail::emit_append_bits(cb, out, chunks.prefix, s);
  cb.copy(hold_reg, a_reg);
  cb.inc(hold_reg);
  detail::emit_append_delta(cb, out, hold_reg, s);  // delta(a + 1)
  detail::emit_append_bits(cb, out, chunks.middle, s);
  cb.copy(hold_reg, p_reg);
  cb.inc(hold_reg);
  detail::emit_append_delta(cb, out, hold_reg, s);  // delta(p + 1)
  detail::emit_append_bits(cb, out, chunks.suffix, s);
  // code = 8 * <stream, 0>
  cb.constv(hold_reg, 0);
  cb.pair(out, out, hold_reg);
  cb.constv(hold_reg, 3);
  cb.shl(out, hold_reg);
}

}  // namespace krt
