#pragma once

/**
 * @file encoding.hpp
 * @brief The register-machine instruction set and its numeric program codes.
 *
 * A program is a non-empty instruction list.  Registers hold naturals, start
 * at zero except register 0 (the input), and HALT r outputs register r.
 *
 *   op  mnemonic        operands   effect
 *    0  CONST r v       r, v       reg[r] = v
 *    1  INC r           r          reg[r] += 1
 *    2  DEC r           r          reg[r] -= 1 (floor 0)
 *    3  COPY d s        d, s       reg[d] = reg[s]
 *    4  ADD d s         d, s       reg[d] += reg[s]
 *    5  SUB d s         d, s       reg[d] -= reg[s] (floor 0)
 *    6  MUL d s         d, s       reg[d] *= reg[s]
 *    7  JZ r t          r, t       if reg[r] == 0 jump to t
 *    8  JMP t           t          jump to t
 *    9  PAIR d a b      d, a, b    reg[d] = <reg[a], reg[b]>
 *   10  UNL d s         d, s       reg[d] = left component of reg[s]
 *   11  UNR d s         d, s       reg[d] = right component of reg[s]
 *   12  SHL d s         d, s       reg[d] <<= reg[s]
 *   13  SHR d s         d, s       reg[d] >>= reg[s]
 *   14  BITLEN d s      d, s       reg[d] = bitlen(reg[s])
 *   15  EXT k           k          reg[0] = extension_k(reg[0])
 *   16  HALT r          r          halt with output reg[r]
 *
 * Extensions (argument and result both in register 0):
 *   k=0 SIM     reg0 = <p, x>; runs program p on input x; see machine.hpp
 *   k=1 ORACLE  reg0 = <s, x>; 1 iff the oracle affirms sentence s within x
 *   k=2 PRIME   reg0 = n; the n-th prime
 *
 * Numeric code.  Instructions serialize to a self-delimiting bitstream: five
 * opcode bits (MSB first), then each operand v as the Elias delta code of
 * v+1.  The stream maps to a natural through a sentinel accumulator (the
 * number whose binary notation is "1" followed by the stream), and the
 * program code is
 *
 *     code = 8 * <stream_number, padding>
 *
 * where the padding counter is semantically inert — bumping it yields a
 * provably distinct code for the same program.  A natural is a (normal)
 * program code iff it is a positive multiple of 8 whose stream parses to one
 * or more instructions consuming every payload bit, with all opcodes <= 16
 * and EXT arguments <= 2.  Every other natural is abnormal and denotes the
 * everywhere-divergent function.
 *
 * Self-delimiting operands keep codes linear in the total operand bit length
 * (nesting the pairing bijection instead would double the size per list
 * element), which is what makes program-building programs feasible.
 */

#include "krt/nat.hpp"
#include "krt/numcode.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace krt {

enum class Op : std::uint8_t {
  constv = 0,
  inc = 1,
  dec = 2,
  copy = 3,
  add = 4,
  sub = 5,
  mul = 6,
  jz = 7,
  jmp = 8,
  pair = 9,
  unl = 10,
  unr = 11,
  shl = 12,
  shr = 13,
  bitlen = 14,
  ext = 15,
  halt = 16,
};

inline constexpr unsigned op_count = 17;
inline constexpr unsigned opcode_bits = 5;

inline constexpr std::uint64_t ext_sim = 0;
inline constexpr std::uint64_t ext_oracle = 1;
inline constexpr std::uint64_t ext_prime = 2;
inline constexpr std::uint64_t ext_count = 3;

/// Host guard: programs beyond this payload size are not materialized.
inline constexpr std::size_t max_payload_bits = std::size_t(1) << 26;

inline unsigned op_arity(Op op) {
  switch (op) {
    case Op::inc:
    case Op::dec:
    case Op::jmp:
    case Op::ext:
    case Op::halt: return 1;
    case Op::pair: return 3;
    default: return 2;
  }
}

inline const char* op_name(Op op) {
  static const char* names[op_count] = {"CONST", "INC", "DEC", "COPY", "ADD",
                                        "SUB",   "MUL", "JZ",  "JMP",  "PAIR",
                                        "UNL",   "UNR", "SHL", "SHR",  "BITLEN",
                                        "EXT",   "HALT"};
  return names[static_cast<unsigned>(op)];
}

struct Instruction {
  Op op = Op::halt;
  std::vector<Nat> args;

  bool operator==(const Instruction& o) const = default;
};

using Program = std::vector<Instruction>;

inline Instruction ins_const(Nat r, Nat v) { return {Op::constv, {std::move(r), std::move(v)}}; }
inline Instruction ins_inc(Nat r) { return {Op::inc, {std::move(r)}}; }
inline Instruction ins_dec(Nat r) { return {Op::dec, {std::move(r)}}; }
inline Instruction ins_copy(Nat d, Nat s) { return {Op::copy, {std::move(d), std::move(s)}}; }
inline Instruction ins_add(Nat d, Nat s) { return {Op::add, {std::move(d), std::move(s)}}; }
inline Instruction ins_sub(Nat d, Nat s) { return {Op::sub, {std::move(d), std::move(s)}}; }
inline Instruction ins_mul(Nat d, Nat s) { return {Op::mul, {std::move(d), std::move(s)}}; }
inline Instruction ins_jz(Nat r, Nat t) { return {Op::jz, {std::move(r), std::move(t)}}; }
inline Instruction ins_jmp(Nat t) { return {Op::jmp, {std::move(t)}}; }
inline Instruction ins_pair(Nat d, Nat a, Nat b) {
  return {Op::pair, {std::move(d), std::move(a), std::move(b)}};
}
inline Instruction ins_unl(Nat d, Nat s) { return {Op::unl, {std::move(d), std::move(s)}}; }
inline Instruction ins_unr(Nat d, Nat s) { return {Op::unr, {std::move(d), std::move(s)}}; }
inline Instruction ins_shl(Nat d, Nat s) { return {Op::shl, {std::move(d), std::move(s)}}; }
inline Instruction ins_shr(Nat d, Nat s) { return {Op::shr, {std::move(d), std::move(s)}}; }
inline Instruction ins_bitlen(Nat d, Nat s) { return {Op::bitlen, {std::move(d), std::move(s)}}; }
inline Instruction ins_ext(Nat k) { return {Op::ext, {std::move(k)}}; }
inline Instruction ins_halt(Nat r) { return {Op::halt, {std::move(r)}}; }

namespace detail {

/// Accumulates an MSB-first bitstream and converts it to the sentinel form.
class BitWriter {
 public:
  void push_bit(unsigned b) {
    if ((nbits_ & 7) == 0) bytes_.push_back(0);
    if (b) bytes_.back() |= static_cast<std::uint8_t>(0x80u >> (nbits_ & 7));
    ++nbits_;
    if (nbits_ > max_payload_bits)
      throw resource_error("program stream beyond host payload guard");
  }

  /// `v` as exactly `width` bits, MSB first (v < 2^width).
  void push_field(std::uint64_t v, unsigned width) {
    for (unsigned i = width; i-- > 0;) push_bit(static_cast<unsigned>((v >> i) & 1u));
  }

  void push_nat_field(const Nat& v, std::size_t width) {
    for (std::size_t i = width; i-- > 0;)
      push_bit(boost::multiprecision::bit_test(v, static_cast<unsigned>(i)) ? 1u : 0u);
  }

  std::size_t size() const { return nbits_; }

  /// The natural whose binary notation is "1" + stream.
  Nat to_sentinel() const {
    const std::size_t total = nbits_ + 1;
    const unsigned lead = static_cast<unsigned>((8 - (total % 8)) % 8);
    std::vector<std::uint8_t> buf((total + lead) / 8, 0);
    auto set = [&buf](std::size_t j) {
      buf[j >> 3] |= static_cast<std::uint8_t>(0x80u >> (j & 7));
    };
    set(lead);  // sentinel
    for (std::size_t i = 0; i < nbits_; ++i)
      if (bytes_[i >> 3] & (0x80u >> (i & 7))) set(lead + 1 + i);
    Nat out;
    boost::multiprecision::import_bits(out, buf.begin(), buf.end());
    return out;
  }

 private:
  std::vector<std::uint8_t> bytes_;
  std::size_t nbits_ = 0;
};

/// Reads the payload bits of a sentinel-form stream number, MSB first.
class BitReader {
 public:
  explicit BitReader(const Nat& sentinel)
      : enc_(sentinel), total_(bitlen_sz(sentinel) - 1) {}

  std::size_t remaining() const { return total_ - pos_; }
  bool done() const { return pos_ == total_; }

  std::optional<unsigned> read_bit() {
    if (pos_ >= total_) return std::nullopt;
    const bool b =
        boost::multiprecision::bit_test(enc_, static_cast<unsigned>(total_ - 1 - pos_));
    ++pos_;
    return b ? 1u : 0u;
  }

  std::optional<Nat> read_field(std::size_t len) {
    if (len > remaining()) return std::nullopt;
    Nat v = (enc_ >> (total_ - pos_ - len)) & ((Nat(1) << len) - 1);
    pos_ += len;
    return v;
  }

 private:
  const Nat& enc_;
  std::size_t total_;
  std::size_t pos_ = 0;
};

inline void push_delta(BitWriter& w, const Nat& operand) {
  const Nat n = operand + 1;
  const std::size_t len = bitlen_sz(n);
  const std::size_t len_len = bitlen_sz(Nat(len));
  for (std::size_t i = 0; i + 1 < len_len; ++i) w.push_bit(0);
  w.push_field(static_cast<std::uint64_t>(len), static_cast<unsigned>(len_len));
  if (len > 1) w.push_nat_field(n - (Nat(1) << (len - 1)), len - 1);
}

inline std::optional<Nat> read_delta(BitReader& r) {
  std::size_t zeros = 0;
  while (true) {
    const auto b = r.read_bit();
    if (!b) return std::nullopt;
    if (*b) break;
    // A length field this wide promises more payload than any stream under
    // the host guard can hold, so the stream cannot be well-formed.
    if (++zeros > 32) return std::nullopt;
  }
  std::uint64_t len = 1;
  for (std::size_t i = 0; i < zeros; ++i) {
    const auto b = r.read_bit();
    if (!b) return std::nullopt;
    len = (len << 1) | *b;
  }
  if (len == 0 || len - 1 > r.remaining()) return std::nullopt;
  if (len == 1) return Nat(0);
  auto low = r.read_field(len - 1);
  if (!low) return std::nullopt;
  Nat n = (Nat(1) << (len - 1)) | *low;
  return Nat(n - 1);
}

}  // namespace detail

/// Stream number of a program ("1" + bits in sentinel form).
inline Nat encode_stream(const Program& prog) {
  if (prog.empty()) throw std::invalid_argument("encode_stream: empty program");
  detail::BitWriter w;
  for (const auto& ins : prog) {
    if (ins.args.size() != op_arity(ins.op))
      throw std::invalid_argument("encode_stream: operand count mismatch");
    if (ins.op == Op::ext && ins.args[0] >= ext_count)
      throw std::invalid_argument("encode_stream: unknown extension");
    w.push_field(static_cast<std::uint64_t>(ins.op), opcode_bits);
    for (const auto& a : ins.args) detail::push_delta(w, a);
  }
  return w.to_sentinel();
}

/// Inverse of encode_stream; empty when the stream is not well formed.
inline std::optional<Program> decode_stream(const Nat& sentinel) {
  if (sentinel <= 1) return std::nullopt;  // no sentinel bit / empty program
  if (bitlen_sz(sentinel) - 1 > max_payload_bits)
    throw resource_error("program stream beyond host payload guard");
  detail::BitReader r(sentinel);
  Program prog;
  while (!r.done()) {
    const auto opf = r.read_field(opcode_bits);
    if (!opf) return std::nullopt;
    const unsigned opv = opf->convert_to<unsigned>();
    if (opv >= op_count) return std::nullopt;
    Instruction ins;
    ins.op = static_cast<Op>(opv);
    const unsigned arity = op_arity(ins.op);
    ins.args.reserve(arity);
    for (unsigned i = 0; i < arity; ++i) {
      auto v = detail::read_delta(r);
      if (!v) return std::nullopt;
      ins.args.push_back(std::move(*v));
    }
    if (ins.op == Op::ext && ins.args[0] >= ext_count) return std::nullopt;
    prog.push_back(std::move(ins));
  }
  return prog;
}

/// code = 8 * <stream, padding>.
inline Nat encode_program(const Program& prog, const Nat& padding = 0) {
  return pair_encode(encode_stream(prog), padding) << 3;
}

struct DecodedProgram {
  Program prog;
  Nat padding;
};

/// Empty when `code` is abnormal.
inline std::optional<DecodedProgram> decode_program(const Nat& code) {
  if (code == 0 || (code & 7) != 0) return std::nullopt;
  auto [stream, padding] = pair_decode(code >> 3);
  auto prog = decode_stream(stream);
  if (!prog) return std::nullopt;
  return DecodedProgram{std::move(*prog), std::move(padding)};
}

inline bool is_program_code(const Nat& code) { return decode_program(code).has_value(); }

/// Human-readable listing ("0  CONST r1 5" per line) for inspection output.
inline std::string format_program(const Program& prog) {
  std::string out;
  for (std::size_t i = 0; i < prog.size(); ++i) {
    const auto& ins = prog[i];
    out += std::to_string(i);
    out += '\t';
    out += op_name(ins.op);
    for (const auto& a : ins.args) {
      out += ' ';
      out += a.str();
    }
    if (ins.op == Op::ext) {
      static const char* prim[ext_count] = {"sim", "oracle", "prime"};
      if (ins.args[0] < ext_count) {
        out += " (";
        out += prim[ins.args[0].convert_to<std::size_t>()];
        out += ')';
      }
    }
    out += '\n';
  }
  return out;
}

}  // namespace krt
