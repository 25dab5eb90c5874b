#pragma once

/**
 * @file machine.hpp
 * @brief Executable semantics for the register machine, in two engines.
 *
 * Outcomes.  Running program p on input x with a step budget B yields
 *   Halted{value, steps}   p halts with `value` after exactly `steps` <= B
 *   OutOfBudget            p does not halt within B steps
 *   AbnormalDivergence     p is not a program code (diverges on every input)
 *
 * `steps` is a budget-independent step-counting complexity measure:
 * every dispatched instruction costs 1, and extensions add
 *   SIM     the simulated run's own step count (so simulation is
 *           step-transparent),
 *   ORACLE  the queried budget x (a query can only see x steps deep),
 *   PRIME   bitlen(argument) + bitlen(result).
 * Halting within B is decidable by running with budget B, and Halted{v, t}
 * re-runs to the same outcome at exactly budget t but not at t - 1.
 *
 * Engines.
 *   accelerated  An explicit-stack interpreter with per-System caches: codes
 *                decode once, and completed simulations are memoized as
 *                (body, input) -> (value, exact steps) so replays charge the
 *                true cost without re-execution.  Runs that exhaust the
 *                budget leave "no halt within F" watermarks that later runs
 *                consult.  Caches never change observable behaviour — only
 *                the wall-clock cost of reaching it.
 *   pure         An independent, cache-free, host-recursive reference
 *                interpreter.  It runs the two-instruction universal program
 *                u = [EXT sim; HALT r0] on <p, x> with budget B + 2, which
 *                halts iff the direct run halts within B and reports exactly
 *                2 more steps.  Agreement between the engines is a checked
 *                conformance property.
 *
 * The oracle is fixed at System construction: a different oracle is a
 * different system (caches are per-System, so answers can be cached safely).
 *
 * Host guards (resource_error): values beyond 2^26 bits, register indices
 * beyond 2^22, simulation nesting beyond 2^16 frames.  These bound what this
 * host materializes; they are not part of the machine semantics.
 */

#include "krt/encoding.hpp"
#include "krt/nat.hpp"
#include "krt/numcode.hpp"
#include "krt/oracle.hpp"
#include "krt/sentence.hpp"
#include "krt/word.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

namespace krt {

struct Halted {
  Nat value;
  Nat steps;
};
struct OutOfBudget {};
struct AbnormalDivergence {};

using RunOutcome = std::variant<Halted, OutOfBudget, AbnormalDivergence>;

inline bool is_halted(const RunOutcome& o) { return std::holds_alternative<Halted>(o); }
inline const Halted& as_halted(const RunOutcome& o) { return std::get<Halted>(o); }

inline constexpr std::size_t max_value_bits = std::size_t(1) << 26;
inline constexpr std::uint32_t max_register_index = std::uint32_t(1) << 22;
inline constexpr std::size_t max_sim_depth = std::size_t(1) << 16;

/// Simulations whose input numeral exceeds this size are run but never
/// memoized: such keys are effectively one-shot (recursion-theorem codes
/// thread fresh megabit tuples through every call), so caching them would
/// retain unbounded memory for hits that cannot occur.
inline constexpr std::size_t max_memo_input_bits = std::size_t(1) << 16;

enum class EngineMode { accelerated, pure };

namespace detail {

/// Compiled instruction: register indices and jump targets resolved to
/// machine integers, CONST payloads interned as Words.
struct ExecIns {
  Op op;
  std::uint32_t a = 0;
  std::uint32_t b = 0;
  std::uint32_t c = 0;
  Word value;             // CONST payload
  bool reg_fault = false; // a register operand lies beyond the host guard
};

struct Body {
  std::uint64_t id = 0;
  bool valid = false;
  std::vector<ExecIns> code;
  std::uint32_t reg_span = 1;  // 1 + highest register index used
};

inline std::uint32_t resolve_reg(const Nat& idx, Body& body, bool& fault) {
  if (idx > max_register_index) {
    fault = true;
    return 0;
  }
  const auto r = idx.convert_to<std::uint32_t>();
  if (r + 1 > body.reg_span) body.reg_span = r + 1;
  return r;
}

inline std::uint32_t resolve_target(const Nat& t, std::size_t len) {
  // Targets at or past the end all mean the same thing: fall off and spin.
  if (t >= len) return static_cast<std::uint32_t>(len);
  return t.convert_to<std::uint32_t>();
}

inline void compile_body(const Program& prog, Body& body) {
  const std::size_t len = prog.size();
  body.code.reserve(len);
  for (const auto& src : prog) {
    ExecIns out;
    out.op = src.op;
    switch (src.op) {
      case Op::constv:
        out.a = resolve_reg(src.args[0], body, out.reg_fault);
        out.value = make_word(src.args[1]);
        break;
      case Op::inc:
      case Op::dec:
      case Op::halt:
        out.a = resolve_reg(src.args[0], body, out.reg_fault);
        break;
      case Op::jmp:
        out.a = resolve_target(src.args[0], len);
        break;
      case Op::jz:
        out.a = resolve_reg(src.args[0], body, out.reg_fault);
        out.b = resolve_target(src.args[1], len);
        break;
      case Op::pair:
        out.a = resolve_reg(src.args[0], body, out.reg_fault);
        out.b = resolve_reg(src.args[1], body, out.reg_fault);
        out.c = resolve_reg(src.args[2], body, out.reg_fault);
        break;
      case Op::ext:
        out.a = src.args[0].convert_to<std::uint32_t>();
        break;
      default:  // two-register ops
        out.a = resolve_reg(src.args[0], body, out.reg_fault);
        out.b = resolve_reg(src.args[1], body, out.reg_fault);
        break;
    }
    body.code.push_back(std::move(out));
  }
}

class RegFile {
 public:
  RegFile(std::uint32_t span, Word input) : use_map_(span > 1024) {
    if (!use_map_) vec_.resize(span, zero_word());
    set(0, std::move(input));
  }

  const Word& get(std::uint32_t i) const {
    if (!use_map_) return vec_[i];
    const auto it = map_.find(i);
    return it == map_.end() ? zero_word() : it->second;
  }

  void set(std::uint32_t i, Word w) {
    if (!use_map_)
      vec_[i] = std::move(w);
    else
      map_[i] = std::move(w);
  }

 private:
  std::vector<Word> vec_;
  std::unordered_map<std::uint32_t, Word> map_;
  bool use_map_;
};

/**
 * Exact step accounting against an arbitrarily large budget.  Single steps
 * bump a machine-word counter; the big-number bookkeeping only runs when a
 * chunk boundary or a bulk charge (memo replay, oracle cost) is hit.
 */
class BudgetMeter {
 public:
  explicit BudgetMeter(Nat budget) : budget_(std::move(budget)) { refresh(); }

  bool charge_one() {
    if (small_ < small_limit_) {
      ++small_;
      return true;
    }
    return charge_big(1);
  }

  bool charge_big(const Nat& t) {
    big_ += small_;
    small_ = 0;
    Nat rem = budget_ - big_;
    if (rem < t) {
      consume_all();
      return false;
    }
    big_ += t;
    refresh();
    return true;
  }

  void consume_all() {
    big_ = budget_;
    small_ = 0;
    small_limit_ = 0;
  }

  Nat consumed() const { return big_ + small_; }
  Nat remaining() const { return budget_ - big_ - small_; }
  const Nat& budget() const { return budget_; }

 private:
  void refresh() {
    const Nat rem = budget_ - big_;
    constexpr std::uint64_t chunk = std::uint64_t(1) << 30;
    small_limit_ = rem > chunk ? chunk : rem.convert_to<std::uint64_t>();
  }

  Nat budget_;
  Nat big_ = 0;
  std::uint64_t small_ = 0;
  std::uint64_t small_limit_ = 0;
};

inline Nat checked_shl(const Nat& v, const Nat& amount) {
  if (v == 0) return 0;
  if (amount > max_value_bits)
    throw resource_error("shift beyond host value guard");
  const std::size_t sh = amount.convert_to<std::size_t>();
  if (bitlen_sz(v) + sh > max_value_bits)
    throw resource_error("value beyond host guard");
  return v << sh;
}

inline Nat checked_mul(const Nat& a, const Nat& b) {
  if (a != 0 && b != 0 && bitlen_sz(a) + bitlen_sz(b) > max_value_bits + 1)
    throw resource_error("value beyond host guard");
  return a * b;
}

}  // namespace detail

/// The two-instruction universal program: on <p, x> it simulates p on x and
/// outputs the result, at a uniform overhead of exactly 2 steps.
inline const Nat& universal_code() {
  static const Nat u = encode_program({ins_ext(ext_sim), ins_halt(0)});
  return u;
}

class System {
 public:
  explicit System(std::shared_ptr<const Oracle> oracle = std::make_shared<SilentOracle>())
      : oracle_(std::move(oracle)) {
    bodies_.reserve(1024);
    sim_memo_.reserve(4096);
  }

  System(const System&) = delete;
  System& operator=(const System&) = delete;

  const Oracle& oracle() const { return *oracle_; }

  /// True iff `code` denotes a normal program.
  bool classify(const Nat& code) { return body_for(make_word(code))->valid; }

  RunOutcome run(const Nat& program, const Nat& input, const Nat& budget,
                 EngineMode mode = EngineMode::accelerated) {
    if (mode == EngineMode::accelerated) return run_accelerated(program, input, budget);
    return run_pure(program, input, budget);
  }

 private:
  // ---- decoded-program cache -------------------------------------------

  struct NatHasher {
    std::size_t operator()(const Nat& n) const { return nat_hash(n); }
  };

  std::shared_ptr<const detail::Body> body_for(const Word& code) {
    if (code->body_owner == this)
      return std::static_pointer_cast<const detail::Body>(code->body_ref);
    auto it = bodies_.find(code->n);
    if (it == bodies_.end()) {
      auto body = std::make_shared<detail::Body>();
      body->id = next_body_id_++;
      if (auto dec = decode_program(code->n)) {
        body->valid = true;
        detail::compile_body(dec->prog, *body);
      }
      it = bodies_.emplace(code->n, std::move(body)).first;
    }
    code->body_owner = this;
    code->body_ref = it->second;
    return it->second;
  }

  // ---- simulation memo ----------------------------------------------------

  struct MemoKey {
    std::uint64_t body;
    Word input;
  };
  struct MemoKeyHash {
    std::size_t operator()(const MemoKey& k) const {
      return static_cast<std::size_t>(k.body * 0x9E3779B97F4A7C15ull ^
                                      k.input->hash_value());
    }
  };
  struct MemoKeyEq {
    bool operator()(const MemoKey& a, const MemoKey& b) const {
      return a.body == b.body && a.input->n == b.input->n;
    }
  };
  struct MemoVal {
    bool halted = false;
    Word value;   // set when halted
    Nat amount;   // exact steps when halted; else "no halt within" watermark
  };

  static bool memoizable(const MemoKey& key) {
    static const Nat limit(max_memo_input_bits);
    return bitlen(key.input->n) <= limit;
  }

  void memo_halted(const MemoKey& key, Word value, Nat steps) {
    if (!memoizable(key)) return;
    auto& slot = sim_memo_[key];
    if (slot.halted) return;  // already exact
    slot.halted = true;
    slot.value = std::move(value);
    slot.amount = std::move(steps);
  }

  void memo_no_halt_within(const MemoKey& key, Nat fuel) {
    if (!memoizable(key)) return;
    auto& slot = sim_memo_[key];
    if (slot.halted) return;
    if (slot.amount < fuel) slot.amount = std::move(fuel);
  }

  // ---- accelerated engine ---------------------------------------------

  struct Frame {
    std::shared_ptr<const detail::Body> body;
    detail::RegFile regs;
    std::uint32_t pc = 0;
    Nat entry_mark;  // meter.consumed() at frame entry
    MemoKey key;
  };

  RunOutcome run_accelerated(const Nat& program, const Nat& input, const Nat& budget) {
    const Word code = make_word(program);
    const auto body = body_for(code);
    if (!body->valid) return AbnormalDivergence{};

    detail::BudgetMeter meter(budget);
    std::vector<Frame> stack;
    stack.reserve(64);

    const auto enter = [&](std::shared_ptr<const detail::Body> b, Word in) {
      if (stack.size() >= max_sim_depth)
        throw resource_error("simulation nesting beyond host guard");
      MemoKey key{b->id, in};
      detail::RegFile regs(b->reg_span, std::move(in));
      stack.push_back(
          Frame{std::move(b), std::move(regs), 0, meter.consumed(), std::move(key)});
    };

    const auto out_of_budget = [&]() -> RunOutcome {
      meter.consume_all();
      for (const auto& f : stack)
        memo_no_halt_within(f.key, meter.budget() - f.entry_mark);
      return OutOfBudget{};
    };

    // A completed simulation of the same call replays at its exact cost.
    const Word input_word = make_word(input);
    if (const MemoKey key{body->id, input_word}; memoizable(key)) {
      const auto it = sim_memo_.find(key);
      if (it != sim_memo_.end()) {
        const MemoVal& m = it->second;
        if (m.halted) {
          if (m.amount > budget) return OutOfBudget{};
          return Halted{m.value->n, m.amount};
        }
        if (m.amount >= budget) return OutOfBudget{};
      }
    }

    enter(body, input_word);

    while (true) {
      Frame& f = stack.back();
      const auto& code_vec = f.body->code;
      if (f.pc >= code_vec.size()) return out_of_budget();  // fell off: spins
      const detail::ExecIns& ins = code_vec[f.pc];
      if (!meter.charge_one()) return out_of_budget();
      if (ins.reg_fault)
        throw resource_error("register index beyond host guard");

      switch (ins.op) {
        case Op::constv:
          f.regs.set(ins.a, ins.value);
          ++f.pc;
          break;
        case Op::inc:
          f.regs.set(ins.a, make_word(f.regs.get(ins.a)->n + 1));
          ++f.pc;
          break;
        case Op::dec:
          f.regs.set(ins.a, make_word(monus(f.regs.get(ins.a)->n, 1)));
          ++f.pc;
          break;
        case Op::copy:
          f.regs.set(ins.a, f.regs.get(ins.b));
          ++f.pc;
          break;
        case Op::add:
          f.regs.set(ins.a, make_word(f.regs.get(ins.a)->n + f.regs.get(ins.b)->n));
          ++f.pc;
          break;
        case Op::sub:
          f.regs.set(ins.a, make_word(monus(f.regs.get(ins.a)->n, f.regs.get(ins.b)->n)));
          ++f.pc;
          break;
        case Op::mul:
          f.regs.set(ins.a,
                     make_word(detail::checked_mul(f.regs.get(ins.a)->n,
                                                   f.regs.get(ins.b)->n)));
          ++f.pc;
          break;
        case Op::jz:
          f.pc = (f.regs.get(ins.a)->n == 0) ? ins.b : f.pc + 1;
          break;
        case Op::jmp:
          f.pc = ins.a;
          break;
        case Op::pair: {
          if (bitlen_sz(f.regs.get(ins.b)->n) > max_value_bits / 2 ||
              bitlen_sz(f.regs.get(ins.c)->n) > max_value_bits / 2)
            throw resource_error("value beyond host guard");
          f.regs.set(ins.a, pair_word(f.regs.get(ins.b), f.regs.get(ins.c)));
          ++f.pc;
          break;
        }
        case Op::unl:
          f.regs.set(ins.a, left_word(f.regs.get(ins.b)));
          ++f.pc;
          break;
        case Op::unr:
          f.regs.set(ins.a, right_word(f.regs.get(ins.b)));
          ++f.pc;
          break;
        case Op::shl:
          f.regs.set(ins.a, make_word(detail::checked_shl(f.regs.get(ins.a)->n,
                                                          f.regs.get(ins.b)->n)));
          ++f.pc;
          break;
        case Op::shr: {
          const Nat& amt = f.regs.get(ins.b)->n;
          const Nat& v = f.regs.get(ins.a)->n;
          if (amt >= bitlen(v))
            f.regs.set(ins.a, zero_word());
          else
            f.regs.set(ins.a, make_word(v >> amt.convert_to<std::size_t>()));
          ++f.pc;
          break;
        }
        case Op::bitlen:
          f.regs.set(ins.a, make_word(bitlen(f.regs.get(ins.b)->n)));
          ++f.pc;
          break;
        case Op::halt: {
          Word value = f.regs.get(ins.a);
          memo_halted(f.key, value, meter.consumed() - f.entry_mark);
          if (stack.size() == 1) return Halted{value->n, meter.consumed()};
          stack.pop_back();
          Frame& parent = stack.back();
          parent.regs.set(0, std::move(value));
          ++parent.pc;
          break;
        }
        case Op::ext:
          switch (ins.a) {
            case ext_sim: {
              const Word arg = f.regs.get(0);
              const Word inner_code = left_word(arg);
              const Word inner_input = right_word(arg);
              const auto inner = body_for(inner_code);
              if (!inner->valid) return out_of_budget();  // abnormal: diverges
              const MemoKey key{inner->id, inner_input};
              if (memoizable(key)) {
                const auto it = sim_memo_.find(key);
                if (it != sim_memo_.end()) {
                  const MemoVal& m = it->second;
                  if (m.halted) {
                    if (!meter.charge_big(m.amount)) return out_of_budget();
                    f.regs.set(0, m.value);
                    ++f.pc;
                    break;
                  }
                  if (meter.remaining() <= m.amount) return out_of_budget();
                }
              }
              enter(inner, inner_input);  // resumes here on the child's HALT
              break;
            }
            case ext_oracle: {
              const Word arg = f.regs.get(0);
              const Word sentence_code = left_word(arg);
              const Word query_budget = right_word(arg);
              if (!meter.charge_big(query_budget->n)) return out_of_budget();
              bool answer = false;
              if (const auto s = Sentence::from_code(sentence_code->n))
                answer = oracle_->query(*s, query_budget->n);
              f.regs.set(0, answer ? one_word() : zero_word());
              ++f.pc;
              break;
            }
            case ext_prime: {
              const Nat& n = f.regs.get(0)->n;
              Nat result = nth_prime(n);
              if (!meter.charge_big(bitlen(n) + bitlen(result)))
                return out_of_budget();
              f.regs.set(0, make_word(std::move(result)));
              ++f.pc;
              break;
            }
            default:
              return out_of_budget();  // unreachable for valid bodies
          }
          break;
      }
    }
  }

  // ---- pure reference engine -------------------------------------------

  struct PureResult {
    enum Kind { halted, no_halt, abnormal } kind;
    Nat value;
    Nat steps;
  };

  PureResult pure_eval(const Nat& code, const Nat& input, const Nat& fuel,
                       std::size_t depth) const {
    if (depth > max_sim_depth)
      throw resource_error("simulation nesting beyond host guard");
    const auto dec = decode_program(code);
    if (!dec) return {PureResult::abnormal, 0, 0};
    const Program& prog = dec->prog;

    std::map<Nat, Nat> regs;
    regs[0] = input;
    const auto get = [&regs](const Nat& i) -> Nat {
      const auto it = regs.find(i);
      return it == regs.end() ? Nat(0) : it->second;
    };

    Nat used = 0;
    Nat pc = 0;
    while (true) {
      if (pc >= prog.size()) return {PureResult::no_halt, 0, 0};
      if (used == fuel) return {PureResult::no_halt, 0, 0};
      used += 1;
      const Instruction& ins = prog[pc.convert_to<std::size_t>()];
      const auto& args = ins.args;
      switch (ins.op) {
        case Op::constv: regs[args[0]] = args[1]; pc += 1; break;
        case Op::inc: regs[args[0]] = get(args[0]) + 1; pc += 1; break;
        case Op::dec: regs[args[0]] = monus(get(args[0]), 1); pc += 1; break;
        case Op::copy: regs[args[0]] = get(args[1]); pc += 1; break;
        case Op::add: regs[args[0]] = get(args[0]) + get(args[1]); pc += 1; break;
        case Op::sub: regs[args[0]] = monus(get(args[0]), get(args[1])); pc += 1; break;
        case Op::mul:
          regs[args[0]] = detail::checked_mul(get(args[0]), get(args[1]));
          pc += 1;
          break;
        case Op::jz:
          if (get(args[0]) == 0)
            pc = args[1];
          else
            pc += 1;
          break;
        case Op::jmp: pc = args[0]; break;
        case Op::pair: {
          const Nat a = get(args[1]);
          const Nat b = get(args[2]);
          if (bitlen_sz(a) > max_value_bits / 2 || bitlen_sz(b) > max_value_bits / 2)
            throw resource_error("value beyond host guard");
          regs[args[0]] = pair_encode(a, b);
          pc += 1;
          break;
        }
        case Op::unl: regs[args[0]] = pair_left(get(args[1])); pc += 1; break;
        case Op::unr: regs[args[0]] = pair_right(get(args[1])); pc += 1; break;
        case Op::shl:
          regs[args[0]] = detail::checked_shl(get(args[0]), get(args[1]));
          pc += 1;
          break;
        case Op::shr: {
          const Nat v = get(args[0]);
          const Nat amt = get(args[1]);
          if (amt >= bitlen(v))
            regs[args[0]] = 0;
          else
            regs[args[0]] = v >> amt.convert_to<std::size_t>();
          pc += 1;
          break;
        }
        case Op::bitlen: regs[args[0]] = bitlen(get(args[1])); pc += 1; break;
        case Op::halt: return {PureResult::halted, get(args[0]), used};
        case Op::ext:
          switch (args[0].convert_to<std::uint64_t>()) {
            case ext_sim: {
              const Nat arg = get(0);
              const PureResult inner =
                  pure_eval(pair_left(arg), pair_right(arg), fuel - used, depth + 1);
              if (inner.kind != PureResult::halted) return {PureResult::no_halt, 0, 0};
              used += inner.steps;
              regs[0] = inner.value;
              pc += 1;
              break;
            }
            case ext_oracle: {
              const Nat arg = get(0);
              const Nat sentence_code = pair_left(arg);
              const Nat query_budget = pair_right(arg);
              if (fuel - used < query_budget) return {PureResult::no_halt, 0, 0};
              used += query_budget;
              bool answer = false;
              if (const auto s = Sentence::from_code(sentence_code))
                answer = oracle_->query(*s, query_budget);
              regs[0] = answer ? 1 : 0;
              pc += 1;
              break;
            }
            case ext_prime: {
              const Nat n = get(0);
              const Nat result = nth_prime(n);
              const Nat cost = bitlen(n) + bitlen(result);
              if (fuel - used < cost) return {PureResult::no_halt, 0, 0};
              used += cost;
              regs[0] = result;
              pc += 1;
              break;
            }
            default: return {PureResult::no_halt, 0, 0};
          }
          break;
      }
    }
  }

  RunOutcome run_pure(const Nat& program, const Nat& input, const Nat& budget) const {
    if (!is_program_code(program)) return AbnormalDivergence{};
    const PureResult r = pure_eval(universal_code(), pair_encode(program, input), budget + 2, 0);
    switch (r.kind) {
      case PureResult::halted: return Halted{r.value, r.steps};
      case PureResult::no_halt: return OutOfBudget{};
      case PureResult::abnormal: return AbnormalDivergence{};
    }
    return OutOfBudget{};
  }

  // ---- state ------------------------------------------------------------

  std::shared_ptr<const Oracle> oracle_;
  std::unordered_map<Nat, std::shared_ptr<const detail::Body>, NatHasher> bodies_;
  std::unordered_map<MemoKey, MemoVal, MemoKeyHash, MemoKeyEq> sim_memo_;
  std::uint64_t next_body_id_ = 1;
};

}  // namespace krt
