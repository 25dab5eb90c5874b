#pragma once

/**
 * @file constructions.hpp
 * @brief The diagonal constructions: oracle-guarded interpreters (psi, eta,
 *        theta), the two-candidate trap pair, a fixed-point demo, and the
 *        zeta system with its composition witness and value algebra.
 *
 * Common shape: an interpreter code e defines a derived system by
 * sys_p(x) = phi_e(<p, x>).  Each interpreter asks a budgeted provability
 * oracle about a sentence that mentions the interpreter's own code (obtained
 * through the recursion-theorem combinators), and branches:
 *
 *   psi   fired -> output p;                     else run p on x
 *   eta   fired and p != self -> output p;       else run p on x
 *   theta fired -> output p;                     else run p on x
 *         (theta's sentence asserts a universal program exists for theta)
 *   zeta  fired and p outside the composition machinery -> prime(p+1)^x;
 *         else run p on x
 *
 * With the silent oracle nothing ever fires, so every derived system is
 * extensionally the base system — that transparency is a tested invariant.
 *
 * zeta is built with the n = 3 mixed recursion: e (interpreter), w' (a
 * rewriter making composition codes even, fresh and strictly increasing),
 * w (the composition witness: comp1(a, b) = zeta_w(<a, b>) with CODE-level
 * associativity), plus the total factory c with phi_{c(<p,q>)}(x) =
 * zeta_p(zeta_q(x)).  ZetaAlgebra materializes w and w' on an explored
 * range and decides composition facts outside it symbolically.
 */

#include "krt/combinators.hpp"
#include "krt/machine.hpp"
#include "krt/oracle.hpp"
#include "krt/sentence.hpp"
#include "krt/universal.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace krt {

// ---------------------------------------------------------------------------
// Derived systems.
// ---------------------------------------------------------------------------

struct DerivedSystem {
  SystemKind kind = SystemKind::phi;
  Nat e;       // interpreter: sys_p(x) = phi_e(<p, x>)
  Nat c;       // zeta only: total composition-code factory
  Nat wprime;  // zeta only: the rewriter
  Nat w;       // zeta only: the composition witness
  std::shared_ptr<System> sys;  // base system carrying the oracle

  SystemTag tag() const { return SystemTag{kind, e}; }

  RunOutcome apply(const Nat& p, const Nat& x, const Nat& budget,
                   EngineMode mode = EngineMode::accelerated) const {
    return sys->run(e, pair_encode(p, x), budget, mode);
  }
};

namespace detail {

inline std::shared_ptr<const Oracle> or_silent(std::shared_ptr<const Oracle> o) {
  return o ? std::move(o) : std::make_shared<SilentOracle>();
}

/// Emit: jump to `eq` when reg a == reg b (clobbers t1, t2; 6 instructions).
inline void emit_jump_if_eq(CodeBuilder& cb, std::uint32_t a, std::uint32_t b,
                            std::uint32_t t1, std::uint32_t t2,
                            CodeBuilder::Label eq) {
  cb.copy(t1, a);
  cb.sub(t1, b);
  cb.copy(t2, b);
  cb.sub(t2, a);
  cb.add(t1, t2);
  cb.jz(t1, eq);
}

/// Emit: out <- code of the sentence `sent` tagged with system `sysk` whose
/// defining code sits in `defining` (payload empty; clobbers rk).
inline void emit_tag_sentence(CodeBuilder& cb, std::uint32_t out,
                              SentenceKind sent, SystemKind sysk,
                              std::uint32_t defining, std::uint32_t rk) {
  cb.constv(rk, static_cast<std::uint64_t>(sysk));
  cb.pair(out, rk, defining);  // system tag <kind, defining>
  cb.constv(rk, 0);
  cb.pair(out, out, rk);  // <tag, empty payload>
  cb.constv(rk, static_cast<std::uint64_t>(sent));
  cb.pair(out, rk, out);
}

/**
 * Task body for psi/eta/theta behind krt_plain: on <self, <p, x>>, query the
 * oracle about the system's defining sentence (built from self) at budget x;
 * fired -> output p, else run p on x.  self_exempt inserts eta's escape:
 * p == self always takes the run branch (checked first — it is cheaper than
 * the oracle query, and the conjunction is total so the order is free).
 */
inline Nat guarded_interpreter_task(SentenceKind sent, SystemKind sysk,
                                    bool self_exempt) {
  CodeBuilder cb(12);
  const std::uint32_t rself = 1, ry = 2, rp = 3, rx = 4, rt = 5, rk = 6,
                      t1 = 7, t2 = 8;
  CodeBuilder::Label Lrun = cb.new_label();
  cb.unl(rself, 0);
  cb.unr(ry, 0);
  cb.unl(rp, ry);
  cb.unr(rx, ry);
  if (self_exempt) emit_jump_if_eq(cb, rp, rself, t1, t2, Lrun);
  emit_tag_sentence(cb, rt, sent, sysk, rself, rk);
  cb.pair(0, rt, rx);
  cb.ext(ext_oracle);
  cb.jz(0, Lrun);
  cb.halt(rp);
  cb.place(Lrun);
  cb.pair(0, rp, rx);
  cb.sim();
  cb.halt(0);
  return encode_program(cb.finish());
}

}  // namespace detail

/// psi: fired -> p.  Defining sentence: distinct equivalent psi-programs exist.
inline DerivedSystem psi_build(std::shared_ptr<const Oracle> oracle = nullptr) {
  DerivedSystem d;
  d.kind = SystemKind::psi;
  d.e = krt_plain(detail::guarded_interpreter_task(
      SentenceKind::exists_distinct_equiv, SystemKind::psi, false));
  d.sys = std::make_shared<System>(detail::or_silent(std::move(oracle)));
  return d;
}

/// eta: fired and p != e -> p; eta_e keeps interpreting.  Same sentence shape
/// as psi, tagged eta.
inline DerivedSystem eta_build(std::shared_ptr<const Oracle> oracle = nullptr) {
  DerivedSystem d;
  d.kind = SystemKind::eta;
  d.e = krt_plain(detail::guarded_interpreter_task(
      SentenceKind::exists_distinct_equiv, SystemKind::eta, true));
  d.sys = std::make_shared<System>(detail::or_silent(std::move(oracle)));
  return d;
}

/// theta: fired -> p.  Defining sentence: a universal theta-program exists.
inline DerivedSystem theta_build(std::shared_ptr<const Oracle> oracle = nullptr) {
  DerivedSystem d;
  d.kind = SystemKind::theta;
  d.e = krt_plain(detail::guarded_interpreter_task(
      SentenceKind::exists_universal, SystemKind::theta, false));
  d.sys = std::make_shared<System>(detail::or_silent(std::move(oracle)));
  return d;
}

// ---------------------------------------------------------------------------
// The two-candidate trap pair.
// ---------------------------------------------------------------------------

struct TrapPair {
  Nat guard_set;  // set_encode({e1, e2})
  Nat e1;         // fired -> phi_p(x) + 1, else phi_p(x)
  Nat e2;         // fired -> 0,             else phi_p(x)
  std::shared_ptr<System> sys;
};

/**
 * Two candidates built around parameter p.  Each candidate e asks the oracle
 * (at budget x) about the sentence "e computes the same function as p" — its
 * OWN equivalence, via the self code the recursion theorem hands it — and
 * then deliberately defeats a positive answer: e1 outputs phi_p(x) + 1, e2
 * outputs 0.  Unfired, both compute phi_p.
 */
inline TrapPair trap_pair(const Nat& p,
                          std::shared_ptr<const Oracle> oracle = nullptr) {
  // Guard: on <self, p, x>, code the sentence <equiv, phi-tag, <self, p>> and
  // query at budget x.
  Nat guard;
  {
    CodeBuilder cb(8);
    const std::uint32_t rself = 1, rp = 2, rx = 3, rt = 4, rk = 5;
    cb.unl(rself, 0);
    cb.unr(rt, 0);
    cb.unl(rp, rt);
    cb.unr(rx, rt);
    cb.pair(rt, rself, rp);  // payload <a = self, b = p>
    cb.constv(rk, 0);
    cb.pair(rt, rk, rt);  // <phi tag, payload>
    cb.pair(rt, rk, rt);  // <equiv kind, ...>
    cb.pair(0, rt, rx);
    cb.ext(ext_oracle);
    cb.halt(0);
    guard = encode_program(cb.finish());
  }
  const Nat t_run = encode_program(
      {ins_unr(0, 0), ins_ext(ext_sim), ins_halt(0)});
  const Nat t_inc = encode_program(
      {ins_unr(0, 0), ins_ext(ext_sim), ins_inc(0), ins_halt(0)});
  const Nat t_zero = encode_program({ins_const(0, 0), ins_halt(0)});

  TrapPair out;
  out.e1 = krt(p, if_then_else(guard, t_inc, t_run));
  out.e2 = krt(p, if_then_else(guard, t_zero, t_run));
  out.guard_set = set_encode({out.e1, out.e2});
  out.sys = std::make_shared<System>(detail::or_silent(std::move(oracle)));
  return out;
}

// ---------------------------------------------------------------------------
// Fixed-point demo.
// ---------------------------------------------------------------------------

struct FixedPointDemo {
  Nat p0;                  // p0(x) = (d(p0))(x) by construction
  std::optional<Nat> q0;   // value of phi_d(p0) if it halts in budget
  std::optional<Certificate> certificate;  // replayable witness for q0
};

inline FixedPointDemo fixed_point_demo(System& sys, const Nat& d,
                                       const Nat& budget) {
  FixedPointDemo out;
  out.p0 = fixed_point(d);
  out.certificate = make_certificate(sys, d, out.p0, budget);
  if (out.certificate) out.q0 = out.certificate->y;
  return out;
}

// ---------------------------------------------------------------------------
// zeta: the composition-witness system.
// ---------------------------------------------------------------------------

namespace detail {

struct FamilyRegs {
  std::uint32_t e1, wp, w, c, y;
};

/// Unpack <e1, w', w, c, y> (right-nested) into registers.
inline void emit_unpack_family(CodeBuilder& cb, const FamilyRegs& r,
                               std::uint32_t scratch) {
  cb.unl(r.e1, 0);
  cb.unr(scratch, 0);
  cb.unl(r.wp, scratch);
  cb.unr(scratch, scratch);
  cb.unl(r.w, scratch);
  cb.unr(scratch, scratch);
  cb.unl(r.c, scratch);
  cb.unr(r.y, scratch);
}

/**
 * zeta's interpreter task.  y = <p, x>.  Decided cheapest-first (every
 * disjunct is total, so the order is free):
 *   p == w                      -> run p on x   (the witness stays alive)
 *   oracle silent on sentence   -> run p on x
 *   some y' < p has w(y') == p  -> run p on x   (composition codes stay alive)
 *   otherwise                   -> prime(p+1)^x (odd, so outside every padded
 *                                  range the machinery produces)
 * Sentence: distinct equivalent zeta-programs exist, tagged zeta:e1.
 */
inline Nat zeta_e_task() {
  CodeBuilder cb(16);
  const std::uint32_t e1 = 1, wp = 2, w = 3, c = 4, y = 5, p = 6, x = 7,
                      t1 = 8, t2 = 9, rk = 10, acc = 11, ctr = 12, pr = 13;
  CodeBuilder::Label Lrun = cb.new_label();
  CodeBuilder::Label Ldiag = cb.new_label();
  CodeBuilder::Label Lscan = cb.new_label();
  CodeBuilder::Label Lpow = cb.new_label();
  CodeBuilder::Label Ldone = cb.new_label();

  emit_unpack_family(cb, {e1, wp, w, c, y}, t1);
  cb.unl(p, y);
  cb.unr(x, y);
  emit_jump_if_eq(cb, p, w, t1, t2, Lrun);
  emit_tag_sentence(cb, t1, SentenceKind::exists_distinct_equiv,
                    SystemKind::zeta, e1, rk);
  cb.pair(0, t1, x);
  cb.ext(ext_oracle);
  cb.jz(0, Lrun);
  cb.constv(ctr, 0);
  cb.place(Lscan);
  cb.copy(t1, p);
  cb.sub(t1, ctr);
  cb.jz(t1, Ldiag);  // scanned all y' < p
  cb.pair(0, w, ctr);
  cb.sim();
  emit_jump_if_eq(cb, 0, p, t1, t2, Lrun);
  cb.inc(ctr);
  cb.jmp(Lscan);
  cb.place(Ldiag);
  cb.copy(0, p);
  cb.inc(0);
  cb.ext(ext_prime);
  cb.copy(pr, 0);
  cb.constv(acc, 1);
  cb.copy(ctr, x);
  cb.place(Lpow);
  cb.jz(ctr, Ldone);
  cb.mul(acc, pr);
  cb.dec(ctr);
  cb.jmp(Lpow);
  cb.place(Ldone);
  cb.halt(acc);
  cb.place(Lrun);
  cb.pair(0, p, x);
  cb.sim();
  cb.halt(0);
  return encode_program(cb.finish());
}

/**
 * w' task.  y = X (conceptually <p, q>).  Establish that w' halts on every
 * x < X (remembering w'(X-1) as prev), then walk the padding orbit of c(X)
 * for the first v with: v != w; v even; v > X; v > prev when X > 0; and,
 * for <r, s> = v, no x < X has w'(x) = r or s.  The orbit walk is capped;
 * hitting the cap spins forever (the "no such v" divergence clause) — the
 * totality tests would fail long before that.
 */
inline Nat zeta_wprime_task() {
  CodeBuilder cb(18);
  const std::uint32_t e1 = 1, wp = 2, w = 3, c = 4, X = 5, prev = 6, v = 7,
                      rr = 8, rs = 9, ctr = 10, cap = 11, t1 = 12, t2 = 13,
                      one = 14, three = 15;
  CodeBuilder::Label Ltot = cb.new_label();
  CodeBuilder::Label Lcand0 = cb.new_label();
  CodeBuilder::Label Lcand = cb.new_label();
  CodeBuilder::Label Leven = cb.new_label();
  CodeBuilder::Label Lfresh = cb.new_label();
  CodeBuilder::Label Lw2 = cb.new_label();
  CodeBuilder::Label Lgood = cb.new_label();
  CodeBuilder::Label Lpad = cb.new_label();
  CodeBuilder::Label Lspin = cb.new_label();

  emit_unpack_family(cb, {e1, wp, w, c, X}, t1);
  cb.constv(prev, 0);
  cb.constv(ctr, 0);
  cb.place(Ltot);
  cb.copy(t1, X);
  cb.sub(t1, ctr);
  cb.jz(t1, Lcand0);
  cb.pair(0, wp, ctr);
  cb.sim();
  cb.copy(prev, 0);
  cb.inc(ctr);
  cb.jmp(Ltot);
  cb.place(Lcand0);
  cb.pair(0, c, X);
  cb.sim();
  cb.copy(v, 0);
  cb.constv(cap, 1000000);
  cb.constv(one, 1);
  cb.constv(three, 3);
  cb.place(Lcand);
  emit_jump_if_eq(cb, v, w, t1, t2, Lpad);
  cb.copy(t1, v);  // parity: v - ((v >> 1) << 1)
  cb.shr(t1, one);
  cb.shl(t1, one);
  cb.copy(t2, v);
  cb.sub(t2, t1);
  cb.jz(t2, Leven);
  cb.jmp(Lpad);
  cb.place(Leven);
  cb.copy(t1, v);  // v > X
  cb.sub(t1, X);
  cb.jz(t1, Lpad);
  cb.jz(X, Lfresh);
  cb.copy(t1, v);  // v > prev
  cb.sub(t1, prev);
  cb.jz(t1, Lpad);
  cb.place(Lfresh);
  cb.unl(rr, v);
  cb.unr(rs, v);
  cb.constv(ctr, 0);
  cb.place(Lw2);
  cb.copy(t1, X);
  cb.sub(t1, ctr);
  cb.jz(t1, Lgood);
  cb.pair(0, wp, ctr);
  cb.sim();
  emit_jump_if_eq(cb, 0, rr, t1, t2, Lpad);
  emit_jump_if_eq(cb, 0, rs, t1, t2, Lpad);
  cb.inc(ctr);
  cb.jmp(Lw2);
  cb.place(Lgood);
  cb.halt(v);
  cb.place(Lpad);
  cb.copy(t1, v);  // v <- pad_once(v); c outputs and their pads stay normal
  cb.shr(t1, three);
  cb.unl(t2, t1);
  cb.unr(rr, t1);
  cb.inc(rr);
  cb.pair(t1, t2, rr);
  cb.shl(t1, three);
  cb.copy(v, t1);
  cb.dec(cap);
  cb.jz(cap, Lspin);
  cb.jmp(Lcand);
  cb.place(Lspin);
  cb.jmp(Lspin);
  return encode_program(cb.finish());
}

/**
 * w task.  y = <p, q>.  Scan z < q: if w hits q somewhere, take the witness
 * z = <r, s> with minimum s (ties: minimum r — ascending z order delivers
 * same-s candidates in increasing r, so the first one per s wins) and
 * rewrite to w(<w(<p, r>), s>); if the scan completes with no hit, w'(y).
 */
inline Nat zeta_w_task() {
  CodeBuilder cb(16);
  const std::uint32_t e1 = 1, wp = 2, w = 3, c = 4, y = 5, p = 6, q = 7,
                      z = 8, found = 9, bs = 10, br = 11, t1 = 12, t2 = 13;
  CodeBuilder::Label Lscan = cb.new_label();
  CodeBuilder::Label Ldecide = cb.new_label();
  CodeBuilder::Label Lmatch = cb.new_label();
  CodeBuilder::Label Ltake = cb.new_label();
  CodeBuilder::Label Lnext = cb.new_label();
  CodeBuilder::Label Lsecond = cb.new_label();

  emit_unpack_family(cb, {e1, wp, w, c, y}, t1);
  cb.unl(p, y);
  cb.unr(q, y);
  cb.constv(found, 0);
  cb.constv(z, 0);
  cb.place(Lscan);
  cb.copy(t1, q);
  cb.sub(t1, z);
  cb.jz(t1, Ldecide);
  cb.pair(0, w, z);
  cb.sim();
  emit_jump_if_eq(cb, 0, q, t1, t2, Lmatch);
  cb.place(Lnext);
  cb.inc(z);
  cb.jmp(Lscan);
  cb.place(Lmatch);
  cb.jz(found, Ltake);
  cb.unr(t1, z);  // keep current best unless s strictly improves
  cb.copy(t2, bs);
  cb.sub(t2, t1);
  cb.jz(t2, Lnext);
  cb.place(Ltake);
  cb.unl(br, z);
  cb.unr(bs, z);
  cb.constv(found, 1);
  cb.jmp(Lnext);
  cb.place(Ldecide);
  cb.jz(found, Lsecond);
  cb.pair(t1, p, br);
  cb.pair(0, w, t1);
  cb.sim();  // w(<p, r>)
  cb.pair(t1, 0, bs);
  cb.pair(0, w, t1);
  cb.sim();  // w(<., s>)
  cb.halt(0);
  cb.place(Lsecond);
  cb.pair(0, wp, y);
  cb.sim();
  cb.halt(0);
  return encode_program(cb.finish());
}

/// Delayed task behind c: on <e1, w', w, c, <p, q>, y> compute
/// zeta_p(zeta_q(y)) through the interpreter e1.
inline Nat zeta_delayed_task() {
  CodeBuilder cb(12);
  const std::uint32_t e1 = 1, wp = 2, w = 3, c = 4, t = 5, xx = 6, yy = 7,
                      p = 8, q = 9;
  cb.unl(e1, 0);
  cb.unr(t, 0);
  cb.unl(wp, t);
  cb.unr(t, t);
  cb.unl(w, t);
  cb.unr(t, t);
  cb.unl(c, t);
  cb.unr(t, t);
  cb.unl(xx, t);
  cb.unr(yy, t);
  cb.unl(p, xx);
  cb.unr(q, xx);
  cb.pair(t, q, yy);
  cb.pair(0, e1, t);
  cb.sim();
  cb.pair(t, p, 0);
  cb.pair(0, e1, t);
  cb.sim();
  cb.halt(0);
  return encode_program(cb.finish());
}

}  // namespace detail

inline DerivedSystem zeta_build(std::shared_ptr<const Oracle> oracle = nullptr) {
  const MixedSystem ms =
      mixed_rt({detail::zeta_e_task(), detail::zeta_wprime_task(),
                detail::zeta_w_task()},
               detail::zeta_delayed_task());
  DerivedSystem d;
  d.kind = SystemKind::zeta;
  d.e = ms.e[0];
  d.wprime = ms.e[1];
  d.w = ms.e[2];
  d.c = ms.c;
  d.sys = std::make_shared<System>(detail::or_silent(std::move(oracle)));
  return d;
}

// ---------------------------------------------------------------------------
// The zeta value algebra.
// ---------------------------------------------------------------------------

namespace detail {
struct NatValueHash {
  std::size_t operator()(const Nat& n) const {
    return static_cast<std::size_t>(nat_hash(n));
  }
};
}  // namespace detail

/**
 * Materializes w and w' on [0, range) and decides composition facts.
 *
 * Inside the range everything is literal machine evaluation.  Outside it,
 * w' applied to a composed pair is represented symbolically: its numeral is
 * a perfectly well-defined number, but w'-evaluation at input X walks every
 * input below X, so computing it for a pair of full-size codes is physically
 * out of reach.  The symbolic layer leans only on facts checked literally on
 * the range (strict monotonicity hence injectivity and value-freshness; all
 * in-range w values land in the rewrite-free clause; witnesses sit below the
 * value and are unique) and is cross-validated against the machine wherever
 * both routes exist.
 */
class ZetaAlgebra {
 public:
  struct Node;
  using Val = std::shared_ptr<const Node>;
  struct Node {
    enum Kind { lit, wprime_at } kind = lit;
    Nat value;         // lit: the numeral
    Val left, right;   // wprime_at: w'(<left, right>)
  };

  explicit ZetaAlgebra(DerivedSystem zs, std::size_t range = 512,
                       Nat budget = Nat(1) << 2048)
      : zs_(std::move(zs)), range_(range), budget_(std::move(budget)) {
    if (zs_.kind != SystemKind::zeta)
      throw std::invalid_argument("ZetaAlgebra needs a zeta build");
    wprime_.reserve(range_);
    w_.reserve(range_);
    for (std::size_t z = 0; z < range_; ++z)
      wprime_.push_back(must_halt(zs_.wprime, Nat(z), "w'"));
    for (std::size_t z = 0; z < range_; ++z)
      w_.push_back(must_halt(zs_.w, Nat(z), "w"));
    // Facts the symbolic layer relies on; violations are construction bugs.
    for (std::size_t z = 0; z < range_; ++z) {
      if (w_[z] != wprime_[z])
        throw std::logic_error("in-range w value not rewrite-free");
      if (w_[z] <= Nat(range_))
        throw std::logic_error("w value not above the explored range");
      if (!w_inverse_.emplace(w_[z], Nat(z)).second)
        throw std::logic_error("w values not distinct on the explored range");
    }
    // Every w value anywhere is at least w'(0)-large: in-range ones by
    // inspection, later ones because w' grows strictly and w only ever
    // outputs w' values.  Literals below this floor are provably outside
    // the range of w, so their witness scan is decided even off-range.
    value_floor_ = range_ > 0 ? wprime_[0] : Nat(0);
  }

  const DerivedSystem& system() const { return zs_; }
  std::size_t range() const { return range_; }
  const std::vector<Nat>& wprime_values() const { return wprime_; }
  const std::vector<Nat>& w_values() const { return w_; }

  /// Witness z < range with w(z) == value, if the value is a w output.
  std::optional<Nat> witness_for(const Nat& value) const {
    const auto it = w_inverse_.find(value);
    if (it == w_inverse_.end()) return std::nullopt;
    return it->second;
  }

  static Val lit(Nat v) {
    auto n = std::make_shared<Node>();
    n->kind = Node::lit;
    n->value = std::move(v);
    return n;
  }

  static bool equal(const Val& a, const Val& b) {
    if (a->kind != b->kind) return false;
    if (a->kind == Node::lit) return a->value == b->value;
    return equal(a->left, b->left) && equal(a->right, b->right);
  }

  static std::string describe(const Val& v) {
    if (v->kind == Node::lit) return v->value.str();
    return "w'(<" + describe(v->left) + ", " + describe(v->right) + ">)";
  }

  /// comp1(a, b) = zeta_w(<a, b>), decided by w's defining equation.
  Val comp1(const Val& a, const Val& b) const {
    if (b->kind == Node::wprime_at)  // b = w(<p, q>): witness is <p, q> itself
      return comp1(comp1(a, b->left), b->right);
    if (const auto z = witness_for(b->value))
      return comp1(comp1(a, lit(pair_left(*z))), lit(pair_right(*z)));
    // Witness-free q: decidable below the floor all w values exceed.
    if (!(b->value < value_floor_))
      throw std::logic_error("comp1: literal in the undecided region");
    if (a->kind == Node::lit) {
      const Nat arg = pair_encode(a->value, b->value);
      if (arg < Nat(range_)) return lit(w_[arg.convert_to<std::size_t>()]);
    }
    auto n = std::make_shared<Node>();
    n->kind = Node::wprime_at;
    n->left = a;
    n->right = b;
    return n;
  }

  /// Literal comp1 through the machine; requires <a, b> inside the range.
  Nat comp1_machine(const Nat& a, const Nat& b) {
    const Nat arg = pair_encode(a, b);
    if (!(arg < Nat(range_)))
      throw std::invalid_argument("comp1_machine: argument beyond range");
    return must_halt(zs_.w, arg, "w");
  }

  /// Decompose per the witness structure: a value produced by composition
  /// splits into the programs it was composed from.
  std::vector<Val> chain(const Val& x) const {
    if (x->kind == Node::wprime_at) {
      auto front = chain(x->left);
      front.push_back(x->right);
      return front;
    }
    if (const auto z = witness_for(x->value)) {
      auto front = chain(lit(pair_left(*z)));
      front.push_back(lit(pair_right(*z)));
      return front;
    }
    if (!(x->value < value_floor_))
      throw std::logic_error("chain: literal in the undecided region");
    return {x};
  }

  /// Left fold of comp1; inverse of chain on composition values.
  Val unchain(const std::vector<Val>& elems) const {
    if (elems.empty()) throw std::invalid_argument("unchain: empty chain");
    Val acc = elems.front();
    for (std::size_t i = 1; i < elems.size(); ++i) acc = comp1(acc, elems[i]);
    return acc;
  }

  /// Semantic application zeta_x(arg): literal codes run through the
  /// interpreter; symbolic compositions run componentwise.
  std::optional<Nat> zeta_apply(const Val& x, const Nat& arg) {
    if (x->kind == Node::lit) {
      const RunOutcome out = zs_.apply(x->value, arg, budget_);
      if (!is_halted(out)) return std::nullopt;
      return as_halted(out).value;
    }
    const auto inner = zeta_apply(x->right, arg);
    if (!inner) return std::nullopt;
    return zeta_apply(x->left, *inner);
  }

 private:
  Nat must_halt(const Nat& program, const Nat& input, const char* what) {
    const RunOutcome out = zs_.sys->run(program, input, budget_);
    if (!is_halted(out))
      throw std::runtime_error(std::string(what) +
                               " failed to halt within the algebra budget");
    return as_halted(out).value;
  }

  DerivedSystem zs_;
  std::size_t range_;
  Nat budget_;
  Nat value_floor_;
  std::vector<Nat> wprime_, w_;
  std::unordered_map<Nat, Nat, detail::NatValueHash> w_inverse_;
};

}  // namespace krt
