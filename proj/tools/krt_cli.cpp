/**
 * krt — command-line front end for the self-reference workbench.
 *
 * Subcommands: numcode, inspect, run, krt, pad, compose, smn, construct,
 * certificate, verify.  All data output is line-delimited `name=value`
 * records with stable field names; `--format text` adds human-oriented
 * framing where it exists (inspection listings, verify summaries).
 *
 * Exit codes: 0 success, 1 semantic negative (divergence, failed check,
 * failed verification), 2 usage error (bad arguments, unparsable numerals,
 * unreadable oracle scripts, unknown suites).
 */

#include "krt/verify.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace krt;

constexpr int exit_ok = 0;
constexpr int exit_negative = 1;
constexpr int exit_usage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Decimal by default; 0x… hex and 0b… binary accepted.  Rejects signs.
Nat parse_numeral(const std::string& s) {
  try {
    if (s.rfind("0x", 0) == 0 || s.rfind("0X", 0) == 0) {
      if (s.size() == 2) throw std::runtime_error("empty hex literal");
      return Nat(s);
    }
    if (s.rfind("0b", 0) == 0 || s.rfind("0B", 0) == 0)
      return nat_from_binary(s.substr(2));
    return nat_from_dec(s);
  } catch (const std::exception& e) {
    throw UsageError("bad numeral '" + s + "': " + e.what());
  }
}

std::vector<Nat> parse_numerals(const std::vector<std::string>& ss) {
  std::vector<Nat> out;
  out.reserve(ss.size());
  for (const auto& s : ss) out.push_back(parse_numeral(s));
  return out;
}

std::shared_ptr<const Oracle> make_oracle(const std::string& spec) {
  if (spec == "silent") return std::make_shared<SilentOracle>();
  if (spec.rfind("scripted:", 0) == 0) {
    const std::string path = spec.substr(9);
    try {
      return std::make_shared<ScriptedOracle>(load_oracle_script(path));
    } catch (const std::exception& e) {
      throw UsageError(std::string("oracle script: ") + e.what());
    }
  }
  throw UsageError("oracle spec must be 'silent' or 'scripted:<path>', got '" +
                   spec + "'");
}

/// The compiled-in default budget, overridable by the KRT_BUDGET variable.
Nat default_budget() {
  if (const char* env = std::getenv("KRT_BUDGET")) {
    try {
      return nat_from_dec(env);
    } catch (const std::exception& e) {
      throw UsageError(std::string("KRT_BUDGET: ") + e.what());
    }
  }
  return Nat(1000000);
}

std::string outcome_record(const RunOutcome& out) {
  if (is_halted(out)) {
    const Halted& h = as_halted(out);
    return "outcome=halted value=" + h.value.str() + " steps=" + h.steps.str();
  }
  if (std::holds_alternative<OutOfBudget>(out)) return "outcome=out-of-budget";
  return "outcome=abnormal-divergence";
}

/// Smoke-evaluate a derived interpreter at (p, x): report the clause the
/// build will take (decided by the oracle answer the machine will see) and
/// the actual machine outcome.
void smoke_derived(std::ostream& os, const DerivedSystem& d, const Nat& p,
                   const Nat& x, const Nat& budget) {
  Sentence sen;
  switch (d.kind) {
    case SystemKind::theta:
      sen = Sentence::exists_universal(d.tag());
      break;
    default:
      sen = Sentence::exists_distinct_equiv(d.tag());
      break;
  }
  const bool fired = d.sys->oracle().query(sen, x);
  std::string clause;
  if (d.kind == SystemKind::eta && fired && p == d.e) {
    clause = "self-exempt-interpret";
  } else if (d.kind == SystemKind::zeta) {
    if (p == d.w)
      clause = "composer-exempt-interpret";
    else if (!fired)
      clause = "interpret";
    else
      clause = "witness-scan";  // then interpret or diagonal, decided in-machine
  } else {
    clause = fired ? "return-defining-input" : "interpret";
  }
  RunOutcome out = d.apply(p, x, budget);
  os << "smoke p=" << p.str() << " x=" << x.str() << " clause=" << clause
     << " " << outcome_record(out) << "\n";
}

int cmd_verify(const std::string& suite, const VerifyOptions& opt,
               bool records) {
  std::vector<SuiteReport> reports;
  try {
    reports = verify_suites(suite, opt);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  render_reports(std::cout, reports, records);
  return all_pass(reports) ? exit_ok : exit_negative;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"self-reference workbench: codings, register machines, "
               "recursion-theorem builds and their verification suites"};
  app.require_subcommand(1);

  std::string oracle_spec = "silent";
  std::string format = "text";
  std::string budget_str;
  std::uint64_t seed = 7;
  std::size_t range = 512;

  const auto add_common = [&](CLI::App* cmd, bool with_oracle) {
    cmd->add_option("--budget", budget_str,
                    "step budget (decimal; default 10^6 or KRT_BUDGET)");
    if (with_oracle)
      cmd->add_option("--oracle", oracle_spec,
                      "oracle spec: silent | scripted:<path>");
  };

  // ---- numcode -----------------------------------------------------------
  auto* numcode = app.add_subcommand("numcode", "pairing, tuple, set and prime codings");
  numcode->require_subcommand(1);
  std::vector<std::string> nc_args;
  auto* nc_pair = numcode->add_subcommand("pair", "encode <x, y>");
  nc_pair->add_option("values", nc_args)->expected(2);
  auto* nc_unpair = numcode->add_subcommand("unpair", "decode z into (left, right)");
  nc_unpair->add_option("values", nc_args)->expected(1);
  auto* nc_tuple = numcode->add_subcommand("tuple", "encode a right-nested tuple");
  nc_tuple->add_option("values", nc_args)->expected(-1)->required();
  auto* nc_untuple = numcode->add_subcommand("untuple", "decode z at arity k");
  nc_untuple->add_option("values", nc_args)->expected(2);
  auto* nc_set = numcode->add_subcommand("set", "encode a set of at most two numbers");
  nc_set->add_option("values", nc_args)->expected(-1);
  auto* nc_unset = numcode->add_subcommand("unset", "decode a set code");
  nc_unset->add_option("values", nc_args)->expected(1);
  auto* nc_prime = numcode->add_subcommand("prime", "n-th prime (prime 0 = 2)");
  nc_prime->add_option("values", nc_args)->expected(1);
  auto* nc_bitlen = numcode->add_subcommand("bitlen", "binary digit count (bitlen 0 = 1)");
  nc_bitlen->add_option("values", nc_args)->expected(1);

  // ---- inspect / run -----------------------------------------------------
  std::string arg_code, arg_input;
  auto* inspect = app.add_subcommand("inspect", "decode and list a program code");
  inspect->add_option("code", arg_code)->required();

  auto* run = app.add_subcommand("run", "run program p on input x");
  run->add_option("p", arg_code)->required();
  run->add_option("x", arg_input)->required();
  std::string engine = "accelerated";
  run->add_option("--engine", engine, "accelerated | pure");
  add_common(run, true);

  // ---- combinator front ends ---------------------------------------------
  std::string arg_a, arg_b;
  auto* krt_cmd = app.add_subcommand(
      "krt", "self-knowing code e with e(x) = r(<e, p, x>)");
  krt_cmd->add_option("p", arg_a)->required();
  krt_cmd->add_option("r", arg_b);
  bool krt_plain_flag = false;
  krt_cmd->add_flag("--plain", krt_plain_flag,
                    "one argument r; build e with e(x) = r(<e, x>)");

  auto* pad_cmd = app.add_subcommand("pad", "fresh equivalent codes");
  pad_cmd->add_option("code", arg_code)->required();
  bool pad_once_flag = false;
  std::uint64_t pad_iter_count = 0;
  pad_cmd->add_flag("--once", pad_once_flag, "next equivalent code (any parity)");
  pad_cmd->add_option("--iter", pad_iter_count, "iterate the padding k times");

  std::vector<std::string> compose_args;
  auto* compose_cmd = app.add_subcommand(
      "compose", "code running p0 on <p1(x), ..., pm(x)>");
  compose_cmd->add_option("codes", compose_args)->expected(-1)->required();

  auto* smn_cmd = app.add_subcommand("smn", "specialize p's first argument to a");
  smn_cmd->add_option("p", arg_a)->required();
  smn_cmd->add_option("a", arg_b)->required();

  // ---- construct ----------------------------------------------------------
  auto* construct = app.add_subcommand("construct", "build the derived systems");
  construct->require_subcommand(1);
  std::string param_p, param_d;
  auto* c_trap = construct->add_subcommand(
      "trap", "two candidates around p that defeat a positive oracle answer");
  c_trap->add_option("--p", param_p, "parameter program code")->required();
  add_common(c_trap, true);
  auto* c_psi = construct->add_subcommand("psi", "oracle-gated interpreter");
  add_common(c_psi, true);
  auto* c_eta = construct->add_subcommand("eta", "self-exempting gated interpreter");
  add_common(c_eta, true);
  auto* c_theta = construct->add_subcommand("theta", "universality-gated interpreter");
  add_common(c_theta, true);
  auto* c_zeta = construct->add_subcommand(
      "zeta", "gated interpreter with composition witness family");
  add_common(c_zeta, true);
  auto* c_fix = construct->add_subcommand(
      "fixedpoint", "p0 with p0 = d(p0) as programs, plus a run certificate");
  c_fix->add_option("--d", param_d, "transformer program code")->required();
  add_common(c_fix, true);

  // ---- certificate ---------------------------------------------------------
  auto* cert = app.add_subcommand("certificate", "emit or verify run certificates");
  cert->require_subcommand(1);
  auto* cert_emit = cert->add_subcommand("emit", "run p on x and certify the result");
  cert_emit->add_option("p", arg_a)->required();
  cert_emit->add_option("x", arg_b)->required();
  add_common(cert_emit, true);
  std::string cert_text;
  auto* cert_verify = cert->add_subcommand(
      "verify", "strict replay of a 'p=.. x=.. y=.. t=..' certificate");
  cert_verify->add_option("certificate", cert_text)->required();
  add_common(cert_verify, true);

  // ---- verify ---------------------------------------------------------------
  auto* verify = app.add_subcommand("verify", "run a self-check suite");
  std::string suite;
  verify->add_option("suite", suite,
                     "pairing | basesys | krt | pad | logic | zeta | all")
      ->required();
  verify->add_option("--seed", seed, "generator seed (default 7)");
  verify->add_option("--range", range, "zeta explored range (default 512)");

  for (auto* cmd : {inspect, run, krt_cmd, pad_cmd, compose_cmd, smn_cmd,
                    c_trap, c_psi, c_eta, c_theta, c_zeta, c_fix, cert_emit,
                    cert_verify, verify})
    cmd->add_option("--format", format, "text | records");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_usage;
  }

  try {
    if (format != "text" && format != "records")
      throw UsageError("--format must be text or records");
    const bool records = format == "records";
    const Nat budget =
        budget_str.empty() ? default_budget() : parse_numeral(budget_str);

    // numcode ----------------------------------------------------------------
    if (nc_pair->parsed()) {
      const auto v = parse_numerals(nc_args);
      const Nat z = pair_encode(v[0], v[1]);
      std::cout << "value=" << z.str() << " binary=" << to_binary_string(z)
                << "\n";
      return exit_ok;
    }
    if (nc_unpair->parsed()) {
      const auto [l, r] = pair_decode(parse_numeral(nc_args[0]));
      std::cout << "left=" << l.str() << " right=" << r.str() << "\n";
      return exit_ok;
    }
    if (nc_tuple->parsed()) {
      std::cout << "value=" << tuple_encode(parse_numerals(nc_args)).str()
                << "\n";
      return exit_ok;
    }
    if (nc_untuple->parsed()) {
      const Nat z = parse_numeral(nc_args[0]);
      const Nat k = parse_numeral(nc_args[1]);
      if (k == 0 || k > 64) throw UsageError("arity must be in [1, 64]");
      const auto parts = tuple_decode(z, k.convert_to<std::size_t>());
      for (std::size_t i = 0; i < parts.size(); ++i)
        std::cout << "part" << i << "=" << parts[i].str() << "\n";
      return exit_ok;
    }
    if (nc_set->parsed()) {
      const auto v = parse_numerals(nc_args);
      try {
        std::cout << "value=" << set_encode(v).str() << "\n";
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
      return exit_ok;
    }
    if (nc_unset->parsed()) {
      const auto elems = set_decode(parse_numeral(nc_args[0]));
      std::cout << "size=" << elems.size();
      for (std::size_t i = 0; i < elems.size(); ++i)
        std::cout << " elem" << i << "=" << elems[i].str();
      std::cout << "\n";
      return exit_ok;
    }
    if (nc_prime->parsed()) {
      std::cout << "value=" << nth_prime(parse_numeral(nc_args[0])).str()
                << "\n";
      return exit_ok;
    }
    if (nc_bitlen->parsed()) {
      std::cout << "value=" << bitlen(parse_numeral(nc_args[0])).str() << "\n";
      return exit_ok;
    }

    // inspect ------------------------------------------------------------------
    if (inspect->parsed()) {
      const Nat code = parse_numeral(arg_code);
      const auto dec = decode_program(code);
      if (!dec) {
        std::cout << "code=" << code.str() << " normal=0\n";
        return exit_ok;
      }
      std::cout << "code=" << code.str() << " normal=1 padding="
                << dec->padding.str() << " instructions=" << dec->prog.size()
                << "\n";
      if (records) {
        const std::string listing = format_program(dec->prog);
        std::size_t start = 0, idx = 0;
        while (start < listing.size()) {
          std::size_t end = listing.find('\n', start);
          if (end == std::string::npos) end = listing.size();
          std::string line = listing.substr(start, end - start);
          if (const auto tab = line.find('\t'); tab != std::string::npos)
            line = line.substr(tab + 1);  // the record carries the index
          std::cout << "ins=" << idx++ << " text=" << line << "\n";
          start = end + 1;
        }
      } else {
        std::cout << format_program(dec->prog);
      }
      return exit_ok;
    }

    // run -----------------------------------------------------------------------
    if (run->parsed()) {
      if (engine != "accelerated" && engine != "pure")
        throw UsageError("--engine must be accelerated or pure");
      System sys(make_oracle(oracle_spec));
      const RunOutcome out = sys.run(
          parse_numeral(arg_code), parse_numeral(arg_input), budget,
          engine == "pure" ? EngineMode::pure : EngineMode::accelerated);
      std::cout << outcome_record(out) << "\n";
      return is_halted(out) ? exit_ok : exit_negative;
    }

    // combinators -----------------------------------------------------------------
    if (krt_cmd->parsed()) {
      if (krt_plain_flag) {
        if (!arg_b.empty())
          throw UsageError("--plain takes a single code argument");
        std::cout << "e=" << krt_plain(parse_numeral(arg_a)).str() << "\n";
      } else {
        if (arg_b.empty()) throw UsageError("krt needs two codes: p r");
        std::cout << "e="
                  << krt::krt(parse_numeral(arg_a), parse_numeral(arg_b)).str()
                  << "\n";
      }
      return exit_ok;
    }
    if (pad_cmd->parsed()) {
      const Nat code = parse_numeral(arg_code);
      Nat out;
      if (pad_iter_count > 0)
        out = pad_iter(code, pad_iter_count);
      else if (pad_once_flag)
        out = pad_once(code);
      else
        out = pad(code);
      std::cout << "value=" << out.str() << "\n";
      return exit_ok;
    }
    if (compose_cmd->parsed()) {
      const auto codes = parse_numerals(compose_args);
      if (codes.size() < 2)
        throw UsageError("compose needs p0 and at least one argument program");
      std::cout << "value="
                << compose(codes[0], {codes.begin() + 1, codes.end()}).str()
                << "\n";
      return exit_ok;
    }
    if (smn_cmd->parsed()) {
      std::cout << "value=" << smn(parse_numeral(arg_a), parse_numeral(arg_b)).str()
                << "\n";
      return exit_ok;
    }

    // construct -------------------------------------------------------------------
    if (c_trap->parsed()) {
      const Nat p = parse_numeral(param_p);
      const TrapPair t = trap_pair(p, make_oracle(oracle_spec));
      std::cout << "guard_set=" << t.guard_set.str() << "\n"
                << "e1=" << t.e1.str() << "\n"
                << "e2=" << t.e2.str() << "\n";
      const Nat x(3);
      for (const Nat& e : {t.e1, t.e2}) {
        const bool fired = t.sys->oracle().query(
            Sentence::equiv(e, p, SystemTag::base()), x);
        const RunOutcome out = t.sys->run(e, x, budget);
        std::cout << "smoke candidate=" << (e == t.e1 ? "e1" : "e2")
                  << " x=" << x.str()
                  << " clause=" << (fired ? "defeat" : "interpret") << " "
                  << outcome_record(out) << "\n";
      }
      return exit_ok;
    }
    if (c_psi->parsed() || c_eta->parsed() || c_theta->parsed() ||
        c_zeta->parsed()) {
      DerivedSystem d;
      const auto oracle = make_oracle(oracle_spec);
      if (c_psi->parsed()) d = psi_build(oracle);
      if (c_eta->parsed()) d = eta_build(oracle);
      if (c_theta->parsed()) d = theta_build(oracle);
      if (c_zeta->parsed()) d = zeta_build(oracle);
      std::cout << "e=" << d.e.str() << "\n";
      if (d.kind == SystemKind::zeta) {
        std::cout << "c=" << d.c.str() << "\n"
                  << "wprime=" << d.wprime.str() << "\n"
                  << "w=" << d.w.str() << "\n";
      }
      // One feasible interpretive point and one tiny non-program input.
      const Nat succ = encode_program({ins_inc(0), ins_halt(0)});
      smoke_derived(std::cout, d, succ, Nat(3), budget);
      smoke_derived(std::cout, d, Nat(5), Nat(3), budget);
      return exit_ok;
    }
    if (c_fix->parsed()) {
      System sys(make_oracle(oracle_spec));
      const FixedPointDemo demo =
          fixed_point_demo(sys, parse_numeral(param_d), budget);
      std::cout << "p0=" << demo.p0.str() << "\n";
      if (!demo.q0) {
        std::cout << "q0=none\n";
        return exit_negative;
      }
      std::cout << "q0=" << demo.q0->str() << "\n"
                << "certificate: " << demo.certificate->serialize() << "\n";
      return exit_ok;
    }

    // certificate --------------------------------------------------------------------
    if (cert_emit->parsed()) {
      System sys(make_oracle(oracle_spec));
      const auto c =
          make_certificate(sys, parse_numeral(arg_a), parse_numeral(arg_b), budget);
      if (!c) {
        std::cout << "outcome=no-halt-in-budget\n";
        return exit_negative;
      }
      std::cout << c->serialize() << "\n";
      return exit_ok;
    }
    if (cert_verify->parsed()) {
      const auto c = Certificate::parse(cert_text);
      if (!c) throw UsageError("certificate text must be 'p=.. x=.. y=.. t=..'");
      System sys(make_oracle(oracle_spec));
      const bool ok = verify_certificate(sys, *c);
      std::cout << "verified=" << (ok ? 1 : 0) << "\n";
      return ok ? exit_ok : exit_negative;
    }

    // verify ----------------------------------------------------------------------------
    if (verify->parsed()) {
      VerifyOptions opt;
      opt.seed = seed;
      opt.range = range;
      return cmd_verify(suite, opt, records);
    }

    throw UsageError("no subcommand given");
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_usage;
  } catch (const resource_error& e) {
    std::cerr << "host limit: " << e.what() << "\n";
    return exit_negative;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_usage;
  }
}
