// Copyright 2026 The quanty-hall authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end for the simulator.
//
// Subcommands:
//   demo     short annotated qutrit key-distribution run
//   session  configurable multi-round session, optional transcript output
//   sweep    Bell magnitude versus attack strength as CSV
//   figures  both protocol sweep curves written to CSV files
//   verify   full expected-versus-computed table of the reference checks
//
// Exit codes: 0 on success, 1 when verification fails, 2 on usage errors.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "quanty/adversary.hpp"
#include "quanty/bell.hpp"
#include "quanty/session.hpp"
#include "quanty/verification.hpp"

namespace {

using namespace quanty;

Protocol parse_protocol(const std::string& name) {
  return name == "qubit" ? Protocol::qubit : Protocol::qutrit;
}

adversary::AttackKind parse_attack(const std::string& name) {
  using adversary::AttackKind;
  if (name == "ir-first") return AttackKind::ir_first_leg;
  if (name == "ir-second") return AttackKind::ir_second_leg;
  if (name == "double-ir") return AttackKind::double_ir;
  if (name == "single-qubit") return AttackKind::single_qubit_ir;
  return AttackKind::none;
}

struct SessionArgs {
  std::string protocol = "qutrit";
  int rounds = 100;
  double chi = 2.5;
  std::string attack = "none";
  double p = 0.0;
  double noise = 0.0;
  std::uint64_t seed = 0;
  std::string bell_mode = "exact";
  int shots = 10000;
  int attack_qubit = 0;
  std::string out;
};

session::SessionConfig to_config(const SessionArgs& args) {
  session::SessionConfig cfg;
  cfg.protocol = parse_protocol(args.protocol);
  cfg.n_rounds = args.rounds;
  cfg.chi = args.chi;
  cfg.attack.kind = parse_attack(args.attack);
  cfg.attack.p = args.p;
  cfg.attack.noise = args.noise;
  cfg.attack.leg1_qubit = args.attack_qubit;
  cfg.seed = args.seed;
  cfg.bell_mode = args.bell_mode == "sampled" ? session::BellMode::sampled
                                              : session::BellMode::exact;
  cfg.shots = args.shots;
  return cfg;
}

void print_summary(const session::SessionConfig& cfg,
                   const session::SessionOutcome& out) {
  std::printf("protocol       %s\n", to_string(cfg.protocol));
  std::printf("rounds         %d, seed %llu\n", cfg.n_rounds,
              static_cast<unsigned long long>(cfg.seed));
  std::printf("attack         %s (p=%g, noise=%g)\n",
              adversary::to_string(cfg.attack.kind), cfg.attack.p,
              cfg.attack.noise);
  std::printf("key (alice)    %s\n",
              session::bits_to_hex(out.result.key_alice).c_str());
  std::printf("key (bob)      %s\n",
              session::bits_to_hex(out.result.key_bob).c_str());
  std::printf("keys agree     %s\n",
              out.result.key_alice == out.result.key_bob ? "yes" : "no");
  std::printf("mean |bell|    %.12g  (chi = %g)\n", out.result.mean_bell,
              cfg.chi);
  std::printf("verdict        %s\n", bell::to_string(out.result.verdict));
  std::printf("eve knew       %.6g of the round bits\n",
              out.result.eve_known_fraction);
}

int run_demo(std::uint64_t seed) {
  session::SessionConfig cfg;
  cfg.protocol = Protocol::qutrit;
  cfg.n_rounds = 16;
  cfg.seed = seed;
  session::SessionOutcome out = session::run_session(cfg);

  std::printf("round  ka  kb  ks  kr  residual      |bell|\n");
  for (const auto& r : out.rounds) {
    std::printf("%5d   %d   %d   %d   %d         %d  %10.6f\n", r.index,
                r.k_a ? 1 : 0, r.k_b ? 1 : 0, *r.k_s ? 1 : 0, *r.k_r ? 1 : 0,
                r.residual_id, std::abs(r.bell));
  }
  std::printf("\n");
  print_summary(cfg, out);
  return 0;
}

int run_session_cmd(const SessionArgs& args) {
  session::SessionConfig cfg = to_config(args);
  session::SessionOutcome out = session::run_session(cfg);
  print_summary(cfg, out);
  if (!args.out.empty()) {
    session::save_transcript(args.out, cfg, out);
    std::printf("transcript     %s\n", args.out.c_str());
  }
  return 0;
}

void write_sweep_csv(std::ostream& os, Protocol protocol, double from,
                     double to, int steps) {
  auto rows = adversary::sweep_curve(protocol, from, to, steps);
  os << "p,bell\n";
  char buf[96];
  for (const auto& [p, value] : rows) {
    std::snprintf(buf, sizeof buf, "%.15g,%.15g\n", p, value);
    os << buf;
  }
  double crossing = adversary::threshold_p(protocol);
  if (crossing >= from && crossing <= to) {
    std::snprintf(buf, sizeof buf, "# crossing_p = %.15g\n", crossing);
    os << buf;
  }
}

int run_sweep(const std::string& protocol, double from, double to, int steps,
              const std::string& out) {
  Protocol p = parse_protocol(protocol);
  if (out.empty()) {
    write_sweep_csv(std::cout, p, from, to, steps);
    return 0;
  }
  std::ofstream os(out);
  if (!os) {
    throw std::runtime_error("cannot open '" + out + "' for writing");
  }
  write_sweep_csv(os, p, from, to, steps);
  std::printf("wrote %s\n", out.c_str());
  return 0;
}

int run_figures(const std::string& out_dir) {
  for (Protocol p : {Protocol::qutrit, Protocol::qubit}) {
    std::string path =
        out_dir + "/bell_vs_p_" + to_string(p) + ".csv";
    std::ofstream os(path);
    if (!os) {
      throw std::runtime_error("cannot open '" + path + "' for writing");
    }
    write_sweep_csv(os, p, 0.0, 1.0, 101);
    std::printf("wrote %s\n", path.c_str());
  }
  return 0;
}

int run_verify() {
  std::vector<verification::Criterion> criteria =
      verification::run_reference_checks();
  int failed_checks = 0;
  int failed_criteria = 0;
  for (const auto& c : criteria) {
    std::printf("criterion %2d: %s\n", c.id, c.title.c_str());
    for (const auto& v : c.checks) {
      if (!v.pass) ++failed_checks;
      std::printf("  [%s] %-46s expected %-22.15g computed %-22.15g "
                  "tol %.3g\n",
                  v.pass ? " ok " : "FAIL", v.label.c_str(), v.expected,
                  v.computed, v.tolerance);
    }
    if (!c.pass) ++failed_criteria;
  }
  std::printf("\n%zu criteria checked, %d failed (%d failing values)\n",
              criteria.size(), failed_criteria, failed_checks);
  return failed_criteria == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact simulator of two entanglement-verified Monty Hall "
               "key-distribution games"};
  app.require_subcommand(1);

  CLI::App* demo = app.add_subcommand(
      "demo", "Run a short annotated qutrit session");
  std::uint64_t demo_seed = 2026;
  demo->add_option("--seed", demo_seed, "RNG seed")->capture_default_str();

  SessionArgs args;
  CLI::App* ses = app.add_subcommand(
      "session", "Run a configurable key-distribution session");
  ses->add_option("--protocol", args.protocol, "Game variant")
      ->check(CLI::IsMember({"qutrit", "qubit"}))
      ->capture_default_str();
  ses->add_option("--rounds", args.rounds, "Number of rounds")
      ->capture_default_str();
  ses->add_option("--chi", args.chi, "Bell verdict threshold")
      ->capture_default_str();
  ses->add_option("--attack", args.attack, "Eavesdropping strategy")
      ->check(CLI::IsMember(
          {"none", "ir-first", "ir-second", "double-ir", "single-qubit"}))
      ->capture_default_str();
  ses->add_option("--p", args.p, "Per-round attack probability")
      ->capture_default_str();
  ses->add_option("--noise", args.noise,
                  "Per-round channel dephasing probability")
      ->capture_default_str();
  ses->add_option("--seed", args.seed, "RNG seed")->capture_default_str();
  ses->add_option("--bell-mode", args.bell_mode,
                  "Bell estimation: exact expectation or sampled shots")
      ->check(CLI::IsMember({"exact", "sampled"}))
      ->capture_default_str();
  ses->add_option("--shots", args.shots, "Samples per round in sampled mode")
      ->capture_default_str();
  ses->add_option("--attack-qubit", args.attack_qubit,
                  "First-leg qubit for the single-qubit attack (0 or 1)")
      ->check(CLI::Range(0, 1))
      ->capture_default_str();
  ses->add_option("--out", args.out, "Write the round transcript here");

  std::string sweep_protocol = "qutrit";
  double sweep_from = 0.0, sweep_to = 1.0;
  int sweep_steps = 101;
  std::string sweep_out;
  CLI::App* sweep = app.add_subcommand(
      "sweep", "Bell magnitude versus attack strength as CSV");
  sweep->add_option("--protocol", sweep_protocol, "Game variant")
      ->check(CLI::IsMember({"qutrit", "qubit"}))
      ->capture_default_str();
  sweep->add_option("--from", sweep_from, "First attack strength")
      ->capture_default_str();
  sweep->add_option("--to", sweep_to, "Last attack strength")
      ->capture_default_str();
  sweep->add_option("--steps", sweep_steps, "Grid points")
      ->capture_default_str();
  sweep->add_option("--out", sweep_out, "CSV path (stdout when omitted)");

  std::string figures_dir = ".";
  CLI::App* figures = app.add_subcommand(
      "figures", "Write both protocol sweep curves as CSV files");
  figures->add_option("--out-dir", figures_dir, "Output directory")
      ->capture_default_str();

  CLI::App* verify = app.add_subcommand(
      "verify", "Check every closed-form quantity the simulator must hit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(demo)) return run_demo(demo_seed);
    if (app.got_subcommand(ses)) return run_session_cmd(args);
    if (app.got_subcommand(sweep)) {
      return run_sweep(sweep_protocol, sweep_from, sweep_to, sweep_steps,
                       sweep_out);
    }
    if (app.got_subcommand(figures)) return run_figures(figures_dir);
    if (app.got_subcommand(verify)) return run_verify();
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
