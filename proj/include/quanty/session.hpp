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

#pragma once

#include <array>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "quanty/adversary.hpp"
#include "quanty/bell.hpp"
#include "quanty/linalg.hpp"
#include "quanty/qubit.hpp"
#include "quanty/qutrit.hpp"

// Multi-round key-distribution sessions.
//
// Every round simulates the full game at the state level, including Eve's
// interceptions when an attack policy is active, measures the victory
// register, reconciles Bob's key bit from the public record, and runs the
// Bell test on the post-measurement residual. The session verdict compares
// the mean Bell magnitude across rounds against the threshold chi.
//
// Transcript format: one round per line as `key=value` pairs with the
// stable field names round, ka, kb, ks, kr, o_pair, residual, bell,
// attacked (ks/kr only for the qutrit game, o_pair only for the qubit
// game), followed by a single `summary` line carrying a JSON document with
// the configuration, both keys, the mean Bell value, the verdict and Eve's
// known-bit fraction.

namespace quanty::session {

enum class BellMode { exact, sampled };

inline const char* to_string(BellMode m) {
  return m == BellMode::exact ? "exact" : "sampled";
}

struct SessionConfig {
  Protocol protocol = Protocol::qutrit;
  int n_rounds = 0;
  double chi = 2.5;
  adversary::AttackPolicy attack;
  std::uint64_t seed = 0;
  BellMode bell_mode = BellMode::exact;
  int shots = 10000;  // per-round samples when bell_mode is sampled

  void validate() const {
    if (n_rounds < 1) {
      throw std::invalid_argument("session needs at least one round");
    }
    if (chi <= bell::kLhvBound) {
      throw std::invalid_argument("chi must exceed the LHV bound of 2");
    }
    attack.validate();
    if (attack.kind == adversary::AttackKind::single_qubit_ir &&
        protocol != Protocol::qubit) {
      throw std::invalid_argument(
          "single-qubit attack applies to the qubit game only");
    }
    if (bell_mode == BellMode::sampled && shots < 1) {
      throw std::invalid_argument("sampled Bell mode needs shots >= 1");
    }
  }
};

// Bob's key bit from his own strategy bit and the two public bits: the
// published result tells him whether switching won, which reveals whether
// his strategy matched Alice's.
inline bool reconcile(bool k_s, bool k_r, bool k_b) {
  return (k_s == k_r) ? k_b : !k_b;
}

// The two strategy-bit pairs consistent with a public record (k_s, k_r).
// An eavesdropper holding only the public channel always faces both.
inline std::array<std::pair<int, int>, 2> public_record_ambiguity(bool k_s,
                                                                  bool k_r) {
  if (k_s == k_r) {
    return {{{0, 0}, {1, 1}}};
  }
  return {{{0, 1}, {1, 0}}};
}

struct RoundTranscript {
  int index = 0;
  bool k_a = false;
  bool k_b = false;
  std::optional<bool> k_s;  // qutrit only: Bob's published switch bit
  std::optional<bool> k_r;  // qutrit only: Alice's published result bit
  std::optional<int> o_pair;  // qubit only: Bob's O outcome
  int residual_id = 0;
  double bell = 0.0;  // signed per-round Bell estimate
  bool attacked = false;

  bool operator==(const RoundTranscript&) const = default;
};

struct SessionResult {
  std::vector<bool> key_alice;
  std::vector<bool> key_bob;
  double mean_bell = 0.0;  // mean of per-round Bell magnitudes
  bell::Verdict verdict = bell::Verdict::compromised;
  double eve_known_fraction = 0.0;  // rounds Eve read the strategy bit from

  bool operator==(const SessionResult&) const = default;
};

struct SessionOutcome {
  SessionResult result;
  std::vector<RoundTranscript> rounds;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline bool coin(Rng& rng) {
  return std::uniform_int_distribution<int>(0, 1)(rng) == 1;
}

inline bool bernoulli(double p, Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p;
}

// Per-round Bell estimator. Exact mode evaluates the expectation on the
// residual directly; sampled mode measures the residual in the operator's
// eigenbasis `shots` times and averages the observed eigenvalues.
class BellEstimator {
 public:
  BellEstimator(Protocol protocol, BellMode mode, int shots)
      : mode_(mode), shots_(shots) {
    for (int j = 0; j < 3; ++j) {
      ops_[j] = protocol == Protocol::qutrit ? bell::qutrit_bell(j).op
                                             : bell::qubit_bell(j).op;
      if (mode_ == BellMode::sampled) {
        Eigen::SelfAdjointEigenSolver<Matrix> solver(ops_[j].matrix);
        eigenvalues_[j] = solver.eigenvalues();
        eigenvectors_[j] = solver.eigenvectors();
      }
    }
  }

  double estimate(const PureState& residual, int id, Rng& rng) const {
    if (mode_ == BellMode::exact) {
      return expectation(ops_[id], residual);
    }
    Eigen::VectorXd probs =
        (eigenvectors_[id].adjoint() * residual.amplitudes).cwiseAbs2();
    std::discrete_distribution<int> draw(probs.data(),
                                         probs.data() + probs.size());
    double sum = 0.0;
    for (int s = 0; s < shots_; ++s) {
      sum += eigenvalues_[id](draw(rng));
    }
    return sum / static_cast<double>(shots_);
  }

 private:
  BellMode mode_;
  int shots_;
  std::array<UnitaryOp, 3> ops_;
  std::array<Eigen::VectorXd, 3> eigenvalues_;
  std::array<Matrix, 3> eigenvectors_;
};

struct QutritOps {
  UnitaryOp alice[2], bob[2], open, sw, victory;

  QutritOps() {
    RegisterLayout layout = qutrit::game_layout();
    for (int bit = 0; bit < 2; ++bit) {
      alice[bit] = expand_to(UnitaryOp{RegisterLayout({{"a", 3}}),
                                       qutrit::strategy_op(bit != 0).matrix},
                             layout);
      bob[bit] = expand_to(UnitaryOp{RegisterLayout({{"b", 3}}),
                                     qutrit::strategy_op(bit != 0).matrix},
                           layout);
    }
    open = qutrit::open_op();
    sw = qutrit::switch_op();
    victory = qutrit::victory_op();
  }
};

struct QubitOps {
  UnitaryOp bob_ns[2], bob_s[2], alice[2], open, sw, victory;

  QubitOps() {
    RegisterLayout layout = qubit::game_layout();
    for (int bit = 0; bit < 2; ++bit) {
      bob_ns[bit] = qubit::strategy_on("bns", bit != 0);
      bob_s[bit] = qubit::strategy_on("bs", bit != 0);
      alice[bit] = qubit::strategy_on("a", bit != 0);
    }
    open = expand_to(qubit::open_op_b(), layout);
    sw = expand_to(qubit::switch_op_b(), layout);
    victory = expand_to(qubit::victory_op_b(), layout);
  }
};

}  // namespace detail

// Runs a full session. All randomness derives from cfg.seed: key bits,
// Eve's and the channel's per-round activation, and every quantum
// measurement use dedicated streams so that attack decisions for a given
// seed do not shift when other parameters change.
inline SessionOutcome run_session(const SessionConfig& cfg) {
  using adversary::AttackKind;
  cfg.validate();

  std::uint64_t state = cfg.seed;
  Rng key_rng(detail::splitmix64(state));
  Rng attack_rng(detail::splitmix64(state));
  Rng quantum_rng(detail::splitmix64(state));

  detail::BellEstimator bell_eval(cfg.protocol, cfg.bell_mode, cfg.shots);
  const bool qutrit_game = cfg.protocol == Protocol::qutrit;
  std::optional<detail::QutritOps> q3;
  std::optional<detail::QubitOps> q2;
  if (qutrit_game) {
    q3.emplace();
  } else {
    q2.emplace();
  }

  SessionOutcome out;
  out.rounds.reserve(cfg.n_rounds);
  double bell_sum = 0.0;
  int eve_known = 0;

  for (int round = 0; round < cfg.n_rounds; ++round) {
    bool k_a = detail::coin(key_rng);
    bool k_b = detail::coin(key_rng);
    bool k_s = qutrit_game ? detail::coin(key_rng) : false;
    bool attacked = cfg.attack.kind != AttackKind::none &&
                    detail::bernoulli(cfg.attack.p, attack_rng);
    bool noise_event = detail::bernoulli(cfg.attack.noise, attack_rng);
    bool first_leg = attacked && (cfg.attack.kind == AttackKind::ir_first_leg ||
                                  cfg.attack.kind == AttackKind::double_ir);
    bool second_leg = attacked &&
                      (cfg.attack.kind == AttackKind::ir_second_leg ||
                       cfg.attack.kind == AttackKind::double_ir);

    RoundTranscript rec;
    rec.index = round;
    rec.k_a = k_a;
    rec.k_b = k_b;
    rec.attacked = attacked;

    int residual_id = 0;
    PureState residual{RegisterLayout{}, Vector{}};

    if (qutrit_game) {
      const std::string targets[] = {"b"};
      PureState s = apply(q3->alice[k_a], qutrit::initial_state());
      if (noise_event) {
        s = adversary::intercept_resend(s, targets, quantum_rng).state;
      }
      if (first_leg) {
        s = adversary::intercept_resend(s, targets, quantum_rng).state;
      }
      s = apply(q3->bob[k_b], s);
      if (attacked && cfg.attack.kind == AttackKind::double_ir) ++eve_known;
      if (second_leg) {
        s = adversary::intercept_resend(s, targets, quantum_rng).state;
      }
      s = apply(q3->open, s);
      if (!k_s) s = apply(q3->sw, s);
      s = apply(q3->victory, s);
      qutrit::VictoryMeasurement vm = qutrit::measure_victory(s, quantum_rng);
      bool expected = k_s ? !(k_a ^ k_b) : (k_a ^ k_b);
      if (vm.k_r != expected) {
        throw std::logic_error("round produced an inconsistent result bit");
      }
      residual_id = qutrit::residual_id(k_a, k_s, vm.k_r);
      residual = std::move(vm.residual);
      rec.k_s = k_s;
      rec.k_r = vm.k_r;
      out.result.key_alice.push_back(k_a);
      out.result.key_bob.push_back(reconcile(k_s, vm.k_r, k_b));
    } else {
      const std::string pair_a[] = {"a1", "a0"};
      PureState s = apply(q2->bob_ns[k_b],
                          apply(q2->bob_s[k_b], qubit::initial_state()));
      if (noise_event) {
        s = adversary::intercept_resend(s, pair_a, quantum_rng).state;
      }
      if (cfg.attack.kind == AttackKind::single_qubit_ir && attacked) {
        const std::string leg1[] = {cfg.attack.leg1_qubit ? "a1" : "a0"};
        s = adversary::intercept_resend(s, leg1, quantum_rng).state;
      } else if (first_leg) {
        s = adversary::intercept_resend(s, pair_a, quantum_rng).state;
      }
      s = apply(q2->alice[k_a], s);
      if (attacked && cfg.attack.kind == AttackKind::double_ir) ++eve_known;
      if (cfg.attack.kind == AttackKind::single_qubit_ir && attacked) {
        const std::string leg2[] = {cfg.attack.leg1_qubit ? "a0" : "a1"};
        s = adversary::intercept_resend(s, leg2, quantum_rng).state;
      } else if (second_leg) {
        s = adversary::intercept_resend(s, pair_a, quantum_rng).state;
      }
      s = apply(q2->open, s);
      s = apply(q2->sw, s);
      s = apply(q2->victory, s);
      qubit::OMeasurement om = qubit::measure_O(s, quantum_rng);
      int expected = (k_a == k_b) ? 0 : (k_a ? 1 : 2);
      if (om.o_pair != expected) {
        throw std::logic_error("round produced an inconsistent O outcome");
      }
      residual_id = om.o_pair;
      residual = std::move(om.residual);
      rec.o_pair = om.o_pair;
      out.result.key_alice.push_back(k_a);
      out.result.key_bob.push_back(om.flip ? !k_b : k_b);
    }

    rec.residual_id = residual_id;
    rec.bell = bell_eval.estimate(residual, residual_id, quantum_rng);
    bell_sum += std::abs(rec.bell);
    out.rounds.push_back(std::move(rec));
  }

  out.result.mean_bell = bell_sum / static_cast<double>(cfg.n_rounds);
  out.result.eve_known_fraction =
      static_cast<double>(eve_known) / static_cast<double>(cfg.n_rounds);
  bell::BellValue mean{out.result.mean_bell, out.result.mean_bell,
                       out.result.mean_bell / bell::kLhvBound};
  out.result.verdict = bell::violation_verdict(mean, cfg.chi);
  return out;
}

//============================================================================
// Transcript persistence
//============================================================================

inline std::string bits_to_string(const std::vector<bool>& bits) {
  std::string s;
  s.reserve(bits.size());
  for (bool b : bits) s.push_back(b ? '1' : '0');
  return s;
}

inline std::vector<bool> bits_from_string(const std::string& s) {
  std::vector<bool> bits;
  bits.reserve(s.size());
  for (char c : s) {
    if (c != '0' && c != '1') {
      throw std::runtime_error("malformed key bit string");
    }
    bits.push_back(c == '1');
  }
  return bits;
}

// Key rendered as hex, four bits per nibble, most significant first; the
// final nibble is zero-padded on the right when the length is not a
// multiple of four.
inline std::string bits_to_hex(const std::vector<bool>& bits) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  for (std::size_t i = 0; i < bits.size(); i += 4) {
    int nibble = 0;
    for (std::size_t j = 0; j < 4; ++j) {
      nibble = (nibble << 1) | (i + j < bits.size() && bits[i + j] ? 1 : 0);
    }
    out.push_back(digits[nibble]);
  }
  return out;
}

namespace detail {

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

inline void write_transcript(std::ostream& os, const SessionConfig& cfg,
                             const SessionOutcome& outcome) {
  for (const auto& r : outcome.rounds) {
    os << "round=" << r.index << " ka=" << r.k_a << " kb=" << r.k_b;
    if (r.k_s) os << " ks=" << *r.k_s;
    if (r.k_r) os << " kr=" << *r.k_r;
    if (r.o_pair) os << " o_pair=" << *r.o_pair;
    os << " residual=" << r.residual_id
       << " bell=" << detail::format_double(r.bell) << " attacked=" << r.attacked
       << "\n";
  }
  nlohmann::json summary;
  summary["protocol"] = to_string(cfg.protocol);
  summary["rounds"] = cfg.n_rounds;
  summary["chi"] = cfg.chi;
  summary["seed"] = cfg.seed;
  summary["attack"] = adversary::to_string(cfg.attack.kind);
  summary["p"] = cfg.attack.p;
  summary["noise"] = cfg.attack.noise;
  summary["leg1_qubit"] = cfg.attack.leg1_qubit;
  summary["bell_mode"] = to_string(cfg.bell_mode);
  summary["shots"] = cfg.shots;
  summary["key_alice"] = bits_to_string(outcome.result.key_alice);
  summary["key_bob"] = bits_to_string(outcome.result.key_bob);
  summary["mean_bell"] = outcome.result.mean_bell;
  summary["verdict"] = bell::to_string(outcome.result.verdict);
  summary["eve_known_fraction"] = outcome.result.eve_known_fraction;
  os << "summary " << summary.dump() << "\n";
}

struct LoadedSession {
  bool has_summary = false;
  SessionConfig config;
  SessionOutcome outcome;
};

namespace detail {

inline std::runtime_error parse_error(int line, const std::string& what) {
  return std::runtime_error("transcript parse error at line " +
                            std::to_string(line) + ": " + what);
}

inline bool parse_bit(const std::string& v, int line) {
  if (v == "0") return false;
  if (v == "1") return true;
  throw parse_error(line, "expected 0 or 1, got '" + v + "'");
}

inline Protocol parse_protocol(const std::string& v) {
  if (v == "qutrit") return Protocol::qutrit;
  if (v == "qubit") return Protocol::qubit;
  throw std::runtime_error("unknown protocol '" + v + "'");
}

inline adversary::AttackKind parse_attack(const std::string& v) {
  using adversary::AttackKind;
  if (v == "none") return AttackKind::none;
  if (v == "ir-first") return AttackKind::ir_first_leg;
  if (v == "ir-second") return AttackKind::ir_second_leg;
  if (v == "double-ir") return AttackKind::double_ir;
  if (v == "single-qubit") return AttackKind::single_qubit_ir;
  throw std::runtime_error("unknown attack kind '" + v + "'");
}

inline BellMode parse_bell_mode(const std::string& v) {
  if (v == "exact") return BellMode::exact;
  if (v == "sampled") return BellMode::sampled;
  throw std::runtime_error("unknown bell mode '" + v + "'");
}

}  // namespace detail

inline LoadedSession read_transcript(std::istream& is) {
  LoadedSession loaded;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (loaded.has_summary) {
      throw detail::parse_error(line_no, "content after the summary line");
    }
    if (line.rfind("summary ", 0) == 0) {
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(line.substr(8));
      } catch (const nlohmann::json::exception& e) {
        throw detail::parse_error(line_no, e.what());
      }
      try {
        loaded.config.protocol = detail::parse_protocol(j.at("protocol"));
        loaded.config.n_rounds = j.at("rounds");
        loaded.config.chi = j.at("chi");
        loaded.config.seed = j.at("seed");
        loaded.config.attack.kind = detail::parse_attack(j.at("attack"));
        loaded.config.attack.p = j.at("p");
        loaded.config.attack.noise = j.at("noise");
        loaded.config.attack.leg1_qubit = j.at("leg1_qubit");
        loaded.config.bell_mode = detail::parse_bell_mode(j.at("bell_mode"));
        loaded.config.shots = j.at("shots");
        loaded.outcome.result.key_alice =
            bits_from_string(j.at("key_alice"));
        loaded.outcome.result.key_bob = bits_from_string(j.at("key_bob"));
        loaded.outcome.result.mean_bell = j.at("mean_bell");
        loaded.outcome.result.verdict =
            j.at("verdict") == "safe" ? bell::Verdict::safe
                                      : bell::Verdict::compromised;
        loaded.outcome.result.eve_known_fraction =
            j.at("eve_known_fraction");
      } catch (const nlohmann::json::exception& e) {
        throw detail::parse_error(line_no, e.what());
      }
      loaded.has_summary = true;
      continue;
    }
    RoundTranscript rec;
    bool have_round = false, have_ka = false, have_kb = false;
    bool have_residual = false, have_bell = false, have_attacked = false;
    std::istringstream fields(line);
    std::string field;
    while (fields >> field) {
      auto eq = field.find('=');
      if (eq == std::string::npos) {
        throw detail::parse_error(line_no, "malformed field '" + field + "'");
      }
      std::string key = field.substr(0, eq);
      std::string value = field.substr(eq + 1);
      try {
        if (key == "round") {
          rec.index = std::stoi(value);
          have_round = true;
        } else if (key == "ka") {
          rec.k_a = detail::parse_bit(value, line_no);
          have_ka = true;
        } else if (key == "kb") {
          rec.k_b = detail::parse_bit(value, line_no);
          have_kb = true;
        } else if (key == "ks") {
          rec.k_s = detail::parse_bit(value, line_no);
        } else if (key == "kr") {
          rec.k_r = detail::parse_bit(value, line_no);
        } else if (key == "o_pair") {
          rec.o_pair = std::stoi(value);
        } else if (key == "residual") {
          rec.residual_id = std::stoi(value);
          have_residual = true;
        } else if (key == "bell") {
          rec.bell = std::stod(value);
          have_bell = true;
        } else if (key == "attacked") {
          rec.attacked = detail::parse_bit(value, line_no);
          have_attacked = true;
        } else {
          throw detail::parse_error(line_no, "unknown field '" + key + "'");
        }
      } catch (const std::invalid_argument&) {
        throw detail::parse_error(line_no,
                                  "bad value for field '" + key + "'");
      }
    }
    if (!(have_round && have_ka && have_kb && have_residual && have_bell &&
          have_attacked)) {
      throw detail::parse_error(line_no, "missing required round fields");
    }
    loaded.outcome.rounds.push_back(std::move(rec));
  }
  return loaded;
}

inline void save_transcript(const std::string& path, const SessionConfig& cfg,
                            const SessionOutcome& outcome) {
  std::ofstream os(path);
  if (!os) {
    throw std::runtime_error("cannot open '" + path + "' for writing");
  }
  write_transcript(os, cfg, outcome);
  if (!os.flush()) {
    throw std::runtime_error("write to '" + path + "' failed");
  }
}

inline LoadedSession load_transcript(const std::string& path) {
  std::ifstream is(path);
  if (!is) {
    throw std::runtime_error("cannot open '" + path + "' for reading");
  }
  return read_transcript(is);
}

}  // namespace quanty::session
