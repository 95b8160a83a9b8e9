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
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "quanty/bell.hpp"
#include "quanty/linalg.hpp"
#include "quanty/qubit.hpp"
#include "quanty/qutrit.hpp"

// Eavesdropping model: Eve can intercept the register in transit on the
// outbound leg (before the receiver's strategy shift) and on the return
// leg (after it), measure in the computational basis and resend the
// collapsed state. Measuring both legs reveals the transported strategy
// bit as the difference of the two outcomes, at the price of destroying
// the entanglement the Bell test looks for.

namespace quanty {

enum class Protocol { qutrit, qubit };

inline const char* to_string(Protocol p) {
  return p == Protocol::qutrit ? "qutrit" : "qubit";
}

}  // namespace quanty

namespace quanty::adversary {

enum class AttackKind {
  none,
  ir_first_leg,    // intercept-resend on the outbound leg only
  ir_second_leg,   // intercept-resend on the return leg only
  double_ir,       // both legs; Eve learns the strategy bit
  single_qubit_ir  // qubit game only: one qubit of pair A per leg
};

inline const char* to_string(AttackKind k) {
  switch (k) {
    case AttackKind::none: return "none";
    case AttackKind::ir_first_leg: return "ir-first";
    case AttackKind::ir_second_leg: return "ir-second";
    case AttackKind::double_ir: return "double-ir";
    default: return "single-qubit";
  }
}

struct AttackPolicy {
  AttackKind kind = AttackKind::none;
  double p = 0.0;      // per-round probability that Eve acts
  double noise = 0.0;  // per-round probability of a channel dephasing event
  int leg1_qubit = 0;  // single_qubit_ir: 0 measures a0 first, 1 measures a1

  void validate() const {
    if (p < 0.0 || p > 1.0) {
      throw std::invalid_argument("attack probability must lie in [0, 1]");
    }
    if (noise < 0.0 || noise > 1.0) {
      throw std::invalid_argument("noise weight must lie in [0, 1]");
    }
    if (leg1_qubit != 0 && leg1_qubit != 1) {
      throw std::invalid_argument("leg1_qubit must be 0 or 1");
    }
    if (kind == AttackKind::none && p != 0.0) {
      throw std::invalid_argument("attack 'none' cannot have p > 0");
    }
  }
};

struct InterceptResult {
  std::vector<int> outcomes;  // one computational-basis value per target
  PureState state;            // post-measurement state, registers kept
};

// Measure-and-resend on the named registers, in order. The collapsed
// registers stay in place, which is exactly what resending the projected
// basis state means.
inline InterceptResult intercept_resend(const PureState& s,
                                        std::span<const std::string> targets,
                                        Rng& rng) {
  InterceptResult out{{}, s};
  for (const auto& reg : targets) {
    auto probs = measurement_probabilities(out.state, reg);
    double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    double acc = 0.0;
    int outcome = static_cast<int>(probs.size()) - 1;
    for (std::size_t k = 0; k < probs.size(); ++k) {
      acc += probs[k];
      if (u < acc) {
        outcome = static_cast<int>(k);
        break;
      }
    }
    out.outcomes.push_back(outcome);
    out.state = collapse_keep(out.state, reg, outcome);
  }
  return out;
}

namespace detail {

struct Branch {
  double probability = 1.0;
  PureState state;
};

inline void expand_branches(std::vector<Branch>& branches,
                            std::string_view reg) {
  std::vector<Branch> next;
  for (const auto& br : branches) {
    auto probs = measurement_probabilities(br.state, reg);
    for (std::size_t k = 0; k < probs.size(); ++k) {
      if (probs[k] > kEps) {
        next.push_back({br.probability * probs[k],
                        collapse_keep(br.state, reg, static_cast<int>(k))});
      }
    }
  }
  branches = std::move(next);
}

// Asserts the measurement of `reg` is a point mass and returns its value.
inline int deterministic_outcome(const PureState& s, std::string_view reg) {
  auto probs = measurement_probabilities(s, reg);
  for (std::size_t k = 0; k < probs.size(); ++k) {
    if (probs[k] > 1.0 - kEps) return static_cast<int>(k);
  }
  throw std::logic_error("expected a deterministic measurement outcome");
}

}  // namespace detail

// Residual mixture left by a both-legs intercept-resend attack on the
// qutrit game, computed by enumerating every one of Eve's outcome branches
// through the full round. The id selects a round whose unattacked residual
// belongs to that family; the attack never changes the published result
// bit, which is asserted along the way.
inline MixedState double_ir_residual_qutrit(int id) {
  if (id < 0 || id > 2) {
    throw std::invalid_argument("double_ir_residual: id must be 0, 1 or 2");
  }
  struct Tuple {
    bool k_a, k_b, k_s;
  };
  static constexpr Tuple kRepresentative[3] = {
      {false, false, true}, {false, false, false}, {false, true, true}};
  Tuple t = kRepresentative[id];

  RegisterLayout layout = qutrit::game_layout();
  PureState s = qutrit::initial_state();
  s = apply(expand_to(UnitaryOp{RegisterLayout({{"a", 3}}),
                                qutrit::strategy_op(t.k_a).matrix},
                      layout),
            s);
  std::vector<detail::Branch> branches{{1.0, std::move(s)}};
  detail::expand_branches(branches, "b");  // outbound leg
  UnitaryOp bob = expand_to(UnitaryOp{RegisterLayout({{"b", 3}}),
                                      qutrit::strategy_op(t.k_b).matrix},
                            layout);
  for (auto& br : branches) br.state = apply(bob, br.state);
  detail::expand_branches(branches, "b");  // return leg
  UnitaryOp open = qutrit::open_op();
  UnitaryOp sw = qutrit::switch_op();
  UnitaryOp victory = qutrit::victory_op();
  bool expected_k_r = t.k_s ? !(t.k_a ^ t.k_b) : (t.k_a ^ t.k_b);

  Matrix rho = Matrix::Zero(9, 9);
  for (auto& br : branches) {
    br.state = apply(open, br.state);
    if (!t.k_s) br.state = apply(sw, br.state);
    br.state = apply(victory, br.state);
    int o = detail::deterministic_outcome(br.state, "o");
    if ((o != 0) != expected_k_r) {
      throw std::logic_error("intercept-resend altered the public result bit");
    }
    PureState residual = collapse_remove(br.state, "o", o);
    rho += br.probability * (residual.amplitudes * residual.amplitudes.adjoint());
  }
  return MixedState{qutrit::residual_layout(), std::move(rho)};
}

// Same enumeration for the qubit game, with Eve measuring both qubits of
// pair A on both legs.
inline MixedState double_ir_residual_qubit(int id) {
  if (id < 0 || id > 2) {
    throw std::invalid_argument("double_ir_residual: id must be 0, 1 or 2");
  }
  static constexpr std::pair<bool, bool> kRepresentative[3] = {
      {false, false}, {true, false}, {false, true}};  // (k_a, k_b)
  auto [k_a, k_b] = kRepresentative[id];

  PureState s = qubit::initial_state();
  s = apply(qubit::strategy_on("bns", k_b), s);
  s = apply(qubit::strategy_on("bs", k_b), s);
  std::vector<detail::Branch> branches{{1.0, std::move(s)}};
  detail::expand_branches(branches, "a1");  // outbound leg
  detail::expand_branches(branches, "a0");
  UnitaryOp alice = qubit::strategy_on("a", k_a);
  for (auto& br : branches) br.state = apply(alice, br.state);
  detail::expand_branches(branches, "a1");  // return leg
  detail::expand_branches(branches, "a0");
  RegisterLayout layout = qubit::game_layout();
  UnitaryOp open = expand_to(qubit::open_op_b(), layout);
  UnitaryOp sw = expand_to(qubit::switch_op_b(), layout);
  UnitaryOp victory = expand_to(qubit::victory_op_b(), layout);

  Matrix rho = Matrix::Zero(64, 64);
  for (auto& br : branches) {
    br.state = apply(open, br.state);
    br.state = apply(sw, br.state);
    br.state = apply(victory, br.state);
    int hi = detail::deterministic_outcome(br.state, "o1");
    PureState after_hi = collapse_remove(br.state, "o1", hi);
    int lo = detail::deterministic_outcome(after_hi, "o0");
    if (2 * hi + lo != id) {
      throw std::logic_error("intercept-resend altered the O outcome");
    }
    PureState residual = collapse_remove(after_hi, "o0", lo);
    rho += br.probability * (residual.amplitudes * residual.amplitudes.adjoint());
  }
  return MixedState{qubit::residual_layout(), std::move(rho)};
}

inline MixedState double_ir_residual(Protocol protocol, int id) {
  return protocol == Protocol::qutrit ? double_ir_residual_qutrit(id)
                                      : double_ir_residual_qubit(id);
}

// Residual family id as mixed by an attack of strength p:
// (1-p) * entangled residual + p * fully decohered intercept mixture.
inline MixedState attacked_residual(Protocol protocol, int id, double p) {
  if (p < 0.0 || p > 1.0) {
    throw std::invalid_argument("attacked_residual: p must lie in [0, 1]");
  }
  PureState phi = protocol == Protocol::qutrit ? qutrit::residual_state(id)
                                               : qubit::residual_state_b(id);
  MixedState incoherent = double_ir_residual(protocol, id);
  return mix({Weighted(1.0 - p, phi), Weighted(p, std::move(incoherent))});
}

// Bell magnitude of the attacked residual (family 0; all three families
// give the same curve).
inline double bell_magnitude(Protocol protocol, double p) {
  MixedState rho = attacked_residual(protocol, 0, p);
  return protocol == Protocol::qutrit ? bell::i3(rho, 0).abs_value
                                      : bell::f6(rho, 0).abs_value;
}

inline double qutrit_threshold_closed_form() {
  return 11.0 / 2.0 - 3.0 * std::sqrt(3.0);
}

inline double qubit_threshold_closed_form() { return 0.625; }

// Attack strength at which the Bell magnitude drops to the LHV bound,
// located by bisection and cross-checked against the closed form.
inline double threshold_p(Protocol protocol) {
  PureState phi = protocol == Protocol::qutrit ? qutrit::residual_state(0)
                                               : qubit::residual_state_b(0);
  MixedState entangled = to_density(phi);
  MixedState incoherent = double_ir_residual(protocol, 0);
  UnitaryOp op = protocol == Protocol::qutrit ? bell::qutrit_bell(0).op
                                              : bell::qubit_bell(0).op;
  auto magnitude = [&](double p) {
    MixedState rho = mix({Weighted(1.0 - p, entangled), Weighted(p, incoherent)});
    return std::abs(expectation(op, rho));
  };
  double lo = 0.0;
  double hi = 1.0;
  if (magnitude(lo) <= bell::kLhvBound || magnitude(hi) >= bell::kLhvBound) {
    throw std::logic_error("threshold_p: curve does not bracket the bound");
  }
  while (hi - lo > 1e-10) {
    double mid = 0.5 * (lo + hi);
    (magnitude(mid) > bell::kLhvBound ? lo : hi) = mid;
  }
  double found = 0.5 * (lo + hi);
  double closed = protocol == Protocol::qutrit ? qutrit_threshold_closed_form()
                                               : qubit_threshold_closed_form();
  if (std::abs(found - closed) > 1e-8) {
    throw std::logic_error("threshold_p: bisection disagrees with closed form");
  }
  return found;
}

struct SingleQubitAttackResult {
  PureState residual;  // six-qubit state over (B_ns, B_s, A)
  int o_pair = 0;
};

// The surviving branch of the one-qubit-per-leg attack on the qubit game:
// Eve measures one qubit of pair A outbound and the other on the return,
// post-selected on the outcome pattern (0, 0) that leaves a superposition.
// The qubit measured first is a0 when Alice shifts forward, a1 when she
// shifts backward; every other combination collapses the round to a basis
// state.
inline SingleQubitAttackResult single_qubit_attack(bool k_a, bool k_b) {
  PureState s = qubit::initial_state();
  s = apply(qubit::strategy_on("bns", k_b), s);
  s = apply(qubit::strategy_on("bs", k_b), s);
  const char* first = k_a ? "a1" : "a0";
  const char* second = k_a ? "a0" : "a1";
  s = collapse_keep(s, first, 0);
  s = apply(qubit::strategy_on("a", k_a), s);
  s = collapse_keep(s, second, 0);
  RegisterLayout layout = qubit::game_layout();
  s = apply(expand_to(qubit::open_op_b(), layout), s);
  s = apply(expand_to(qubit::switch_op_b(), layout), s);
  s = apply(expand_to(qubit::victory_op_b(), layout), s);
  int hi = detail::deterministic_outcome(s, "o1");
  PureState after_hi = collapse_remove(s, "o1", hi);
  int lo = detail::deterministic_outcome(after_hi, "o0");
  return SingleQubitAttackResult{collapse_remove(after_hi, "o0", lo),
                                 2 * hi + lo};
}

// Computational-basis dephasing with weight w: off-diagonal terms are
// scaled by 1-w. At w = 1 this is exactly the diagonal intercept mixture.
inline MixedState noise_channel(const MixedState& s, double w) {
  if (w < 0.0 || w > 1.0) {
    throw std::invalid_argument("noise_channel: weight must lie in [0, 1]");
  }
  Matrix rho = (1.0 - w) * s.rho;
  for (int i = 0; i < rho.rows(); ++i) {
    rho(i, i) += w * s.rho(i, i).real();
  }
  return MixedState{s.layout, std::move(rho)};
}

inline MixedState noise_channel(const PureState& s, double w) {
  return noise_channel(to_density(s), w);
}

// Bell magnitude as a function of attack strength, sampled on an inclusive
// grid. Used by the sweep and figure outputs; the curve is affine with
// intercept equal to the unattacked maximum and zero at p = 1.
inline std::vector<std::pair<double, double>> sweep_curve(Protocol protocol,
                                                          double from,
                                                          double to,
                                                          int steps) {
  if (steps < 2) {
    throw std::invalid_argument("sweep_curve: need at least 2 steps");
  }
  if (from < 0.0 || to > 1.0 || from >= to) {
    throw std::invalid_argument("sweep_curve: need 0 <= from < to <= 1");
  }
  PureState phi = protocol == Protocol::qutrit ? qutrit::residual_state(0)
                                               : qubit::residual_state_b(0);
  MixedState entangled = to_density(phi);
  MixedState incoherent = double_ir_residual(protocol, 0);
  UnitaryOp op = protocol == Protocol::qutrit ? bell::qutrit_bell(0).op
                                              : bell::qubit_bell(0).op;
  std::vector<std::pair<double, double>> rows;
  rows.reserve(steps);
  for (int i = 0; i < steps; ++i) {
    double p = from + (to - from) * static_cast<double>(i) /
                          static_cast<double>(steps - 1);
    MixedState rho = mix({Weighted(1.0 - p, entangled), Weighted(p, incoherent)});
    rows.emplace_back(p, std::abs(expectation(op, rho)));
  }
  return rows;
}

}  // namespace quanty::adversary
