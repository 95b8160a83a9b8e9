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

#include <cmath>

#include "quanty/linalg.hpp"

// Qutrit formulation of the quantum Monty Hall key-distribution game.
//
// The game lives on three qutrits |o b a>:
//   o - the door opened by the host (the victory register Alice measures),
//   b - the door chosen by Bob,
//   a - the door behind which Alice hid the prize.
// Basis indices are 9*o + 3*b + a.
//
// One round: Alice and Bob each pick a strategy bit selecting one of two
// cyclic shifts, the host opens a door, Bob either switches or stays
// (selected by his public switch bit), and the victory operator folds the
// win/lose information into the o register. Alice measures o, publishes the
// result, and Bob reconciles his key bit from the two public bits.

namespace quanty::qutrit {

inline RegisterLayout game_layout() {
  return RegisterLayout({{"o", 3}, {"b", 3}, {"a", 3}});
}

// Layout of the two qutrits left after the victory measurement.
inline RegisterLayout residual_layout() {
  return RegisterLayout({{"b", 3}, {"a", 3}});
}

namespace detail {

// The door that is neither x nor y (requires x != y).
inline int third_door(int x, int y) { return 3 - x - y; }

}  // namespace detail

// Strategy shift on one qutrit: bit 0 cycles doors d -> d+1 (mod 3),
// bit 1 cycles d -> d-1 (mod 3).
inline UnitaryOp strategy_op(bool bit) {
  Matrix m = Matrix::Zero(3, 3);
  for (int d = 0; d < 3; ++d) {
    int to = bit ? (d + 2) % 3 : (d + 1) % 3;
    m(to, d) = 1.0;
  }
  return single_register_op("q", std::move(m));
}

// Host door-opening rule on |o b a>:
//   b != a : o -> (door outside {b,a}) + o  (mod 3)
//   b == a : o -> b + o + 1                 (mod 3)
inline UnitaryOp open_op() {
  RegisterLayout layout = game_layout();
  Matrix m = Matrix::Zero(27, 27);
  for (int o = 0; o < 3; ++o) {
    for (int b = 0; b < 3; ++b) {
      for (int a = 0; a < 3; ++a) {
        int opened = (b != a) ? (detail::third_door(b, a) + o) % 3
                              : (b + o + 1) % 3;
        int from = layout.index_of({{o, b, a}});
        int to = layout.index_of({{opened, b, a}});
        m(to, from) = 1.0;
      }
    }
  }
  return UnitaryOp{std::move(layout), std::move(m)};
}

// Door switching on |o b a>: when b differs from the opened door o, Bob's
// register moves to the remaining closed door; when b == o it is left alone.
inline UnitaryOp switch_op() {
  RegisterLayout layout = game_layout();
  Matrix m = Matrix::Zero(27, 27);
  for (int o = 0; o < 3; ++o) {
    for (int b = 0; b < 3; ++b) {
      for (int a = 0; a < 3; ++a) {
        int moved = (b != o) ? detail::third_door(o, b) : b;
        int from = layout.index_of({{o, b, a}});
        int to = layout.index_of({{o, moved, a}});
        m(to, from) = 1.0;
      }
    }
  }
  return UnitaryOp{std::move(layout), std::move(m)};
}

// Victory fold on |o b a>: o -> o + b + a (mod 3). After this, o = 0 marks
// exactly one of the two branch families produced by a round.
inline UnitaryOp victory_op() {
  RegisterLayout layout = game_layout();
  Matrix m = Matrix::Zero(27, 27);
  for (int o = 0; o < 3; ++o) {
    for (int b = 0; b < 3; ++b) {
      for (int a = 0; a < 3; ++a) {
        int from = layout.index_of({{o, b, a}});
        int to = layout.index_of({{(o + b + a) % 3, b, a}});
        m(to, from) = 1.0;
      }
    }
  }
  return UnitaryOp{std::move(layout), std::move(m)};
}

// cos(g) * switch + sin(g) * identity. The protocol only ever uses g = 0
// (switch) and g = pi/2 (stay); at other angles the blend is not unitary
// because the switch operator is a symmetric involution. Exposed for
// exploratory use only.
inline Matrix switch_blend(double gamma) {
  return std::cos(gamma) * switch_op().matrix +
         std::sin(gamma) * Matrix::Identity(27, 27);
}

// |0> on the host register, maximally correlated pair on (b, a).
inline PureState initial_state() {
  RegisterLayout layout = game_layout();
  Vector amps = Vector::Zero(27);
  double w = 1.0 / std::sqrt(3.0);
  for (int d = 0; d < 3; ++d) {
    amps(layout.index_of({{0, d, d}})) = w;
  }
  return PureState{std::move(layout), std::move(amps)};
}

// Full round evolution. k_s = 0 means Bob switches, k_s = 1 means he stays.
// Bob's shift acts on the b register, Alice's on the a register.
inline PureState evolve_round(bool k_a, bool k_b, bool k_s) {
  RegisterLayout layout = game_layout();
  PureState s = initial_state();
  s = apply(expand_to(UnitaryOp{RegisterLayout({{"b", 3}}),
                                strategy_op(k_b).matrix},
                      layout),
            s);
  s = apply(expand_to(UnitaryOp{RegisterLayout({{"a", 3}}),
                                strategy_op(k_a).matrix},
                      layout),
            s);
  s = apply(open_op(), s);
  if (!k_s) s = apply(switch_op(), s);
  s = apply(victory_op(), s);
  return s;
}

struct VictoryMeasurement {
  bool k_r = false;       // published result bit: 0 iff the o outcome was 0
  int o_outcome = 0;      // raw door value of the o register
  PureState residual;     // two-qutrit state over (b, a)
};

// Alice's measurement of the victory register.
inline VictoryMeasurement measure_victory(const PureState& s, Rng& rng) {
  if (s.layout != game_layout()) {
    throw std::invalid_argument("measure_victory: expected the |o b a> layout");
  }
  MeasureResult m = measure(s, "o", rng);
  return VictoryMeasurement{m.outcome != 0, m.outcome, std::move(m.residual)};
}

// Which of the three residual pair states a round leaves behind, as a
// function of the values Alice knows: her strategy bit and the two public
// bits. Ids: 0 -> equal doors, 1 -> Alice one ahead, 2 -> Alice two ahead.
inline int residual_id(bool k_a, bool k_s, bool k_r) {
  if (k_r) return 0;
  if (!k_a && k_s) return 2;
  return 1;
}

// Residual pair state j: (1/sqrt 3) * sum_d |d, d+j mod 3>.
inline PureState residual_state(int id) {
  if (id < 0 || id > 2) {
    throw std::invalid_argument("residual_state: id must be 0, 1 or 2");
  }
  RegisterLayout layout = residual_layout();
  Vector amps = Vector::Zero(9);
  double w = 1.0 / std::sqrt(3.0);
  for (int d = 0; d < 3; ++d) {
    amps(layout.index_of({{d, (d + id) % 3}})) = w;
  }
  return PureState{std::move(layout), std::move(amps)};
}

// Probability that Bob's door matches the prize door.
inline double win_probability(const PureState& s) {
  if (s.layout != game_layout()) {
    throw std::invalid_argument("win_probability: expected the |o b a> layout");
  }
  double p = 0.0;
  for (int i = 0; i < s.amplitudes.size(); ++i) {
    if (s.layout.digit(i, 1) == s.layout.digit(i, 2)) {
      p += std::norm(s.amplitudes(i));
    }
  }
  return p;
}

// Classical (non-entangling) door choice used to recover the textbook
// Monty Hall probabilities: both players apply this real rotation to |0>,
// producing independent uniform door choices.
inline UnitaryOp classical_strategy() {
  Matrix m(3, 3);
  double s3 = 1.0 / std::sqrt(3.0);
  double s2 = 1.0 / std::sqrt(2.0);
  double s6 = 1.0 / std::sqrt(6.0);
  m << s3, 0.0, std::sqrt(2.0 / 3.0),
       s3, -s2, -s6,
       s3, s2, -s6;
  return single_register_op("q", std::move(m));
}

// Win probability of the classical game: the joint |000> input is rotated
// on (b, a), the host opens a door, and Bob switches (g = 0) or stays
// (g = pi/2). Returns 2/3 for switching, 1/3 for staying.
inline double classical_win_probability(double gamma) {
  RegisterLayout layout = game_layout();
  PureState s = basis_state(layout, {0, 0, 0});
  Matrix choice = classical_strategy().matrix;
  s = apply(expand_to(UnitaryOp{RegisterLayout({{"b", 3}}), choice}, layout),
            s);
  s = apply(expand_to(UnitaryOp{RegisterLayout({{"a", 3}}), choice}, layout),
            s);
  s = apply(open_op(), s);
  PureState switched{layout, switch_blend(gamma) * s.amplitudes};
  return win_probability(switched);
}

}  // namespace quanty::qutrit
