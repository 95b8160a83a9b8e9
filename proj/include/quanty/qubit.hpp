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
#include <string>

#include "quanty/linalg.hpp"

// Eight-qubit formulation of the quantum Monty Hall key-distribution game.
//
// Each door value d in {0,1,2} is carried by a qubit pair: 0 -> 00,
// 1 -> 01, 2 -> 10. The pair value 11 never appears in protocol states;
// every encoded operator leaves it untouched. The full system is
//
//   |B_ns O B_s A>   (first pair most significant)
//
//   B_ns - Bob's door, kept aside so switching never erases it,
//   O    - the door opened by the host,
//   B_s  - Bob's door after the (always applied) switch,
//   A    - Alice's prize door.
//
// There is no public switch bit here: the switch operator is applied every
// round and Bob keeps both the switched and unswitched copies. The O
// measurement alone tells Bob whether his strategy bit matched Alice's.

namespace quanty::qubit {

inline RegisterLayout game_layout() {
  return RegisterLayout({{"bns1", 2},
                         {"bns0", 2},
                         {"o1", 2},
                         {"o0", 2},
                         {"bs1", 2},
                         {"bs0", 2},
                         {"a1", 2},
                         {"a0", 2}});
}

// The six qubits left after the O pair is measured out.
inline RegisterLayout residual_layout() {
  return RegisterLayout(
      {{"bns1", 2}, {"bns0", 2}, {"bs1", 2}, {"bs0", 2}, {"a1", 2}, {"a0", 2}});
}

// Two-qubit pair (hi, lo) named <prefix>1, <prefix>0.
inline RegisterLayout pair_layout(const std::string& prefix) {
  return RegisterLayout({{prefix + "1", 2}, {prefix + "0", 2}});
}

inline constexpr int kInvalidPair = 3;

inline int encode(int digit) {
  if (digit < 0 || digit > 2) {
    throw std::invalid_argument("encode: door value must be 0, 1 or 2");
  }
  return digit;  // 0 -> 00, 1 -> 01, 2 -> 10 as a two-bit value
}

inline int decode(int pair) {
  if (pair < 0 || pair > 3) {
    throw std::invalid_argument("decode: pair value out of range");
  }
  if (pair == kInvalidPair) {
    throw std::invalid_argument("decode: 11 is not a valid door encoding");
  }
  return pair;
}

// Generic one-qubit rotation; the gate-level preparation circuit uses it at
// theta = 2*atan(1/sqrt 2), phi = 0, lambda = pi to split off a 1/3
// amplitude during state preparation.
inline UnitaryOp u3_gate(double theta, double phi, double lambda) {
  Matrix m(2, 2);
  Complex i(0.0, 1.0);
  m(0, 0) = std::cos(theta / 2.0);
  m(0, 1) = -std::exp(i * lambda) * std::sin(theta / 2.0);
  m(1, 0) = std::exp(i * phi) * std::sin(theta / 2.0);
  m(1, 1) = std::exp(i * (lambda + phi)) * std::cos(theta / 2.0);
  return single_register_op("q", std::move(m));
}

// Three-way correlated preparation: (1/sqrt 3) sum_d |d 0 d d> with every
// door pair-encoded. Amplitudes are injected directly; the result equals
// the output of the gate-level preparation circuit.
inline PureState initial_state() {
  RegisterLayout layout = game_layout();
  Vector amps = Vector::Zero(256);
  double w = 1.0 / std::sqrt(3.0);
  for (int d = 0; d < 3; ++d) {
    int e = encode(d);
    amps(layout.index_of({{e >> 1, e & 1, 0, 0, e >> 1, e & 1, e >> 1,
                           e & 1}})) = w;
  }
  return PureState{std::move(layout), std::move(amps)};
}

// Strategy shift on one encoded pair: bit 0 cycles 00 -> 01 -> 10 -> 00,
// bit 1 cycles the other way; 11 is fixed.
inline UnitaryOp strategy_op_b(bool bit) {
  Matrix m = Matrix::Zero(4, 4);
  for (int d = 0; d < 3; ++d) {
    int to = bit ? (d + 2) % 3 : (d + 1) % 3;
    m(encode(to), encode(d)) = 1.0;
  }
  m(kInvalidPair, kInvalidPair) = 1.0;
  return UnitaryOp{pair_layout("p"), std::move(m)};
}

namespace detail {

inline int third_door(int x, int y) { return 3 - x - y; }

// 64-dimensional permutation over three encoded pairs. `rule` receives the
// decoded door triple and returns the replacement triple; it is only
// consulted when all three pairs are valid encodings, every other basis
// state is left fixed.
template <typename Rule>
Matrix encoded_triple_op(const RegisterLayout& layout, Rule rule) {
  Matrix m = Matrix::Zero(64, 64);
  for (int idx = 0; idx < 64; ++idx) {
    int p0 = 2 * layout.digit(idx, 0) + layout.digit(idx, 1);
    int p1 = 2 * layout.digit(idx, 2) + layout.digit(idx, 3);
    int p2 = 2 * layout.digit(idx, 4) + layout.digit(idx, 5);
    if (p0 == kInvalidPair || p1 == kInvalidPair || p2 == kInvalidPair) {
      m(idx, idx) = 1.0;
      continue;
    }
    auto [q0, q1, q2] = rule(p0, p1, p2);
    int to = layout.index_of(
        {{q0 >> 1, q0 & 1, q1 >> 1, q1 & 1, q2 >> 1, q2 & 1}});
    m(to, idx) = 1.0;
  }
  return m;
}

}  // namespace detail

// Host door opening on (O, B_s, A), the encoded version of the qutrit rule.
inline UnitaryOp open_op_b() {
  RegisterLayout layout = RegisterLayout(
      {{"o1", 2}, {"o0", 2}, {"bs1", 2}, {"bs0", 2}, {"a1", 2}, {"a0", 2}});
  Matrix m = detail::encoded_triple_op(
      layout, [](int o, int b, int a) -> std::tuple<int, int, int> {
        int opened = (b != a) ? (detail::third_door(b, a) + o) % 3
                              : (b + o + 1) % 3;
        return {opened, b, a};
      });
  return UnitaryOp{std::move(layout), std::move(m)};
}

// Door switching on (B_ns, O, B_s). When the kept door B_ns differs from
// the opened door O, the two doors other than O are exchanged in B_s; on
// protocol states (where B_s still equals B_ns) this moves B_s to the
// remaining closed door. When B_ns equals O nothing happens.
inline UnitaryOp switch_op_b() {
  RegisterLayout layout = RegisterLayout(
      {{"bns1", 2}, {"bns0", 2}, {"o1", 2}, {"o0", 2}, {"bs1", 2}, {"bs0", 2}});
  Matrix m = detail::encoded_triple_op(
      layout, [](int n, int o, int s) -> std::tuple<int, int, int> {
        if (n == o) return {n, o, s};
        int t = detail::third_door(n, o);
        int moved = (s == n) ? t : (s == t ? n : s);
        return {n, o, moved};
      });
  return UnitaryOp{std::move(layout), std::move(m)};
}

// Victory fold on (O, B_s, A): O -> O + B_s + A (mod 3).
inline UnitaryOp victory_op_b() {
  RegisterLayout layout = RegisterLayout(
      {{"o1", 2}, {"o0", 2}, {"bs1", 2}, {"bs0", 2}, {"a1", 2}, {"a0", 2}});
  Matrix m = detail::encoded_triple_op(
      layout, [](int o, int b, int a) -> std::tuple<int, int, int> {
        return {(o + b + a) % 3, b, a};
      });
  return UnitaryOp{std::move(layout), std::move(m)};
}

// Strategy shift expanded to the full eight-qubit layout, acting on the
// pair named by `prefix`.
inline UnitaryOp strategy_on(const std::string& prefix, bool bit) {
  UnitaryOp op{pair_layout(prefix), strategy_op_b(bit).matrix};
  return expand_to(op, game_layout());
}

// Full round: Bob shifts both of his copies, Alice shifts her prize pair,
// then open, switch and victory run back-to-back.
inline PureState evolve_round_b(bool k_a, bool k_b) {
  RegisterLayout layout = game_layout();
  PureState s = initial_state();
  s = apply(strategy_on("bns", k_b), s);
  s = apply(strategy_on("bs", k_b), s);
  s = apply(strategy_on("a", k_a), s);
  s = apply(expand_to(open_op_b(), layout), s);
  s = apply(expand_to(switch_op_b(), layout), s);
  s = apply(expand_to(victory_op_b(), layout), s);
  return s;
}

struct OMeasurement {
  int o_pair = 0;       // decoded O outcome: 0, 1 or 2
  bool flip = false;    // Bob must flip his strategy bit iff O != 00
  PureState residual;   // six-qubit state over (B_ns, B_s, A)
};

// Bob's measurement of the O pair, qubit by qubit.
inline OMeasurement measure_O(const PureState& s, Rng& rng) {
  if (s.layout != game_layout()) {
    throw std::invalid_argument("measure_O: expected the eight-qubit layout");
  }
  MeasureResult hi = measure(s, "o1", rng);
  MeasureResult lo = measure(hi.residual, "o0", rng);
  int pair = 2 * hi.outcome + lo.outcome;
  if (pair == kInvalidPair) {
    throw std::runtime_error("measure_O: observed the excluded 11 outcome");
  }
  return OMeasurement{pair, pair != 0, std::move(lo.residual)};
}

// Residual pair-triple state left after the O measurement; id matches the
// decoded O outcome. Families over decoded (B_ns, B_s, A):
//   0 -> (e, e+2, e),  1 -> (e, e+1, e+1),  2 -> (e, e+2, e+2).
inline PureState residual_state_b(int id) {
  if (id < 0 || id > 2) {
    throw std::invalid_argument("residual_state_b: id must be 0, 1 or 2");
  }
  RegisterLayout layout = residual_layout();
  Vector amps = Vector::Zero(64);
  double w = 1.0 / std::sqrt(3.0);
  int s_off = (id == 1) ? 1 : 2;
  int a_off = id;
  for (int e = 0; e < 3; ++e) {
    int n = encode(e);
    int s = encode((e + s_off) % 3);
    int a = encode((e + a_off) % 3);
    amps(layout.index_of({{n >> 1, n & 1, s >> 1, s & 1, a >> 1, a & 1}})) = w;
  }
  return PureState{std::move(layout), std::move(amps)};
}

}  // namespace quanty::qubit
