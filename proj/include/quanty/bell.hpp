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
#include "quanty/qubit.hpp"
#include "quanty/qutrit.hpp"

// Bell tests for the residual states the two games leave behind.
//
// Each residual family has a dedicated Bell operator whose expectation on
// the entangled residual exceeds the local-hidden-variable bound of 2,
// while every intercept-and-resend mixture drives it to 0. The session
// layer compares the measured expectation against a threshold chi > 2.

namespace quanty::bell {

// Local-hidden-variable bound shared by both inequalities.
inline constexpr double kLhvBound = 2.0;

// CHSH-style benchmark ratio for two-qubit singlet tests.
inline const double kChshRatio = std::sqrt(2.0);

// Largest two-qutrit expectation reached by the residual states:
// 4*(3 + 2*sqrt 3)/9, about 2.873.
inline double qutrit_max_violation() {
  return 4.0 * (3.0 + 2.0 * std::sqrt(3.0)) / 9.0;
}

// Largest six-qubit expectation magnitude: 16/3.
inline double qubit_max_violation() { return 16.0 / 3.0; }

struct BellOperator {
  int id = 0;
  UnitaryOp op;
  double lhv_bound = kLhvBound;
};

// Two-qutrit Bell operator for residual family `id`, a real symmetric
// 9 x 9 matrix over (b, a) whose nonzero entries are 2/sqrt 3 and 2.
inline BellOperator qutrit_bell(int id) {
  if (id < 0 || id > 2) {
    throw std::invalid_argument("qutrit_bell: id must be 0, 1 or 2");
  }
  const double c = 2.0 / std::sqrt(3.0);
  Matrix m = Matrix::Zero(9, 9);
  auto put = [&m](int r, int col, double v) {
    m(r, col) = v;
    m(col, r) = v;
  };
  switch (id) {
    case 0:
      put(0, 4, c);
      put(0, 8, 2.0);
      put(1, 5, c);
      put(3, 7, c);
      put(4, 8, c);
      break;
    case 1:
      put(1, 5, c);
      put(1, 6, 2.0);
      put(2, 3, c);
      put(4, 8, c);
      put(5, 6, c);
      break;
    default:
      put(0, 4, c);
      put(2, 3, c);
      put(2, 7, 2.0);
      put(3, 7, c);
      put(5, 6, c);
      break;
  }
  return BellOperator{id, UnitaryOp{qutrit::residual_layout(), std::move(m)}};
}

// Six-qubit Bell operator for residual family `id`: four entries of
// magnitude 8 coupling two pairs of basis states over (B_ns, B_s, A).
inline BellOperator qubit_bell(int id) {
  if (id < 0 || id > 2) {
    throw std::invalid_argument("qubit_bell: id must be 0, 1 or 2");
  }
  Matrix m = Matrix::Zero(64, 64);
  auto put = [&m](int r, int col, double v) {
    m(r, col) = v;
    m(col, r) = v;
  };
  switch (id) {
    case 0:
      put(0b101110, 0b011001, 8.0);
      put(0b100110, 0b010001, -8.0);
      break;
    case 1:
      put(0b011010, 0b000101, 8.0);
      put(0b111010, 0b100101, -8.0);
      break;
    default:
      put(0b110101, 0b011010, 8.0);
      put(0b100101, 0b001010, -8.0);
      break;
  }
  return BellOperator{id, UnitaryOp{qubit::residual_layout(), std::move(m)}};
}

struct BellValue {
  double value = 0.0;      // signed expectation
  double abs_value = 0.0;  // magnitude compared against chi
  double ratio = 0.0;      // magnitude over the LHV bound
};

inline BellValue make_value(double v) {
  return BellValue{v, std::abs(v), std::abs(v) / kLhvBound};
}

template <typename State>
BellValue i3(const State& s, int id) {
  return make_value(expectation(qutrit_bell(id).op, s));
}

template <typename State>
BellValue f6(const State& s, int id) {
  return make_value(expectation(qubit_bell(id).op, s));
}

enum class Verdict { safe, compromised };

inline const char* to_string(Verdict v) {
  return v == Verdict::safe ? "safe" : "compromised";
}

// Channel verdict: safe iff the observed magnitude still clears chi.
// Thresholds at or below the LHV bound cannot witness anything and are
// rejected outright.
inline Verdict violation_verdict(const BellValue& value, double chi) {
  if (chi <= kLhvBound) {
    throw std::invalid_argument("violation_verdict: chi must exceed 2");
  }
  return value.abs_value >= chi ? Verdict::safe : Verdict::compromised;
}

}  // namespace quanty::bell
