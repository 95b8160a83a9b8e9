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

#include <algorithm>
#include <complex>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace quanty {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;
using Rng = std::mt19937_64;

// Absolute tolerance used for all exactness checks on amplitudes,
// probabilities and expectation values.
inline constexpr double kEps = 1e-9;

//============================================================================
// Register layout
//============================================================================

// One named subsystem of dimension >= 2.
struct Register {
  std::string name;
  int dim = 0;
};

// Ordered list of named registers. Basis indices are mixed-radix numbers
// with the FIRST register as the most significant digit, so for a layout
// [x:3, y:3, z:3] the basis state |x y z> has index 9*x + 3*y + z.
class RegisterLayout {
 public:
  RegisterLayout() = default;

  explicit RegisterLayout(std::vector<Register> regs) : regs_(std::move(regs)) {
    for (const auto& r : regs_) {
      if (r.dim < 2) {
        throw std::invalid_argument("register '" + r.name +
                                    "' has dimension < 2");
      }
      if (r.name.empty()) {
        throw std::invalid_argument("register with empty name");
      }
    }
    for (std::size_t i = 0; i < regs_.size(); ++i) {
      for (std::size_t j = i + 1; j < regs_.size(); ++j) {
        if (regs_[i].name == regs_[j].name) {
          throw std::invalid_argument("duplicate register name '" +
                                      regs_[i].name + "'");
        }
      }
    }
    rebuild_strides();
  }

  int num_registers() const { return static_cast<int>(regs_.size()); }
  int total_dim() const { return total_; }
  const Register& reg(int pos) const { return regs_.at(pos); }
  const std::vector<Register>& registers() const { return regs_; }

  bool has(std::string_view name) const {
    return std::any_of(regs_.begin(), regs_.end(),
                       [&](const Register& r) { return r.name == name; });
  }

  int position(std::string_view name) const {
    for (std::size_t i = 0; i < regs_.size(); ++i) {
      if (regs_[i].name == name) return static_cast<int>(i);
    }
    throw std::invalid_argument("no register named '" + std::string(name) +
                                "'");
  }

  // Digit of `index` belonging to the register at `pos`.
  int digit(int index, int pos) const {
    return (index / stride_[pos]) % regs_[pos].dim;
  }

  std::vector<int> digits(int index) const {
    std::vector<int> out(regs_.size());
    for (std::size_t i = 0; i < regs_.size(); ++i) {
      out[i] = digit(index, static_cast<int>(i));
    }
    return out;
  }

  int index_of(std::span<const int> digits) const {
    if (digits.size() != regs_.size()) {
      throw std::invalid_argument("digit count does not match register count");
    }
    int index = 0;
    for (std::size_t i = 0; i < regs_.size(); ++i) {
      if (digits[i] < 0 || digits[i] >= regs_[i].dim) {
        throw std::invalid_argument("digit out of range for register '" +
                                    regs_[i].name + "'");
      }
      index += digits[i] * stride_[i];
    }
    return index;
  }

  // `index` with the digit of register `pos` replaced by `value`.
  int with_digit(int index, int pos, int value) const {
    return index + (value - digit(index, pos)) * stride_[pos];
  }

  // Layout with the register at `pos` removed; the remaining digits keep
  // their relative order.
  RegisterLayout without(int pos) const {
    std::vector<Register> rest;
    for (std::size_t i = 0; i < regs_.size(); ++i) {
      if (static_cast<int>(i) != pos) rest.push_back(regs_[i]);
    }
    return RegisterLayout(std::move(rest));
  }

  // Index into without(pos) obtained by deleting the digit of `pos`.
  int index_without(int index, int pos) const {
    int high = index / (stride_[pos] * regs_[pos].dim);
    int low = index % stride_[pos];
    return high * stride_[pos] + low;
  }

  static RegisterLayout concat(const RegisterLayout& a,
                               const RegisterLayout& b) {
    std::vector<Register> regs = a.regs_;
    for (const auto& r : b.regs_) {
      if (a.has(r.name)) {
        throw std::invalid_argument("register name collision on '" + r.name +
                                    "'");
      }
      regs.push_back(r);
    }
    return RegisterLayout(std::move(regs));
  }

  bool operator==(const RegisterLayout& other) const {
    if (regs_.size() != other.regs_.size()) return false;
    for (std::size_t i = 0; i < regs_.size(); ++i) {
      if (regs_[i].name != other.regs_[i].name ||
          regs_[i].dim != other.regs_[i].dim) {
        return false;
      }
    }
    return true;
  }
  bool operator!=(const RegisterLayout& other) const {
    return !(*this == other);
  }

 private:
  void rebuild_strides() {
    stride_.assign(regs_.size(), 1);
    total_ = 1;
    for (int i = static_cast<int>(regs_.size()) - 1; i >= 0; --i) {
      stride_[i] = total_;
      total_ *= regs_[i].dim;
    }
  }

  std::vector<Register> regs_;
  std::vector<int> stride_;
  int total_ = 1;
};

//============================================================================
// State and operator value types
//============================================================================

struct PureState {
  RegisterLayout layout;
  Vector amplitudes;
};

struct MixedState {
  RegisterLayout layout;
  Matrix rho;
};

struct UnitaryOp {
  RegisterLayout layout;
  Matrix matrix;
};

inline PureState make_pure(RegisterLayout layout, Vector amps) {
  if (amps.size() != layout.total_dim()) {
    throw std::invalid_argument("amplitude vector does not match layout");
  }
  return PureState{std::move(layout), std::move(amps)};
}

// Basis state |digits...> for the given layout.
inline PureState basis_state(const RegisterLayout& layout,
                             std::span<const int> digits) {
  Vector amps = Vector::Zero(layout.total_dim());
  amps(layout.index_of(digits)) = Complex(1.0, 0.0);
  return PureState{layout, std::move(amps)};
}

inline PureState basis_state(const RegisterLayout& layout,
                             std::initializer_list<int> digits) {
  return basis_state(layout, std::span<const int>(digits.begin(),
                                                  digits.size()));
}

inline UnitaryOp identity_op(const RegisterLayout& layout) {
  return UnitaryOp{layout,
                   Matrix::Identity(layout.total_dim(), layout.total_dim())};
}

inline MixedState to_density(const PureState& s) {
  return MixedState{s.layout, s.amplitudes * s.amplitudes.adjoint()};
}

//============================================================================
// Predicates
//============================================================================

inline bool is_unitary(const Matrix& m, double tol = kEps) {
  if (m.rows() != m.cols()) return false;
  Matrix delta = m.adjoint() * m - Matrix::Identity(m.rows(), m.cols());
  return delta.cwiseAbs().maxCoeff() < tol;
}

inline bool is_unitary(const UnitaryOp& op, double tol = kEps) {
  return is_unitary(op.matrix, tol);
}

inline bool is_hermitian(const Matrix& m, double tol = kEps) {
  if (m.rows() != m.cols()) return false;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() < tol;
}

// Exactly one unit entry per row and per column, all other entries zero.
inline bool is_permutation(const Matrix& m, double tol = kEps) {
  if (m.rows() != m.cols()) return false;
  for (int c = 0; c < m.cols(); ++c) {
    int ones = 0;
    for (int r = 0; r < m.rows(); ++r) {
      double a = std::abs(m(r, c));
      if (std::abs(a - 1.0) < tol) {
        ++ones;
      } else if (a > tol) {
        return false;
      }
    }
    if (ones != 1) return false;
  }
  for (int r = 0; r < m.rows(); ++r) {
    int ones = 0;
    for (int c = 0; c < m.cols(); ++c) {
      if (std::abs(std::abs(m(r, c)) - 1.0) < tol) ++ones;
    }
    if (ones != 1) return false;
  }
  return true;
}

//============================================================================
// Composition and evolution
//============================================================================

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

// Tensor product; the registers of `a` become the most significant digits
// of the combined layout.
inline PureState tensor(const PureState& a, const PureState& b) {
  RegisterLayout layout = RegisterLayout::concat(a.layout, b.layout);
  Vector amps(layout.total_dim());
  int bd = b.layout.total_dim();
  for (int i = 0; i < a.amplitudes.size(); ++i) {
    for (int j = 0; j < bd; ++j) {
      amps(i * bd + j) = a.amplitudes(i) * b.amplitudes(j);
    }
  }
  return PureState{std::move(layout), std::move(amps)};
}

inline UnitaryOp tensor(const UnitaryOp& a, const UnitaryOp& b) {
  return UnitaryOp{RegisterLayout::concat(a.layout, b.layout),
                   kron(a.matrix, b.matrix)};
}

inline void check_layout(const RegisterLayout& a, const RegisterLayout& b,
                         const char* what) {
  if (a != b) {
    throw std::invalid_argument(std::string(what) +
                                ": register layouts do not match");
  }
}

inline PureState apply(const UnitaryOp& op, const PureState& s) {
  check_layout(op.layout, s.layout, "apply");
  return PureState{s.layout, op.matrix * s.amplitudes};
}

inline MixedState apply_mixed(const UnitaryOp& op, const MixedState& s) {
  check_layout(op.layout, s.layout, "apply_mixed");
  return MixedState{s.layout, op.matrix * s.rho * op.matrix.adjoint()};
}

// Embeds `op` into `full` as I (x) op (x) I. The registers of `op` must
// appear in `full` as a contiguous run with the same names and dimensions.
inline UnitaryOp expand_to(const UnitaryOp& op, const RegisterLayout& full) {
  int first = full.position(op.layout.reg(0).name);
  int n = op.layout.num_registers();
  if (first + n > full.num_registers()) {
    throw std::invalid_argument("expand_to: operator registers not contiguous");
  }
  int left = 1;
  int right = 1;
  for (int i = 0; i < full.num_registers(); ++i) {
    if (i < first) {
      left *= full.reg(i).dim;
    } else if (i >= first + n) {
      right *= full.reg(i).dim;
    } else {
      const Register& want = op.layout.reg(i - first);
      if (full.reg(i).name != want.name || full.reg(i).dim != want.dim) {
        throw std::invalid_argument(
            "expand_to: operator registers not contiguous");
      }
    }
  }
  Matrix m = kron(Matrix::Identity(left, left),
                  kron(op.matrix, Matrix::Identity(right, right)));
  return UnitaryOp{full, std::move(m)};
}

// Single-register operator over a fresh one-register layout.
inline UnitaryOp single_register_op(std::string name, Matrix m) {
  int d = static_cast<int>(m.rows());
  return UnitaryOp{RegisterLayout({{std::move(name), d}}), std::move(m)};
}

//============================================================================
// Measurement
//============================================================================

// Outcome probabilities for a projective computational-basis measurement of
// one register.
inline std::vector<double> measurement_probabilities(const PureState& s,
                                                     std::string_view reg) {
  int pos = s.layout.position(reg);
  std::vector<double> probs(s.layout.reg(pos).dim, 0.0);
  for (int i = 0; i < s.amplitudes.size(); ++i) {
    probs[s.layout.digit(i, pos)] += std::norm(s.amplitudes(i));
  }
  return probs;
}

// Projects `s` onto `reg = outcome` and renormalizes, keeping the register
// in place (the collapsed register is left in the basis state `outcome`).
inline PureState collapse_keep(const PureState& s, std::string_view reg,
                               int outcome) {
  int pos = s.layout.position(reg);
  Vector amps = Vector::Zero(s.amplitudes.size());
  double norm2 = 0.0;
  for (int i = 0; i < s.amplitudes.size(); ++i) {
    if (s.layout.digit(i, pos) == outcome) {
      amps(i) = s.amplitudes(i);
      norm2 += std::norm(s.amplitudes(i));
    }
  }
  if (norm2 < kEps * kEps) {
    throw std::runtime_error("collapse onto zero-probability outcome");
  }
  amps /= std::sqrt(norm2);
  return PureState{s.layout, std::move(amps)};
}

// Projects `s` onto `reg = outcome`, renormalizes and removes the register
// from the layout.
inline PureState collapse_remove(const PureState& s, std::string_view reg,
                                 int outcome) {
  int pos = s.layout.position(reg);
  RegisterLayout rest = s.layout.without(pos);
  Vector amps = Vector::Zero(rest.total_dim());
  double norm2 = 0.0;
  for (int i = 0; i < s.amplitudes.size(); ++i) {
    if (s.layout.digit(i, pos) == outcome) {
      amps(s.layout.index_without(i, pos)) = s.amplitudes(i);
      norm2 += std::norm(s.amplitudes(i));
    }
  }
  if (norm2 < kEps * kEps) {
    throw std::runtime_error("collapse onto zero-probability outcome");
  }
  amps /= std::sqrt(norm2);
  return PureState{std::move(rest), std::move(amps)};
}

struct MeasureResult {
  int outcome = 0;
  PureState residual;
};

// Samples one computational-basis outcome of `reg` with the Born-rule
// probabilities, collapses, and drops the measured register. Exactly one
// uniform variate is consumed per call, so a fixed seed yields a fixed
// outcome sequence.
inline MeasureResult measure(const PureState& s, std::string_view reg,
                             Rng& rng) {
  std::vector<double> probs = measurement_probabilities(s, reg);
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
  return MeasureResult{outcome, collapse_remove(s, reg, outcome)};
}

//============================================================================
// Expectation values and mixtures
//============================================================================

inline double expectation(const UnitaryOp& h, const PureState& s) {
  check_layout(h.layout, s.layout, "expectation");
  if (!is_hermitian(h.matrix)) {
    throw std::invalid_argument("expectation: observable is not Hermitian");
  }
  Complex v = s.amplitudes.dot(h.matrix * s.amplitudes);
  return v.real();
}

inline double expectation(const UnitaryOp& h, const MixedState& s) {
  check_layout(h.layout, s.layout, "expectation");
  if (!is_hermitian(h.matrix)) {
    throw std::invalid_argument("expectation: observable is not Hermitian");
  }
  Complex v = (h.matrix * s.rho).trace();
  return v.real();
}

// One component of a convex mixture; pure states enter as projectors.
struct Weighted {
  double weight;
  MixedState state;

  Weighted(double w, MixedState m) : weight(w), state(std::move(m)) {}
  Weighted(double w, const PureState& s) : weight(w), state(to_density(s)) {}
};

inline MixedState mix(std::span<const Weighted> parts) {
  if (parts.empty()) {
    throw std::invalid_argument("mix: empty ensemble");
  }
  double total = 0.0;
  for (const auto& part : parts) {
    if (part.weight < -kEps) {
      throw std::invalid_argument("mix: negative weight");
    }
    check_layout(parts.front().state.layout, part.state.layout, "mix");
    total += part.weight;
  }
  if (std::abs(total - 1.0) > kEps) {
    throw std::invalid_argument("mix: weights do not sum to 1");
  }
  Matrix rho = Matrix::Zero(parts.front().state.rho.rows(),
                            parts.front().state.rho.cols());
  for (const auto& part : parts) {
    rho += part.weight * part.state.rho;
  }
  return MixedState{parts.front().state.layout, std::move(rho)};
}

inline MixedState mix(std::initializer_list<Weighted> parts) {
  return mix(std::span<const Weighted>(parts.begin(), parts.size()));
}

//============================================================================
// Random unitaries
//============================================================================

// Haar-distributed unitary via QR of a complex Ginibre matrix.
inline Matrix random_unitary(int dim, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix g(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      g(i, j) = Complex(gauss(rng), gauss(rng));
    }
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < dim; ++j) {
    Complex d = r(j, j);
    q.col(j) *= d / std::abs(d);
  }
  return q;
}

// Haar unitary rescaled to unit determinant.
inline Matrix random_special_unitary(int dim, Rng& rng) {
  Matrix u = random_unitary(dim, rng);
  Complex det = u.determinant();
  return u * std::pow(det, -1.0 / static_cast<double>(dim));
}

}  // namespace quanty
