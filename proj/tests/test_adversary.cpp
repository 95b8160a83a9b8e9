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

#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "quanty/adversary.hpp"
#include "quanty/bell.hpp"
#include "quanty/linalg.hpp"
#include "quanty/qubit.hpp"
#include "quanty/qutrit.hpp"

using namespace quanty;

namespace {

Matrix diagonal_third(const std::array<int, 3>& indices, int dim) {
  Matrix m = Matrix::Zero(dim, dim);
  for (int i : indices) m(i, i) = 1.0 / 3.0;
  return m;
}

}  // namespace

TEST_CASE("attack policies validate their parameters", "[adversary]") {
  adversary::AttackPolicy ok;
  ok.kind = adversary::AttackKind::double_ir;
  ok.p = 0.5;
  REQUIRE_NOTHROW(ok.validate());

  adversary::AttackPolicy bad = ok;
  bad.p = 1.5;
  REQUIRE_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = ok;
  bad.p = -0.1;
  REQUIRE_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = ok;
  bad.noise = 2.0;
  REQUIRE_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = ok;
  bad.leg1_qubit = 2;
  REQUIRE_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = adversary::AttackPolicy{};
  bad.p = 0.3;
  REQUIRE_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("intercept-resend collapses the targeted registers", "[adversary]") {
  SECTION("a basis register yields its value with certainty") {
    PureState s = basis_state(qutrit::residual_layout(), {1, 2});
    Rng rng(1);
    const std::string targets[] = {"b", "a"};
    adversary::InterceptResult r = adversary::intercept_resend(s, targets, rng);
    REQUIRE(r.outcomes == std::vector<int>{1, 2});
    REQUIRE((r.state.amplitudes - s.amplitudes).cwiseAbs().maxCoeff() < kEps);
  }

  SECTION("a correlated pair collapses to matching doors") {
    PureState phi = qutrit::residual_state(0);
    const std::string targets[] = {"b"};
    for (unsigned seed = 0; seed < 8; ++seed) {
      Rng rng(seed);
      adversary::InterceptResult r =
          adversary::intercept_resend(phi, targets, rng);
      int d = r.outcomes.at(0);
      PureState expected =
          basis_state(qutrit::residual_layout(), {d, d});
      REQUIRE((r.state.amplitudes - expected.amplitudes)
                  .cwiseAbs()
                  .maxCoeff() < kEps);
    }
  }
}

TEST_CASE("double intercept leaves the decohered door mixture", "[adversary]") {
  SECTION("qutrit families") {
    const std::array<int, 3> support[3] = {
        {0, 4, 8}, {1, 5, 6}, {2, 3, 7}};
    for (int id = 0; id < 3; ++id) {
      MixedState rho = adversary::double_ir_residual(Protocol::qutrit, id);
      REQUIRE(rho.layout == qutrit::residual_layout());
      REQUIRE(std::abs(rho.rho.trace() - 1.0) < kEps);
      REQUIRE((rho.rho - diagonal_third(support[id], 9)).cwiseAbs()
                  .maxCoeff() < kEps);
    }
  }

  SECTION("qubit families") {
    const std::array<int, 3> support[3] = {
        {0b001000, 0b010001, 0b100110},
        {0b000101, 0b011010, 0b100000},
        {0b001010, 0b010000, 0b100101}};
    for (int id = 0; id < 3; ++id) {
      MixedState rho = adversary::double_ir_residual(Protocol::qubit, id);
      REQUIRE(rho.layout == qubit::residual_layout());
      REQUIRE(std::abs(rho.rho.trace() - 1.0) < kEps);
      REQUIRE((rho.rho - diagonal_third(support[id], 64)).cwiseAbs()
                  .maxCoeff() < kEps);
    }
  }

  SECTION("the mixture is exactly the dephased entangled residual") {
    for (int id = 0; id < 3; ++id) {
      MixedState dephased =
          adversary::noise_channel(qutrit::residual_state(id), 1.0);
      MixedState attacked = adversary::double_ir_residual(Protocol::qutrit, id);
      REQUIRE((dephased.rho - attacked.rho).cwiseAbs().maxCoeff() < kEps);
    }
  }

  SECTION("invalid ids are rejected") {
    REQUIRE_THROWS_AS(adversary::double_ir_residual(Protocol::qutrit, 3),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(adversary::double_ir_residual(Protocol::qubit, -1),
                      std::invalid_argument);
  }
}

TEST_CASE("attack mixtures silence the matching Bell operator", "[adversary]") {
  for (int id = 0; id < 3; ++id) {
    MixedState q3 = adversary::double_ir_residual(Protocol::qutrit, id);
    REQUIRE(std::abs(bell::i3(q3, id).value) < kEps);
    MixedState q2 = adversary::double_ir_residual(Protocol::qubit, id);
    REQUIRE(std::abs(bell::f6(q2, id).value) < kEps);
  }
}

TEST_CASE("attacked residual interpolates linearly", "[adversary]") {
  SECTION("endpoints") {
    MixedState clean = adversary::attacked_residual(Protocol::qutrit, 0, 0.0);
    REQUIRE((clean.rho - to_density(qutrit::residual_state(0)).rho)
                .cwiseAbs()
                .maxCoeff() < kEps);
    MixedState broken = adversary::attacked_residual(Protocol::qutrit, 0, 1.0);
    REQUIRE((broken.rho -
             adversary::double_ir_residual(Protocol::qutrit, 0).rho)
                .cwiseAbs()
                .maxCoeff() < kEps);
  }

  SECTION("interior point") {
    double p = 0.37;
    MixedState rho = adversary::attacked_residual(Protocol::qubit, 1, p);
    Matrix expected =
        (1.0 - p) * to_density(qubit::residual_state_b(1)).rho +
        p * adversary::double_ir_residual(Protocol::qubit, 1).rho;
    REQUIRE((rho.rho - expected).cwiseAbs().maxCoeff() < kEps);
  }

  SECTION("out-of-range p is rejected") {
    REQUIRE_THROWS_AS(adversary::attacked_residual(Protocol::qutrit, 0, 1.1),
                      std::invalid_argument);
  }
}

TEST_CASE("Bell magnitude decays affinely with attack strength",
          "[adversary]") {
  double q3_max = bell::qutrit_max_violation();
  REQUIRE(adversary::bell_magnitude(Protocol::qutrit, 0.0) ==
          Catch::Approx(q3_max).margin(1e-9));
  REQUIRE(adversary::bell_magnitude(Protocol::qutrit, 0.5) ==
          Catch::Approx(q3_max / 2.0).margin(1e-9));
  REQUIRE(adversary::bell_magnitude(Protocol::qutrit, 1.0) ==
          Catch::Approx(0.0).margin(1e-9));

  double q2_max = bell::qubit_max_violation();
  REQUIRE(adversary::bell_magnitude(Protocol::qubit, 0.25) ==
          Catch::Approx(0.75 * q2_max).margin(1e-9));
}

TEST_CASE("detection thresholds", "[adversary]") {
  REQUIRE(adversary::qutrit_threshold_closed_form() ==
          Catch::Approx(11.0 / 2.0 - 3.0 * std::sqrt(3.0)).margin(1e-15));
  REQUIRE(adversary::qubit_threshold_closed_form() == 0.625);

  REQUIRE(adversary::threshold_p(Protocol::qutrit) ==
          Catch::Approx(adversary::qutrit_threshold_closed_form())
              .margin(1e-8));
  REQUIRE(adversary::threshold_p(Protocol::qubit) ==
          Catch::Approx(adversary::qubit_threshold_closed_form())
              .margin(1e-8));

  // At the threshold the curve sits exactly on the LHV bound.
  REQUIRE(adversary::bell_magnitude(
              Protocol::qutrit, adversary::qutrit_threshold_closed_form()) ==
          Catch::Approx(bell::kLhvBound).margin(1e-9));
  REQUIRE(adversary::bell_magnitude(
              Protocol::qubit, adversary::qubit_threshold_closed_form()) ==
          Catch::Approx(bell::kLhvBound).margin(1e-9));
}

TEST_CASE("one-qubit-per-leg attack keeps a silent superposition",
          "[adversary]") {
  struct Case {
    bool k_a, k_b;
    std::array<int, 2> components;
    int o_pair;
  };
  const Case cases[] = {
      {false, false, {0b001000, 0b010001}, 0},
      {true, false, {0b011010, 0b100000}, 1},
      {false, true, {0b010000, 0b100101}, 2},
      {true, true, {0b001000, 0b100110}, 0},
  };
  double w = 1.0 / std::sqrt(2.0);
  for (const auto& c : cases) {
    adversary::SingleQubitAttackResult r =
        adversary::single_qubit_attack(c.k_a, c.k_b);
    INFO("ka=" << c.k_a << " kb=" << c.k_b);
    REQUIRE(r.o_pair == c.o_pair);
    Vector expected = Vector::Zero(64);
    expected(c.components[0]) = w;
    expected(c.components[1]) = w;
    REQUIRE((r.residual.amplitudes - expected).cwiseAbs().maxCoeff() < kEps);
    // The surviving branch is invisible to the matching Bell operator.
    REQUIRE(bell::f6(r.residual, c.o_pair).abs_value < kEps);
  }
}

TEST_CASE("dephasing channel", "[adversary]") {
  Rng rng(29);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector psi(9);
  for (int i = 0; i < 9; ++i) psi(i) = Complex(gauss(rng), gauss(rng));
  psi /= psi.norm();
  MixedState rho = to_density(make_pure(qutrit::residual_layout(), psi));

  SECTION("weight zero is the identity channel") {
    MixedState out = adversary::noise_channel(rho, 0.0);
    REQUIRE((out.rho - rho.rho).cwiseAbs().maxCoeff() < kEps);
  }

  SECTION("weight one removes every off-diagonal term") {
    MixedState out = adversary::noise_channel(rho, 1.0);
    for (int r = 0; r < 9; ++r) {
      for (int c = 0; c < 9; ++c) {
        if (r == c) {
          REQUIRE(std::abs(out.rho(r, c) - rho.rho(r, r)) < kEps);
        } else {
          REQUIRE(std::abs(out.rho(r, c)) < kEps);
        }
      }
    }
  }

  SECTION("weights compose multiplicatively on coherences") {
    MixedState twice =
        adversary::noise_channel(adversary::noise_channel(rho, 0.3), 0.4);
    MixedState once =
        adversary::noise_channel(rho, 1.0 - (1.0 - 0.3) * (1.0 - 0.4));
    REQUIRE((twice.rho - once.rho).cwiseAbs().maxCoeff() < kEps);
  }

  SECTION("invalid weights are rejected") {
    REQUIRE_THROWS_AS(adversary::noise_channel(rho, -0.1),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(adversary::noise_channel(rho, 1.1),
                      std::invalid_argument);
  }
}

TEST_CASE("sweep curves", "[adversary]") {
  SECTION("parameter validation") {
    REQUIRE_THROWS_AS(adversary::sweep_curve(Protocol::qutrit, 0.0, 1.0, 1),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(adversary::sweep_curve(Protocol::qutrit, -0.1, 1.0, 5),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(adversary::sweep_curve(Protocol::qutrit, 0.0, 1.1, 5),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(adversary::sweep_curve(Protocol::qutrit, 0.8, 0.2, 5),
                      std::invalid_argument);
  }

  SECTION("both protocols produce affine curves") {
    struct Expect {
      Protocol protocol;
      double intercept;
    };
    const Expect expects[] = {
        {Protocol::qutrit, bell::qutrit_max_violation()},
        {Protocol::qubit, bell::qubit_max_violation()},
    };
    for (const auto& e : expects) {
      auto rows = adversary::sweep_curve(e.protocol, 0.0, 1.0, 5);
      REQUIRE(rows.size() == 5);
      REQUIRE(rows.front().first == 0.0);
      REQUIRE(rows.back().first == 1.0);
      for (const auto& [p, value] : rows) {
        REQUIRE(value ==
                Catch::Approx((1.0 - p) * e.intercept).margin(1e-9));
      }
    }
  }
}
