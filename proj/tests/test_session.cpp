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

#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "quanty/bell.hpp"
#include "quanty/session.hpp"

using namespace quanty;

namespace {

session::SessionConfig clean_qutrit(int rounds, std::uint64_t seed) {
  session::SessionConfig cfg;
  cfg.protocol = Protocol::qutrit;
  cfg.n_rounds = rounds;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST_CASE("key reconciliation from the public record", "[session]") {
  SECTION("truth table") {
    for (int b = 0; b < 2; ++b) {
      REQUIRE(session::reconcile(false, false, b) == static_cast<bool>(b));
      REQUIRE(session::reconcile(true, true, b) == static_cast<bool>(b));
      REQUIRE(session::reconcile(false, true, b) == !static_cast<bool>(b));
      REQUIRE(session::reconcile(true, false, b) == !static_cast<bool>(b));
    }
  }

  SECTION("always recovers Alice's bit") {
    for (int mask = 0; mask < 8; ++mask) {
      bool k_a = mask & 1, k_b = mask & 2, k_s = mask & 4;
      bool k_r = k_s ? !(k_a ^ k_b) : (k_a ^ k_b);
      REQUIRE(session::reconcile(k_s, k_r, k_b) == k_a);
    }
  }
}

TEST_CASE("the public record is ambiguous to an eavesdropper", "[session]") {
  for (int s = 0; s < 2; ++s) {
    for (int r = 0; r < 2; ++r) {
      auto pairs = session::public_record_ambiguity(s, r);
      REQUIRE(pairs.size() == 2);
      for (const auto& [k_a, k_b] : pairs) {
        bool expected_r = s ? !(k_a ^ k_b) : (k_a ^ k_b);
        REQUIRE(expected_r == static_cast<bool>(r));
      }
      // The two candidates disagree on Alice's bit, so the record alone
      // reveals nothing.
      REQUIRE(pairs[0].first != pairs[1].first);
    }
  }
}

TEST_CASE("session configuration validation", "[session]") {
  session::SessionConfig cfg = clean_qutrit(10, 1);
  REQUIRE_NOTHROW(cfg.validate());

  SECTION("rounds") {
    cfg.n_rounds = 0;
    REQUIRE_THROWS_AS(cfg.validate(), std::invalid_argument);
  }
  SECTION("chi must exceed the LHV bound") {
    cfg.chi = 2.0;
    REQUIRE_THROWS_AS(cfg.validate(), std::invalid_argument);
  }
  SECTION("attack policy propagates") {
    cfg.attack.kind = adversary::AttackKind::double_ir;
    cfg.attack.p = 1.5;
    REQUIRE_THROWS_AS(cfg.validate(), std::invalid_argument);
  }
  SECTION("single-qubit attack needs the qubit game") {
    cfg.attack.kind = adversary::AttackKind::single_qubit_ir;
    cfg.attack.p = 1.0;
    REQUIRE_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.protocol = Protocol::qubit;
    REQUIRE_NOTHROW(cfg.validate());
  }
  SECTION("sampled mode needs shots") {
    cfg.bell_mode = session::BellMode::sampled;
    cfg.shots = 0;
    REQUIRE_THROWS_AS(cfg.validate(), std::invalid_argument);
  }
}

TEST_CASE("clean qutrit sessions distribute identical keys", "[session]") {
  session::SessionConfig cfg = clean_qutrit(50, 7);
  session::SessionOutcome out = session::run_session(cfg);

  REQUIRE(out.result.key_alice.size() == 50);
  REQUIRE(out.result.key_alice == out.result.key_bob);
  REQUIRE(out.result.eve_known_fraction == 0.0);
  REQUIRE(out.result.verdict == bell::Verdict::safe);
  REQUIRE(out.result.mean_bell ==
          Catch::Approx(bell::qutrit_max_violation()).margin(1e-9));

  REQUIRE(out.rounds.size() == 50);
  for (const auto& r : out.rounds) {
    REQUIRE(r.k_s.has_value());
    REQUIRE(r.k_r.has_value());
    REQUIRE_FALSE(r.o_pair.has_value());
    REQUIRE_FALSE(r.attacked);
    REQUIRE(r.residual_id ==
            qutrit::residual_id(r.k_a, *r.k_s, *r.k_r));
    REQUIRE(std::abs(r.bell) ==
            Catch::Approx(bell::qutrit_max_violation()).margin(1e-9));
  }
}

TEST_CASE("clean qubit sessions distribute identical keys", "[session]") {
  session::SessionConfig cfg = clean_qutrit(30, 11);
  cfg.protocol = Protocol::qubit;
  session::SessionOutcome out = session::run_session(cfg);

  REQUIRE(out.result.key_alice == out.result.key_bob);
  REQUIRE(out.result.verdict == bell::Verdict::safe);
  REQUIRE(out.result.mean_bell ==
          Catch::Approx(bell::qubit_max_violation()).margin(1e-9));
  for (const auto& r : out.rounds) {
    REQUIRE(r.o_pair.has_value());
    REQUIRE_FALSE(r.k_s.has_value());
    REQUIRE_FALSE(r.k_r.has_value());
    REQUIRE(*r.o_pair == ((r.k_a == r.k_b) ? 0 : (r.k_a ? 1 : 2)));
    REQUIRE(r.residual_id == *r.o_pair);
  }
}

TEST_CASE("sessions are reproducible from their seed", "[session]") {
  session::SessionConfig cfg = clean_qutrit(25, 12345);
  cfg.attack.kind = adversary::AttackKind::double_ir;
  cfg.attack.p = 0.5;
  session::SessionOutcome a = session::run_session(cfg);
  session::SessionOutcome b = session::run_session(cfg);
  REQUIRE(a.result == b.result);
  REQUIRE(a.rounds.size() == b.rounds.size());
  for (std::size_t i = 0; i < a.rounds.size(); ++i) {
    REQUIRE(a.rounds[i] == b.rounds[i]);
  }
}

TEST_CASE("the full double intercept is detected but never corrupts keys",
          "[session]") {
  session::SessionConfig cfg = clean_qutrit(40, 3);
  cfg.attack.kind = adversary::AttackKind::double_ir;
  cfg.attack.p = 1.0;
  session::SessionOutcome out = session::run_session(cfg);

  REQUIRE(out.result.key_alice == out.result.key_bob);
  REQUIRE(out.result.eve_known_fraction == 1.0);
  REQUIRE(out.result.verdict == bell::Verdict::compromised);
  // Every intercepted round collapses to a basis state, whose Bell
  // expectation vanishes exactly.
  REQUIRE(out.result.mean_bell == Catch::Approx(0.0).margin(1e-9));

  cfg.protocol = Protocol::qubit;
  out = session::run_session(cfg);
  REQUIRE(out.result.key_alice == out.result.key_bob);
  REQUIRE(out.result.verdict == bell::Verdict::compromised);
}

TEST_CASE("partial attacks scale the mean violation", "[session]") {
  double max = bell::qutrit_max_violation();
  double previous_bell = max + 1.0;
  double previous_eve = -1.0;
  for (double p : {0.0, 0.3, 0.6, 1.0}) {
    session::SessionConfig cfg = clean_qutrit(60, 2024);
    cfg.attack.kind = adversary::AttackKind::double_ir;
    cfg.attack.p = p;
    session::SessionOutcome out = session::run_session(cfg);

    REQUIRE(out.result.key_alice == out.result.key_bob);
    // Unattacked rounds contribute the maximum, intercepted rounds zero.
    REQUIRE(out.result.mean_bell ==
            Catch::Approx((1.0 - out.result.eve_known_fraction) * max)
                .margin(1e-9));
    // For a fixed seed the set of attacked rounds grows with p.
    REQUIRE(out.result.mean_bell <= previous_bell + 1e-12);
    REQUIRE(out.result.eve_known_fraction >= previous_eve);
    previous_bell = out.result.mean_bell;
    previous_eve = out.result.eve_known_fraction;
  }
}

TEST_CASE("single-leg intercepts break the violation but not the keys",
          "[session]") {
  for (auto kind : {adversary::AttackKind::ir_first_leg,
                    adversary::AttackKind::ir_second_leg}) {
    session::SessionConfig cfg = clean_qutrit(30, 5);
    cfg.attack.kind = kind;
    cfg.attack.p = 1.0;
    session::SessionOutcome out = session::run_session(cfg);
    REQUIRE(out.result.key_alice == out.result.key_bob);
    REQUIRE(out.result.verdict == bell::Verdict::compromised);
    REQUIRE(out.result.mean_bell == Catch::Approx(0.0).margin(1e-9));
    // Eve never saw both legs, so she learned nothing she can decode.
    REQUIRE(out.result.eve_known_fraction == 0.0);
  }
}

TEST_CASE("the one-qubit-per-leg attack stays key-transparent", "[session]") {
  session::SessionConfig cfg = clean_qutrit(40, 17);
  cfg.protocol = Protocol::qubit;
  cfg.attack.kind = adversary::AttackKind::single_qubit_ir;
  cfg.attack.p = 1.0;
  for (int leg1 = 0; leg1 < 2; ++leg1) {
    cfg.attack.leg1_qubit = leg1;
    session::SessionOutcome out = session::run_session(cfg);
    REQUIRE(out.result.key_alice == out.result.key_bob);
    // Every branch of this attack is Bell-silent, so it is still detected.
    REQUIRE(out.result.mean_bell == Catch::Approx(0.0).margin(1e-9));
    REQUIRE(out.result.verdict == bell::Verdict::compromised);
    REQUIRE(out.result.eve_known_fraction == 0.0);
  }
}

TEST_CASE("channel dephasing alone flags the session", "[session]") {
  session::SessionConfig cfg = clean_qutrit(25, 8);
  cfg.attack.noise = 1.0;
  session::SessionOutcome out = session::run_session(cfg);
  REQUIRE(out.result.key_alice == out.result.key_bob);
  REQUIRE(out.result.mean_bell == Catch::Approx(0.0).margin(1e-9));
  REQUIRE(out.result.verdict == bell::Verdict::compromised);
}

TEST_CASE("the verdict honours the configured threshold", "[session]") {
  session::SessionConfig cfg = clean_qutrit(10, 21);
  cfg.chi = 2.5;
  REQUIRE(session::run_session(cfg).result.verdict == bell::Verdict::safe);
  cfg.chi = 2.9;  // above the attainable 2.873
  REQUIRE(session::run_session(cfg).result.verdict ==
          bell::Verdict::compromised);
}

TEST_CASE("sampled Bell estimates converge to the exact value", "[session]") {
  session::SessionConfig cfg = clean_qutrit(5, 31);
  cfg.bell_mode = session::BellMode::sampled;
  cfg.shots = 20000;
  session::SessionOutcome out = session::run_session(cfg);
  REQUIRE(out.result.key_alice == out.result.key_bob);
  // Per-round standard error is below 0.025 at 20000 shots; 0.15 is six
  // standard errors away from the exact mean.
  REQUIRE(out.result.mean_bell ==
          Catch::Approx(bell::qutrit_max_violation()).margin(0.15));
}

TEST_CASE("key bit strings and hex rendering", "[session]") {
  std::vector<bool> bits = {true, false, true, false, false, false, false,
                            true, true};
  REQUIRE(session::bits_to_string(bits) == "101000011");
  REQUIRE(session::bits_from_string("101000011") == bits);
  REQUIRE_THROWS_AS(session::bits_from_string("10x"), std::runtime_error);
  REQUIRE(session::bits_to_hex(bits) == "a18");
  REQUIRE(session::bits_to_hex({}) == "");
}

TEST_CASE("transcripts round-trip through their text form", "[session]") {
  session::SessionConfig cfg = clean_qutrit(12, 99);
  cfg.attack.kind = adversary::AttackKind::double_ir;
  cfg.attack.p = 0.4;
  session::SessionOutcome out = session::run_session(cfg);

  std::stringstream ss;
  session::write_transcript(ss, cfg, out);

  session::LoadedSession loaded = session::read_transcript(ss);
  REQUIRE(loaded.has_summary);
  REQUIRE(loaded.config.protocol == cfg.protocol);
  REQUIRE(loaded.config.n_rounds == cfg.n_rounds);
  REQUIRE(loaded.config.chi == cfg.chi);
  REQUIRE(loaded.config.seed == cfg.seed);
  REQUIRE(loaded.config.attack.kind == cfg.attack.kind);
  REQUIRE(loaded.config.attack.p == cfg.attack.p);
  REQUIRE(loaded.outcome.result.key_alice == out.result.key_alice);
  REQUIRE(loaded.outcome.result.key_bob == out.result.key_bob);
  REQUIRE(loaded.outcome.result.mean_bell == out.result.mean_bell);
  REQUIRE(loaded.outcome.result.verdict == out.result.verdict);
  REQUIRE(loaded.outcome.rounds.size() == out.rounds.size());
  for (std::size_t i = 0; i < out.rounds.size(); ++i) {
    REQUIRE(loaded.outcome.rounds[i] == out.rounds[i]);
  }
}

TEST_CASE("qubit transcripts carry the O outcome", "[session]") {
  session::SessionConfig cfg = clean_qutrit(6, 41);
  cfg.protocol = Protocol::qubit;
  session::SessionOutcome out = session::run_session(cfg);

  std::stringstream ss;
  session::write_transcript(ss, cfg, out);
  std::string text = ss.str();
  REQUIRE(text.find("o_pair=") != std::string::npos);
  REQUIRE(text.find("ks=") == std::string::npos);

  session::LoadedSession loaded = session::read_transcript(ss);
  for (std::size_t i = 0; i < out.rounds.size(); ++i) {
    REQUIRE(loaded.outcome.rounds[i] == out.rounds[i]);
  }
}

TEST_CASE("transcript files survive a disk round-trip", "[session]") {
  session::SessionConfig cfg = clean_qutrit(8, 55);
  session::SessionOutcome out = session::run_session(cfg);
  std::string path = "transcript_roundtrip_test.txt";
  session::save_transcript(path, cfg, out);
  session::LoadedSession loaded = session::load_transcript(path);
  REQUIRE(loaded.has_summary);
  REQUIRE(loaded.outcome.result == out.result);
  std::remove(path.c_str());

  REQUIRE_THROWS_AS(session::load_transcript("does/not/exist.txt"),
                    std::runtime_error);
}

TEST_CASE("transcript parsing rejects malformed input", "[session]") {
  auto parse = [](const std::string& text) {
    std::stringstream ss(text);
    return session::read_transcript(ss);
  };

  SECTION("empty input is an empty session") {
    session::LoadedSession loaded = parse("");
    REQUIRE_FALSE(loaded.has_summary);
    REQUIRE(loaded.outcome.rounds.empty());
  }

  SECTION("blank lines are skipped") {
    session::LoadedSession loaded = parse(
        "\nround=0 ka=1 kb=0 residual=2 bell=0.5 attacked=0\n\n");
    REQUIRE(loaded.outcome.rounds.size() == 1);
    REQUIRE(loaded.outcome.rounds[0].k_a);
    REQUIRE(loaded.outcome.rounds[0].bell == 0.5);
  }

  SECTION("malformed bits carry the line number") {
    REQUIRE_THROWS_WITH(
        parse("round=0 ka=2 kb=0 residual=0 bell=0 attacked=0"),
        Catch::Matchers::ContainsSubstring("line 1"));
  }

  SECTION("unknown fields are rejected") {
    REQUIRE_THROWS_WITH(
        parse("round=0 ka=0 kb=0 residual=0 bell=0 attacked=0 bogus=1"),
        Catch::Matchers::ContainsSubstring("unknown field"));
  }

  SECTION("missing required fields are rejected") {
    REQUIRE_THROWS_WITH(parse("round=0 ka=0 kb=0"),
                        Catch::Matchers::ContainsSubstring("missing"));
  }

  SECTION("fields without separators are rejected") {
    REQUIRE_THROWS_AS(parse("gibberish"), std::runtime_error);
  }

  SECTION("content after the summary is rejected") {
    session::SessionConfig cfg = clean_qutrit(1, 1);
    std::stringstream ss;
    session::write_transcript(ss, cfg, session::run_session(cfg));
    std::string text = ss.str() + "round=9 ka=0 kb=0 residual=0 bell=0 attacked=0\n";
    REQUIRE_THROWS_WITH(parse(text),
                        Catch::Matchers::ContainsSubstring("after the summary"));
  }

  SECTION("broken summary JSON is rejected") {
    REQUIRE_THROWS_AS(parse("summary {not json"), std::runtime_error);
  }

  SECTION("summary with missing keys is rejected") {
    REQUIRE_THROWS_AS(parse("summary {\"protocol\": \"qutrit\"}"),
                      std::runtime_error);
  }
}
