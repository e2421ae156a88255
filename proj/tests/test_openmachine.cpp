// Copyright 2026 The Chronolace Authors
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

#include "chronolace/openmachine.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>

#include "chronolace/errors.hpp"
#include "test_helpers.hpp"

using namespace chronolace;
using namespace chronolace::machine;
using chronolace_tests::rel;

namespace {

/// Unary increment: scan right over 1s, write a 1 on the first blank, halt.
Program increment_program() {
  Program p;
  p.rows = {Transition{0, '1', '1', Move::kRight, 0},
            Transition{0, kBlank, '1', Move::kStay, kHaltState}};
  return p;
}

OpenMachine idle_machine(const std::string& id, double eta = 0.1) {
  OpenMachine m = make_machine(id, Program{}, "_", 0, eta, 1.0);
  m.state = kHaltState;  // no tape program: the machine only ticks
  return m;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

/// Total program over three states and alphabet {0, 1}; never halts, so a
/// fixed step budget exercises every schedule the same way.
Program random_program(std::mt19937& rng) {
  std::uniform_int_distribution<int> state(0, 2);
  std::uniform_int_distribution<int> symbol(0, 1);
  std::uniform_int_distribution<int> move(0, 2);
  Program p;
  for (int s = 0; s < 3; ++s) {
    for (const char c : {'0', '1'}) {
      p.rows.push_back(Transition{
          s, c, static_cast<char>('0' + symbol(rng)),
          std::array{Move::kLeft, Move::kRight, Move::kStay}[static_cast<std::size_t>(
              move(rng))],
          state(rng)});
    }
  }
  return p;
}

}  // namespace

TEST_SUITE("openmachine") {

TEST_CASE("stepping a halted machine advances only the clock") {
  OpenMachine m = idle_machine("A");
  const std::vector<char> tape = m.tape;
  m = step(std::move(m));
  CHECK(m.clock.cycle == 1);
  CHECK(m.tape == tape);
  CHECK(m.elapsed == 1.0);
}

TEST_CASE("unary increment writes one more mark") {
  OpenMachine m = make_machine("A", increment_program(), "111_");
  for (int i = 0; i < 4; ++i) m = step(std::move(m));
  CHECK(std::string(m.tape.begin(), m.tape.end()) == "1111");
  CHECK(m.state == kHaltState);
  CHECK(m.clock.cycle == 4);
}

TEST_CASE("stepping is deterministic") {
  OpenMachine a = make_machine("A", increment_program(), "11_");
  OpenMachine b = make_machine("A", increment_program(), "11_");
  for (int i = 0; i < 3; ++i) {
    a = step(std::move(a));
    b = step(std::move(b));
  }
  CHECK(a.tape == b.tape);
  CHECK(a.clock.cycle == b.clock.cycle);
}

TEST_CASE("program faults raise ProgramError") {
  // Walking off the left edge of the declared tape.
  Program left;
  left.rows = {Transition{0, '1', '1', Move::kLeft, 0}};
  OpenMachine m = make_machine("A", left, "1");
  CHECK_THROWS_AS(step(std::move(m)), ProgramError);

  // Missing row for the current state and symbol.
  OpenMachine n = make_machine("A", Program{}, "1");
  CHECK_THROWS_AS(step(std::move(n)), ProgramError);
}

TEST_CASE("machine construction validates its configuration") {
  CHECK_THROWS_AS(make_machine("A", Program{}, "1", 0, 0.0, 1.0), ConfigError);
  CHECK_THROWS_AS(make_machine("A", Program{}, "1", 0, 1.0, 1.0), ConfigError);
  CHECK_THROWS_AS(make_machine("A", Program{}, "1", 0, 0.1, 0.0), ConfigError);
  CHECK_THROWS_AS(make_machine("A", Program{}, "", 0, 0.1, 1.0), ConfigError);
  CHECK_THROWS_AS(make_machine("A", Program{}, "1", 7, 0.1, 1.0), ConfigError);
}

TEST_CASE("the tape is oblivious to the tick schedule") {
  // Same program under a uniform and a stretched schedule: simulation times
  // differ, tapes agree.
  const std::vector<double> uniform(4, 1.0);
  const std::vector<double> stretched{0.5, 2.0, 0.25, 3.0};
  OpenMachine a = run(make_machine("A", increment_program(), "111_"), uniform);
  OpenMachine b = run(make_machine("A", increment_program(), "111_"), stretched);
  CHECK(a.tape == b.tape);
  CHECK(a.clock.cycle == b.clock.cycle);
  CHECK(a.elapsed == rel(4.0, 1e-15));
  CHECK(b.elapsed == rel(5.75, 1e-15));
}

TEST_CASE("one hundred random programs are schedule-independent") {
  for (std::uint32_t seed = 0; seed < 100; ++seed) {
    std::mt19937 rng(seed);
    const Program program = random_program(rng);
    std::uniform_real_distribution<double> period(0.1, 2.0);
    std::vector<double> constant(50, 1.0);
    std::vector<double> jittered;
    for (int i = 0; i < 50; ++i) jittered.push_back(period(rng));

    const std::string tape(128, '0');
    OpenMachine a = run(make_machine("A", program, tape, 64), constant);
    OpenMachine b = run(make_machine("A", program, tape, 64), jittered);
    CHECK(a.tape == b.tape);
  }
}

TEST_CASE("run rejects non-positive schedule entries") {
  const std::vector<double> bad{1.0, -0.5};
  CHECK_THROWS_AS(run(idle_machine("A"), bad), ConfigError);
}

TEST_CASE("reception is gated by the guard band") {
  OpenMachine m = idle_machine("A", 0.1);

  SUBCASE("an in-gate phase is accepted and logged") {
    ReceiveResult r = receive(std::move(m), "B", '1', 0.17, 24);
    CHECK(r.accepted);
    CHECK_FALSE(r.violation.has_value());
    REQUIRE(r.machine.history.size() == 1);
    const HistoryRecord& row = r.machine.history.front();
    CHECK(row.event == EventKind::kReceived);
    CHECK(row.party == "B");
    CHECK(row.phase_or_rate == 0.17);
    CHECK(row.cycle_sent == 24);
    CHECK(r.machine.input_region == std::vector<char>{'1'});
  }

  SUBCASE("a null phase is always accepted") {
    ReceiveResult r = receive(std::move(m), "B", '1', 0.0, 3);
    CHECK(r.accepted);
  }

  SUBCASE("an out-of-gate phase is rejected as evidence, not an exception") {
    ReceiveResult r = receive(std::move(m), "B", '1', 0.5, 24);
    CHECK_FALSE(r.accepted);
    REQUIRE(r.violation.has_value());
    CHECK(r.violation->phase == 0.5);
    CHECK(r.violation->threshold == rel(0.45, 1e-15));
    CHECK(r.violation->from == "B");
    CHECK(r.machine.history.empty());
    CHECK(r.machine.input_region.empty());
  }

  SUBCASE("the boundary |phase| = (1-eta)/2 is already out of gate") {
    ReceiveResult r = receive(std::move(m), "B", '1', 0.45, 24);
    CHECK_FALSE(r.accepted);
  }

  SUBCASE("phases outside the reading convention are malformed input") {
    CHECK_THROWS_AS(receive(std::move(m), "B", '1', -0.5, 24), DomainError);
  }
}

TEST_CASE("no accepted record ever breaks the gate") {
  OpenMachine m = idle_machine("A", 0.2);
  for (double phase = -0.49; phase < 0.5; phase += 0.07) {
    ReceiveResult r = receive(std::move(m), "B", 'x', phase, 0);
    m = std::move(r.machine);
  }
  for (const HistoryRecord& row : m.history) {
    CHECK(std::abs(row.phase_or_rate) < (1.0 - m.eta) / 2.0);
  }
  CHECK_FALSE(m.history.empty());
}

TEST_CASE("transmission happens at ticks") {
  OpenMachine m = idle_machine("A");
  for (int i = 0; i < 17; ++i) m = step(std::move(m));

  TransmitResult t = transmit(std::move(m), "B", '1');
  CHECK(t.emission.from == "A");
  CHECK(t.emission.to == "B");
  CHECK(t.emission.cycle == 17);
  REQUIRE(t.machine.history.size() == 1);
  CHECK(t.machine.history.front().own_cycle == 17);
  CHECK(t.machine.history.front().event == EventKind::kSend);
  CHECK(t.machine.history.front().party == "B");

  // Two transmissions in one cycle to distinct parties are two records.
  TransmitResult t2 = transmit(std::move(t.machine), "D", '0');
  CHECK(t2.machine.history.size() == 2);
  CHECK(t2.machine.history.back().own_cycle == 17);
  CHECK(t2.machine.history.back().party == "D");

  // A mid-cycle transmit is a phase-discipline fault unless allowed.
  OpenMachine late = idle_machine("A");
  late.clock.phase = 0.3;
  CHECK_THROWS_AS(transmit(std::move(late), "B", '1'), PhaseDisciplineError);
  OpenMachine relaxed = idle_machine("A");
  relaxed.clock.phase = 0.3;
  relaxed.allow_midcycle_transmit = true;
  TransmitResult t3 = transmit(std::move(relaxed), "B", '1');
  CHECK(t3.machine.history.front().phase_or_rate == 0.3);
}

TEST_CASE("rate changes are logged and leave the tape alone") {
  OpenMachine m = make_machine("A", increment_program(), "111_");
  m = step(std::move(m));
  m = set_rate(std::move(m), 3.14);
  REQUIRE(m.history.size() == 1);
  CHECK(m.history.front().event == EventKind::kRate);
  CHECK(m.history.front().phase_or_rate == 3.14);
  CHECK(m.history.front().own_cycle == 1);
  for (int i = 0; i < 3; ++i) m = step(std::move(m));
  CHECK(std::string(m.tape.begin(), m.tape.end()) == "1111");
  // The new period applies from the next move on.
  CHECK(m.elapsed == rel(1.0 + 3 * 3.14, 1e-15));

  CHECK_THROWS_AS(set_rate(std::move(m), 0.0), ConfigError);
}

TEST_CASE("history own_cycles are non-decreasing over a session") {
  OpenMachine m = idle_machine("A");
  for (int i = 0; i < 17; ++i) m = step(std::move(m));
  m = transmit(std::move(m), "B", '1').machine;
  m = set_rate(std::move(m), 3.14);
  m = step(std::move(m));
  m = transmit(std::move(m), "D", '1').machine;
  m = set_rate(std::move(m), 3.14);
  m = step(std::move(m));
  m = receive(std::move(m), "B", '1', 0.17, 24).machine;
  m = set_rate(std::move(m), 3.07);
  m = transmit(std::move(m), "B", '1').machine;
  for (std::size_t i = 1; i < m.history.size(); ++i) {
    CHECK(m.history[i - 1].own_cycle <= m.history[i].own_cycle);
  }
}

TEST_CASE("a scripted session reproduces the history table fixture") {
  OpenMachine m = idle_machine("A");
  for (int i = 0; i < 17; ++i) m = step(std::move(m));
  m = transmit(std::move(m), "B", '1').machine;   // 17 send B
  m = set_rate(std::move(m), 3.14);               // 17 rate 3.14
  m = step(std::move(m));
  m = transmit(std::move(m), "D", '1').machine;   // 18 send D
  m = set_rate(std::move(m), 3.14);               // 18 rate 3.14
  m = step(std::move(m));
  ReceiveResult r = receive(std::move(m), "B", '1', 0.17, 24);
  REQUIRE(r.accepted);                            // 19 received B 0.17 24
  m = std::move(r.machine);
  m = set_rate(std::move(m), 3.07);               // 19 rate 3.07
  m = transmit(std::move(m), "B", '1').machine;   // 19 send B

  const std::string fixture =
      read_file(std::string(CHRONOLACE_TEST_DATA_DIR) + "/sample_history.csv");
  CHECK(history_to_csv(m.history) == fixture);

  // The CSV and the in-memory history agree in both directions.
  CHECK(history_from_csv(fixture) == m.history);
  CHECK(history_from_csv(history_to_csv(m.history)) == m.history);
}

TEST_CASE("history serializes to JSON with explicit nulls") {
  OpenMachine m = idle_machine("A");
  m = receive(std::move(m), "B", '1', 0.17, 24).machine;
  m = set_rate(std::move(m), 3.07);
  const std::string json = history_to_json(m.history);
  CHECK(json.find("\"event\": \"received\"") != std::string::npos);
  CHECK(json.find("\"cycle_sent\": 24") != std::string::npos);
  CHECK(json.find("\"cycle_sent\": null") != std::string::npos);
  CHECK(json.find("3.07") != std::string::npos);
}

TEST_CASE("malformed history CSV is rejected") {
  CHECK_THROWS_AS(history_from_csv("not,a,header\n"), ConfigError);
  CHECK_THROWS_AS(
      history_from_csv("own_cycle,event,party,phase_or_rate,cycle_sent\n"
                       "17,explode,B,0.0,\n"),
      ConfigError);
  CHECK_THROWS_AS(
      history_from_csv("own_cycle,event,party,phase_or_rate,cycle_sent\n"
                       "17,send\n"),
      ConfigError);
}

}  // TEST_SUITE
