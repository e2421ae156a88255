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

#ifndef CHRONOLACE_OPENMACHINE_HPP_
#define CHRONOLACE_OPENMACHINE_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "chronolace/errors.hpp"

namespace chronolace::machine {

/// Head motion of a tape move.
enum class Move { kLeft, kRight, kStay };

/// Distinguished halting state; stepping a halted machine advances the clock
/// but leaves the tape untouched.
inline constexpr int kHaltState = -1;

/// Blank tape symbol.
inline constexpr char kBlank = '_';

/// One five-tuple program row: in `state`, reading `read`, write `write`,
/// move the head, and enter `next_state`.
struct Transition {
  int state = 0;
  char read = kBlank;
  char write = kBlank;
  Move move = Move::kStay;
  int next_state = 0;
};

/// A minimal tape program: a list of five-tuple rows. Branching happens by
/// giving one row per read symbol; a missing row is a program fault.
struct Program {
  std::vector<Transition> rows;
};

/// The machine's adjustable-rate clock. `cycle.phase` is the machine's own
/// reading; the phase is nonzero only for mid-cycle moments.
struct Clock {
  std::int64_t cycle = 0;
  double phase = 0.0;
  double period = 1.0;  ///< seconds per cycle, adjustable on the fly
};

enum class EventKind { kSend, kReceived, kRate };

/// One history row: (own_cycle, event, party, phase_or_rate, cycle_sent).
/// `received` rows carry the arrival phase and the sender's cycle; `rate`
/// rows carry the new period; `send` rows carry the (null) transmit phase.
struct HistoryRecord {
  std::int64_t own_cycle = 0;
  EventKind event = EventKind::kSend;
  std::string party;  ///< empty when the row names no counterparty
  double phase_or_rate = 0.0;
  std::optional<std::int64_t> cycle_sent;

  bool operator==(const HistoryRecord&) const = default;
};

/// A clock-stepped tape machine with phase-gated reception and a Table-style
/// history log. Machines are values: the stepping operations below take a
/// machine and return the successor machine.
struct OpenMachine {
  std::string id;
  Clock clock;
  Program program;
  int state = 0;
  std::vector<char> tape;
  int head = 0;
  std::vector<char> input_region;  ///< characters accepted from the channels
  std::vector<HistoryRecord> history;
  double eta = 0.1;  ///< reception guard band, in (0, 1)
  bool allow_midcycle_transmit = false;
  double elapsed = 0.0;  ///< simulation seconds accumulated by ticks
};

/// Builds a machine and validates its configuration (eta in (0,1),
/// positive period); throws ConfigError otherwise.
OpenMachine make_machine(std::string id, Program program, std::string tape,
                         int head = 0, double eta = 0.1, double period = 1.0);

/// Evidence of a reception arriving outside the phase gate of Eq-style
/// logical synchronization: |phase| >= (1 - eta)/2. This is a recorded fact
/// about the channel, not an exception; the machine is left unchanged.
struct LogicalSyncViolation {
  std::string from;
  double phase = 0.0;
  double threshold = 0.0;  ///< the failing bound (1 - eta)/2
  std::int64_t cycle_sent = 0;
};

struct ReceiveResult {
  OpenMachine machine;
  bool accepted = false;
  std::optional<LogicalSyncViolation> violation;
};

/// A tagged emission handed to the propagation layer.
struct Emission {
  std::string from;
  std::string to;
  char payload = kBlank;
  std::int64_t cycle = 0;
};

struct TransmitResult {
  OpenMachine machine;
  Emission emission;
};

/// Executes exactly one program move; the cycle count increments and
/// simulation time advances by the current period. Faults (missing
/// transition, head leaving the tape) throw ProgramError.
OpenMachine step(OpenMachine m);

/// Steps once per entry of the tick schedule, with each entry giving that
/// tick's period. The final tape depends only on the program and initial
/// tape, never on the schedule.
OpenMachine run(OpenMachine m, std::span<const double> tick_schedule);

/// Delivers a character at the given arrival phase. Inside the gate
/// |phase| < (1 - eta)/2 the character is appended to the input region and a
/// `received` row is logged; otherwise the result carries a
/// LogicalSyncViolation and the machine is unchanged. Phases outside the
/// reading convention (-1/2, 1/2] throw DomainError.
ReceiveResult receive(OpenMachine m, const std::string& from, char payload,
                      double arrival_phase, std::int64_t cycle_sent);

/// Emits a character toward `to` at the machine's current (integer) reading
/// and logs a `send` row. Transmitting at a non-integer phase throws
/// PhaseDisciplineError unless the machine allows mid-cycle transmits.
TransmitResult transmit(OpenMachine m, const std::string& to, char payload);

/// Adjusts the clock period starting with the next move and logs a `rate`
/// row. Non-positive periods throw ConfigError.
OpenMachine set_rate(OpenMachine m, double new_period);

/// Serializes history rows to CSV with the header
/// own_cycle,event,party,phase_or_rate,cycle_sent.
std::string history_to_csv(const std::vector<HistoryRecord>& history);

/// Parses the CSV dialect produced by history_to_csv; malformed input throws
/// ConfigError.
std::vector<HistoryRecord> history_from_csv(const std::string& csv);

/// Serializes history rows to a JSON array string with the same fields.
std::string history_to_json(const std::vector<HistoryRecord>& history);

const char* to_string(EventKind event);

}  // namespace chronolace::machine

#endif  // CHRONOLACE_OPENMACHINE_HPP_
