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
#include <sstream>
#include <utility>

#include <json.hpp>

namespace chronolace::machine {

namespace {

using nlohmann::json;

// Shortest round-trip decimal form of a double (via the JSON serializer),
// so 3.14 prints as "3.14" and still parses back bit-exactly.
std::string format_number(double value) { return json(value).dump(); }

const Transition* find_transition(const Program& program, int state,
                                  char symbol) {
  for (const Transition& row : program.rows) {
    if (row.state == state && row.read == symbol) return &row;
  }
  return nullptr;
}

}  // namespace

OpenMachine make_machine(std::string id, Program program, std::string tape,
                         int head, double eta, double period) {
  if (!(eta > 0.0) || !(eta < 1.0)) {
    throw ConfigError("reception guard eta must lie in (0, 1)");
  }
  if (!(period > 0.0)) {
    throw ConfigError("clock period must be positive");
  }
  if (tape.empty()) {
    throw ConfigError("tape must hold at least one cell");
  }
  if (head < 0 || head >= static_cast<int>(tape.size())) {
    throw ConfigError("head must start on the tape");
  }
  OpenMachine m;
  m.id = std::move(id);
  m.program = std::move(program);
  m.tape.assign(tape.begin(), tape.end());
  m.head = head;
  m.eta = eta;
  m.clock.period = period;
  return m;
}

OpenMachine step(OpenMachine m) {
  if (m.state != kHaltState) {
    const char symbol = m.tape[static_cast<std::size_t>(m.head)];
    const Transition* row = find_transition(m.program, m.state, symbol);
    if (row == nullptr) {
      throw ProgramError("no program row for the current state and symbol");
    }
    m.tape[static_cast<std::size_t>(m.head)] = row->write;
    switch (row->move) {
      case Move::kLeft: --m.head; break;
      case Move::kRight: ++m.head; break;
      case Move::kStay: break;
    }
    if (m.head < 0 || m.head >= static_cast<int>(m.tape.size())) {
      throw ProgramError("head moved outside the declared tape bounds");
    }
    m.state = row->next_state;
  }
  m.clock.cycle += 1;
  m.elapsed += m.clock.period;
  return m;
}

OpenMachine run(OpenMachine m, std::span<const double> tick_schedule) {
  for (const double period : tick_schedule) {
    if (!(period > 0.0)) {
      throw ConfigError("tick schedule entries must be positive periods");
    }
    m.clock.period = period;
    m = step(std::move(m));
  }
  return m;
}

ReceiveResult receive(OpenMachine m, const std::string& from, char payload,
                      double arrival_phase, std::int64_t cycle_sent) {
  if (!(arrival_phase > -0.5) || !(arrival_phase <= 0.5)) {
    throw DomainError("arrival phase must lie in (-1/2, 1/2]");
  }
  const double threshold = (1.0 - m.eta) / 2.0;
  if (!(std::abs(arrival_phase) < threshold)) {
    ReceiveResult rejected;
    rejected.machine = std::move(m);
    rejected.accepted = false;
    rejected.violation =
        LogicalSyncViolation{from, arrival_phase, threshold, cycle_sent};
    return rejected;
  }
  m.input_region.push_back(payload);
  m.history.push_back(HistoryRecord{m.clock.cycle, EventKind::kReceived, from,
                                    arrival_phase, cycle_sent});
  ReceiveResult accepted;
  accepted.machine = std::move(m);
  accepted.accepted = true;
  return accepted;
}

TransmitResult transmit(OpenMachine m, const std::string& to, char payload) {
  if (m.clock.phase != 0.0 && !m.allow_midcycle_transmit) {
    throw PhaseDisciplineError(
        "transmissions occur at ticks: machine phase is not zero");
  }
  m.history.push_back(HistoryRecord{m.clock.cycle, EventKind::kSend, to,
                                    m.clock.phase, std::nullopt});
  Emission emission{m.id, to, payload, m.clock.cycle};
  return TransmitResult{std::move(m), std::move(emission)};
}

OpenMachine set_rate(OpenMachine m, double new_period) {
  if (!(new_period > 0.0)) {
    throw ConfigError("clock period must be positive");
  }
  m.history.push_back(HistoryRecord{m.clock.cycle, EventKind::kRate,
                                    std::string{}, new_period, std::nullopt});
  m.clock.period = new_period;
  return m;
}

const char* to_string(EventKind event) {
  switch (event) {
    case EventKind::kSend: return "send";
    case EventKind::kReceived: return "received";
    case EventKind::kRate: return "rate";
  }
  return "unknown";
}

std::string history_to_csv(const std::vector<HistoryRecord>& history) {
  std::ostringstream out;
  out << "own_cycle,event,party,phase_or_rate,cycle_sent\n";
  for (const HistoryRecord& row : history) {
    out << row.own_cycle << ',' << to_string(row.event) << ',' << row.party
        << ',' << format_number(row.phase_or_rate) << ',';
    if (row.cycle_sent.has_value()) out << *row.cycle_sent;
    out << '\n';
  }
  return out.str();
}

std::vector<HistoryRecord> history_from_csv(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line) ||
      line != "own_cycle,event,party,phase_or_rate,cycle_sent") {
    throw ConfigError("history CSV must start with the standard header");
  }
  std::vector<HistoryRecord> history;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::array<std::string, 5> field;
    std::size_t start = 0;
    for (int i = 0; i < 5; ++i) {
      const std::size_t comma = line.find(',', start);
      if (i < 4 && comma == std::string::npos) {
        throw ConfigError("history CSV row must have five fields");
      }
      field[static_cast<std::size_t>(i)] =
          line.substr(start, comma == std::string::npos ? std::string::npos
                                                        : comma - start);
      start = comma + 1;
    }
    HistoryRecord row;
    row.own_cycle = std::stoll(field[0]);
    if (field[1] == "send") {
      row.event = EventKind::kSend;
    } else if (field[1] == "received") {
      row.event = EventKind::kReceived;
    } else if (field[1] == "rate") {
      row.event = EventKind::kRate;
    } else {
      throw ConfigError("unknown history event: " + field[1]);
    }
    row.party = field[2];
    row.phase_or_rate = std::stod(field[3]);
    if (!field[4].empty()) row.cycle_sent = std::stoll(field[4]);
    history.push_back(std::move(row));
  }
  return history;
}

std::string history_to_json(const std::vector<HistoryRecord>& history) {
  json rows = json::array();
  for (const HistoryRecord& row : history) {
    json item{{"own_cycle", row.own_cycle},
              {"event", to_string(row.event)},
              {"party", row.party},
              {"phase_or_rate", row.phase_or_rate}};
    if (row.cycle_sent.has_value()) {
      item["cycle_sent"] = *row.cycle_sent;
    } else {
      item["cycle_sent"] = nullptr;
    }
    rows.push_back(std::move(item));
  }
  return rows.dump(2);
}

}  // namespace chronolace::machine
