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

#include "chronolace/channels.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <set>
#include <sstream>
#include <tuple>

#include <json.hpp>

namespace chronolace::channels {

namespace {

using machine::EventKind;
using machine::HistoryRecord;

std::string format_number(double value) { return nlohmann::json(value).dump(); }

PhasePair phases_at(const RepeatingChannel& channel, std::int64_t ell) {
  const auto it = channel.phases.find(ell);
  return it == channel.phases.end() ? PhasePair{} : it->second;
}

}  // namespace

std::vector<ChannelPair> generate_pairs(const RepeatingChannel& channel,
                                        std::int64_t lo, std::int64_t hi) {
  if (channel.j <= 0 || channel.k <= 0) {
    throw ConfigError("repeating-channel strides must be positive");
  }
  if (channel.ell_range.has_value()) {
    lo = std::max(lo, channel.ell_range->first);
    hi = std::min(hi, channel.ell_range->second);
  }
  if (lo > hi) {
    throw ConfigError("empty repetition range");
  }
  std::vector<ChannelPair> pairs;
  pairs.reserve(static_cast<std::size_t>(hi - lo + 1));
  for (std::int64_t ell = lo; ell <= hi; ++ell) {
    const PhasePair phi = phases_at(channel, ell);
    pairs.push_back(ChannelPair{Reading{channel.m + ell * channel.j, phi.transmit},
                                Reading{channel.n + ell * channel.k, phi.arrival}});
  }
  return pairs;
}

double echo_count(const std::vector<HistoryRecord>& history, std::int64_t m) {
  const HistoryRecord* send = nullptr;
  for (const HistoryRecord& row : history) {
    if (row.event == EventKind::kSend && row.own_cycle == m) {
      send = &row;
      break;
    }
  }
  if (send == nullptr) {
    throw NoEchoError("history holds no send at the requested reading");
  }
  for (const HistoryRecord& row : history) {
    if (row.event != EventKind::kReceived || row.party != send->party) continue;
    const double value = static_cast<double>(row.own_cycle) + row.phase_or_rate;
    if (value > static_cast<double>(m)) {
      return value - static_cast<double>(m);
    }
  }
  throw NoEchoError("no reception from the counterparty follows the send");
}

std::vector<std::int64_t> check_phase_constraint(const RepeatingChannel& channel,
                                                double eta) {
  if (!(eta > 0.0) || !(eta < 1.0)) {
    throw ConfigError("phase guard eta must lie in (0, 1)");
  }
  const double threshold = (1.0 - eta) / 2.0;
  std::vector<std::int64_t> violating;
  for (const auto& [ell, phi] : channel.phases) {
    if (channel.ell_range.has_value() &&
        (ell < channel.ell_range->first || ell > channel.ell_range->second)) {
      continue;
    }
    if (std::abs(phi.arrival) >= threshold) violating.push_back(ell);
  }
  return violating;
}

bool is_order_preserving(const std::vector<ChannelPair>& pairs) {
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    for (std::size_t j = 0; j < pairs.size(); ++j) {
      if (pairs[i].sent.value() < pairs[j].sent.value() &&
          pairs[i].received.value() >= pairs[j].received.value()) {
        return false;
      }
    }
  }
  return true;
}

namespace {

struct TrailBuild {
  std::set<std::int64_t> nodes;
  std::map<std::int64_t, double> rate_at;  // rate rows, last one per cycle
};

// Depth-first cycle check over trail and signal edges combined.
void require_acyclic(const OccurrenceGraph& graph) {
  // Index nodes as (machine, cycle).
  using Node = std::pair<std::string, std::int64_t>;
  std::map<Node, std::vector<Node>> out;
  for (const Trail& trail : graph.trails) {
    for (const TrailEdge& e : trail.edges) {
      out[{trail.machine, e.from_cycle}].push_back({trail.machine, e.to_cycle});
    }
  }
  for (const SignalEdge& e : graph.signals) {
    out[{e.from_machine, e.from_cycle}].push_back({e.to_machine, e.to_cycle});
  }
  std::map<Node, int> mark;  // 0 new, 1 active, 2 done
  std::vector<std::pair<Node, std::size_t>> stack;
  for (const auto& [start, unused] : out) {
    if (mark[start] != 0) continue;
    stack.push_back({start, 0});
    mark[start] = 1;
    while (!stack.empty()) {
      auto& [node, next] = stack.back();
      const auto it = out.find(node);
      if (it == out.end() || next >= it->second.size()) {
        mark[node] = 2;
        stack.pop_back();
        continue;
      }
      const Node child = it->second[next++];
      if (mark[child] == 1) {
        throw InconsistentEvidenceError(
            "histories wrap time: occurrence graph has a cycle");
      }
      if (mark[child] == 0) {
        mark[child] = 1;
        stack.push_back({child, 0});
      }
    }
  }
}

}  // namespace

OccurrenceGraph occurrence_graph(
    const std::map<std::string, std::vector<HistoryRecord>>& histories) {
  std::map<std::string, TrailBuild> builds;
  for (const auto& [name, rows] : histories) {
    TrailBuild& b = builds[name];
    for (const HistoryRecord& row : rows) {
      b.nodes.insert(row.own_cycle);
      if (row.event == EventKind::kRate) b.rate_at[row.own_cycle] = row.phase_or_rate;
    }
  }

  OccurrenceGraph graph;
  for (const auto& [name, rows] : histories) {
    // Signal edges; receptions must name a send present in the counterparty
    // history.
    for (const HistoryRecord& row : rows) {
      if (row.event != EventKind::kReceived) continue;
      if (!row.cycle_sent.has_value()) {
        throw InconsistentEvidenceError(
            "reception row lacks the sender's cycle");
      }
      const auto sender = histories.find(row.party);
      const bool matched =
          sender != histories.end() &&
          std::any_of(sender->second.begin(), sender->second.end(),
                      [&](const HistoryRecord& s) {
                        return s.event == EventKind::kSend &&
                               s.own_cycle == *row.cycle_sent &&
                               s.party == name;
                      });
      if (!matched) {
        throw InconsistentEvidenceError(
            "reception names a send that no history contains");
      }
      graph.signals.push_back(SignalEdge{row.party, *row.cycle_sent, name,
                                         row.own_cycle, row.phase_or_rate});
    }
  }

  for (auto& [name, b] : builds) {
    // A rate row on the last recorded reading announces the next step's rate,
    // so the trail extends one reading past it.
    if (!b.nodes.empty() && !b.rate_at.empty() &&
        b.rate_at.rbegin()->first == *b.nodes.rbegin()) {
      b.nodes.insert(*b.nodes.rbegin() + 1);
    }
    Trail trail;
    trail.machine = name;
    trail.nodes.assign(b.nodes.begin(), b.nodes.end());
    for (std::size_t i = 0; i + 1 < trail.nodes.size(); ++i) {
      TrailEdge edge{trail.nodes[i], trail.nodes[i + 1], std::nullopt};
      // The label is the most recent rate announced at or before the step.
      const auto it = b.rate_at.upper_bound(edge.from_cycle);
      if (it != b.rate_at.begin()) edge.rate = std::prev(it)->second;
      trail.edges.push_back(edge);
    }
    graph.trails.push_back(std::move(trail));
  }

  std::sort(graph.signals.begin(), graph.signals.end(), [](const SignalEdge& a,
                                                           const SignalEdge& b) {
    return std::tie(a.from_machine, a.from_cycle, a.to_machine, a.to_cycle) <
           std::tie(b.from_machine, b.from_cycle, b.to_machine, b.to_cycle);
  });
  require_acyclic(graph);
  return graph;
}

std::string to_dot(const OccurrenceGraph& graph) {
  std::ostringstream out;
  out << "digraph occurrence {\n";
  for (const Trail& trail : graph.trails) {
    for (const std::int64_t node : trail.nodes) {
      out << "  \"" << trail.machine << '_' << node << "\" [label=\""
          << trail.machine << ':' << node << "\"];\n";
    }
  }
  for (const Trail& trail : graph.trails) {
    for (const TrailEdge& e : trail.edges) {
      out << "  \"" << trail.machine << '_' << e.from_cycle << "\" -> \""
          << trail.machine << '_' << e.to_cycle << '"';
      if (e.rate.has_value()) out << " [label=\"" << format_number(*e.rate) << "\"]";
      out << ";\n";
    }
  }
  for (const SignalEdge& e : graph.signals) {
    out << "  \"" << e.from_machine << '_' << e.from_cycle << "\" -> \""
        << e.to_machine << '_' << e.to_cycle << "\" [style=dashed, label=\""
        << format_number(e.phase) << "\"];\n";
  }
  out << "}\n";
  return out.str();
}

namespace {

std::string parse_quoted(const std::string& line, std::size_t& pos) {
  if (pos >= line.size() || line[pos] != '"') {
    throw ConfigError("expected a quoted identifier in DOT text");
  }
  const std::size_t end = line.find('"', pos + 1);
  if (end == std::string::npos) {
    throw ConfigError("unterminated quote in DOT text");
  }
  std::string value = line.substr(pos + 1, end - pos - 1);
  pos = end + 1;
  return value;
}

}  // namespace

ParsedDot parse_dot(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "digraph occurrence {") {
    throw ConfigError("DOT text must open with 'digraph occurrence {'");
  }
  ParsedDot parsed;
  bool closed = false;
  while (std::getline(in, line)) {
    if (line == "}") {
      closed = true;
      break;
    }
    std::size_t pos = line.find('"');
    if (pos == std::string::npos) {
      throw ConfigError("unrecognized DOT line: " + line);
    }
    const std::string first = parse_quoted(line, pos);
    const std::size_t arrow = line.find("->", pos);
    if (arrow == std::string::npos) {
      parsed.nodes.push_back(first);
      continue;
    }
    pos = line.find('"', arrow);
    if (pos == std::string::npos) {
      throw ConfigError("edge line lacks a target in DOT text");
    }
    ParsedDot::Edge edge;
    edge.from = first;
    edge.to = parse_quoted(line, pos);
    edge.dashed = line.find("style=dashed", pos) != std::string::npos;
    const std::size_t label = line.find("label=\"", pos);
    if (label != std::string::npos) {
      std::size_t lpos = label + 6;
      edge.label = parse_quoted(line, lpos);
    }
    parsed.edges.push_back(std::move(edge));
  }
  if (!closed) throw ConfigError("DOT text never closes its digraph");
  return parsed;
}

MarkedGraph wrap_to_marked_graph(const RepeatingChannel& ab,
                                 const RepeatingChannel& ba,
                                 bool forget_phases) {
  if (ab.ell_range.has_value() || ba.ell_range.has_value()) {
    throw UnsupportedError("marked-graph wrap requires endless channels");
  }
  if (ab.j != 1 || ab.k != 1 || ba.j != 1 || ba.k != 1) {
    throw UnsupportedError("marked-graph wrap requires unit strides");
  }
  if (ab.from != ba.to || ab.to != ba.from || ab.from == ab.to) {
    throw ConfigError("channels must form a two-way pair between two machines");
  }
  if (!forget_phases) {
    const auto null_phases = [](const RepeatingChannel& ch) {
      return std::all_of(ch.phases.begin(), ch.phases.end(), [](const auto& kv) {
        return kv.second.transmit == 0.0 && kv.second.arrival == 0.0;
      });
    };
    if (!null_phases(ab) || !null_phases(ba)) {
      throw UnsupportedError(
          "channels carry phases; pass forget_phases to wrap anyway");
    }
  }
  const std::int64_t in_flight_ab = ab.n - ab.m;
  const std::int64_t in_flight_ba = ba.n - ba.m;
  if (in_flight_ab < 0 || in_flight_ba < 0) {
    throw ConfigError("wrap requires nonnegative in-flight counts");
  }
  MarkedGraph graph;
  graph.nodes = {ab.from, ab.to};
  graph.edges = {MarkedEdge{ab.from, ab.from, 1},
                 MarkedEdge{ab.to, ab.to, 1},
                 MarkedEdge{ab.from, ab.to, in_flight_ab},
                 MarkedEdge{ab.to, ab.from, in_flight_ba}};
  return graph;
}

bool can_fire(const MarkedGraph& graph, const std::string& node) {
  bool has_input = false;
  for (const MarkedEdge& edge : graph.edges) {
    if (edge.to != node) continue;
    has_input = true;
    if (edge.tokens < 1) return false;
  }
  return has_input;
}

MarkedGraph fire(MarkedGraph graph, const std::string& node) {
  if (!can_fire(graph, node)) {
    throw DomainError("marked-graph node is not enabled");
  }
  for (MarkedEdge& edge : graph.edges) {
    if (edge.to == node) edge.tokens -= 1;
  }
  for (MarkedEdge& edge : graph.edges) {
    if (edge.from == node) edge.tokens += 1;
  }
  return graph;
}

}  // namespace chronolace::channels
