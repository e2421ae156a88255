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

#ifndef CHRONOLACE_CHANNELS_HPP_
#define CHRONOLACE_CHANNELS_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "chronolace/errors.hpp"
#include "chronolace/openmachine.hpp"
#include "chronolace/reading.hpp"

namespace chronolace::channels {

/// One transmit/receive reading pair of a channel.
struct ChannelPair {
  Reading sent;
  Reading received;

  bool operator==(const ChannelPair&) const = default;
};

/// Transmit and arrival phases of one repetition index.
struct PhasePair {
  double transmit = 0.0;
  double arrival = 0.0;
};

/// A periodic family of channel pairs (m + l j . phi_A,l, n + l k . phi_B,l)
/// between two machines, for l over an integer interval or endlessly.
/// Repetition indices absent from `phases` default to null phases.
struct RepeatingChannel {
  std::string from;
  std::string to;
  std::int64_t m = 0;  ///< base transmit cycle
  std::int64_t n = 0;  ///< base receive cycle
  std::int64_t j = 1;  ///< transmit-side cycle stride, positive
  std::int64_t k = 1;  ///< receive-side cycle stride, positive
  std::map<std::int64_t, PhasePair> phases;
  /// Inclusive repetition bounds; disengaged means the channel is endless.
  std::optional<std::pair<std::int64_t, std::int64_t>> ell_range;
};

/// Materializes the pairs for repetition indices [lo, hi], clipped to the
/// channel's own range when it has one. Endless channels require explicit
/// bounds. Invalid strides or an empty clipped range throw ConfigError.
std::vector<ChannelPair> generate_pairs(const RepeatingChannel& channel,
                                        std::int64_t lo, std::int64_t hi);

/// Echo count of the send at reading m.0: the first later reception from the
/// send's counterparty, minus m. Integer exactly when that reception phase is
/// null. Throws NoEchoError when the history has no send at m or no later
/// reception from that party.
double echo_count(const std::vector<machine::HistoryRecord>& history,
                  std::int64_t m);

/// Repetition indices whose arrival phase breaks the logical-synchronization
/// gate |phi| >= (1 - eta)/2; an empty result means the channel is logically
/// synchronized at guard eta. Throws ConfigError unless 0 < eta < 1.
std::vector<std::int64_t> check_phase_constraint(
    const RepeatingChannel& channel, double eta);

/// True iff sent-order implies received-order over every pair of pairs.
/// Fewer than two pairs are vacuously order-preserving.
bool is_order_preserving(const std::vector<ChannelPair>& pairs);

/// Edge of one machine's trail, labeled by the rate in effect on that step
/// when the history recorded one.
struct TrailEdge {
  std::int64_t from_cycle = 0;
  std::int64_t to_cycle = 0;
  std::optional<double> rate;
};

/// Signal edge from the sender's reading to the receiver's, labeled by the
/// arrival phase.
struct SignalEdge {
  std::string from_machine;
  std::int64_t from_cycle = 0;
  std::string to_machine;
  std::int64_t to_cycle = 0;
  double phase = 0.0;
};

struct Trail {
  std::string machine;
  std::vector<std::int64_t> nodes;
  std::vector<TrailEdge> edges;
};

/// One trail of readings per machine plus phase-labeled signal edges.
struct OccurrenceGraph {
  std::vector<Trail> trails;          ///< sorted by machine name
  std::vector<SignalEdge> signals;    ///< deterministic order
};

/// Builds the occurrence graph of a set of histories. Every reception must
/// name a send that exists in the sender's history, and the combined graph
/// must be acyclic; otherwise InconsistentEvidenceError.
OccurrenceGraph occurrence_graph(
    const std::map<std::string, std::vector<machine::HistoryRecord>>&
        histories);

/// Deterministic Graphviz DOT rendering: trails in name order, nodes in
/// reading order, signal edges dashed and phase-labeled.
std::string to_dot(const OccurrenceGraph& graph);

/// Node/edge lists recovered from the DOT dialect emitted by to_dot.
struct ParsedDot {
  struct Edge {
    std::string from;
    std::string to;
    bool dashed = false;
    std::string label;

    bool operator==(const Edge&) const = default;
    auto operator<=>(const Edge&) const = default;
  };
  std::vector<std::string> nodes;
  std::vector<Edge> edges;
};

/// Parses the dialect produced by to_dot; anything else throws ConfigError.
ParsedDot parse_dot(const std::string& text);

/// Marked graph: tokens live on edges; a node fires by consuming one token
/// from every incoming edge and producing one on every outgoing edge.
struct MarkedEdge {
  std::string from;
  std::string to;
  std::int64_t tokens = 0;
};

struct MarkedGraph {
  std::vector<std::string> nodes;
  std::vector<MarkedEdge> edges;
};

/// Wraps an endless, unit-stride two-way channel pair into a marked graph
/// with one clock self-loop per machine and one channel edge per direction;
/// the channel-loop token sum equals the echo count. Non-null phases must be
/// explicitly forgotten. Unsupported shapes throw UnsupportedError; mismatched
/// endpoints or negative in-flight counts throw ConfigError.
MarkedGraph wrap_to_marked_graph(const RepeatingChannel& ab,
                                 const RepeatingChannel& ba,
                                 bool forget_phases);

/// True when every incoming edge of the node carries at least one token.
bool can_fire(const MarkedGraph& graph, const std::string& node);

/// Fires the node; firing a disabled node throws DomainError.
MarkedGraph fire(MarkedGraph graph, const std::string& node);

}  // namespace chronolace::channels

#endif  // CHRONOLACE_CHANNELS_HPP_
