// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <string>

#include "mocha/motif_graph.hpp"

namespace mocha::motif {

/// One graph as a single-line JSON object:
///   {"group", "subband", "position", "node_count", "weights": [..],
///    "nearest": [[..], ..], "distance_matrix": [[..], ..] (optional)}
std::string graph_to_json(const GraphRecord& rec, bool include_distances);

/// JSON Lines: one graph_to_json object per line.
std::string graphs_to_jsonl(std::span<const GraphRecord> records, bool include_distances);

/// Graphviz digraph with one cluster per graph. Each node votes along an
/// edge to every tied nearest neighbour; node fill is darker for larger
/// weight (grey level 1 - w / node_count).
std::string graphs_to_dot(std::span<const GraphRecord> records, const std::string& name);

}  // namespace mocha::motif
