// SPDX-License-Identifier: Apache-2.0
#include "mocha/graph_dump.hpp"

#include <cstdio>
#include <json.hpp>
#include <sstream>

namespace mocha::motif {

std::string graph_to_json(const GraphRecord& rec, bool include_distances) {
  const MotifGraph& g = rec.graph;
  nlohmann::ordered_json j;
  j["group"] = rec.group;
  j["subband"] = rec.subband;
  j["position"] = g.position;
  j["node_count"] = g.node_count;
  j["weights"] = g.weights();
  j["nearest"] = g.nearest;
  if (include_distances) {
    auto rows = nlohmann::ordered_json::array();
    for (std::size_t a = 0; a < g.node_count; ++a) {
      auto row = nlohmann::ordered_json::array();
      for (std::size_t b = 0; b < g.node_count; ++b) row.push_back(g.distance(a, b));
      rows.push_back(std::move(row));
    }
    j["distance_matrix"] = std::move(rows);
  }
  return j.dump();
}

std::string graphs_to_jsonl(std::span<const GraphRecord> records, bool include_distances) {
  std::string out;
  for (const auto& r : records) {
    out += graph_to_json(r, include_distances);
    out += '\n';
  }
  return out;
}

std::string graphs_to_dot(std::span<const GraphRecord> records, const std::string& name) {
  std::ostringstream os;
  os << "digraph \"" << name << "\" {\n  node [shape=circle, style=filled];\n";
  for (std::size_t i = 0; i < records.size(); ++i) {
    const GraphRecord& r = records[i];
    const MotifGraph& g = r.graph;
    const std::string prefix = "g" + std::to_string(r.group) + "_" + r.subband + "_p" +
                               std::to_string(g.position) + "_n";
    os << "  subgraph \"cluster_" << i << "\" {\n"
       << "    label=\"group " << r.group << " " << r.subband << " position " << g.position
       << "\";\n";
    for (std::size_t c = 0; c < g.node_count; ++c) {
      const double shade = 1.0 - g.weight(c) / static_cast<double>(g.node_count);
      char color[16];
      std::snprintf(color, sizeof color, "%.3f", shade < 0.0 ? 0.0 : shade);
      os << "    " << prefix << c << " [label=\"" << c << "\\nw=" << g.weight(c)
         << "\", fillcolor=\"0 0 " << color << "\"];\n";
    }
    for (std::size_t c = 0; c < g.node_count; ++c) {
      for (std::size_t nn : g.nearest[c]) {
        os << "    " << prefix << c << " -> " << prefix << nn << " [label=\""
           << g.distance(c, nn) << "\"];\n";
      }
    }
    os << "  }\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace mocha::motif
