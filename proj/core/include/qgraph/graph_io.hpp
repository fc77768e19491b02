#pragma once

#include <filesystem>
#include <string>

#include "qgraph/graph.hpp"
#include "qgraph/vertex_conditions.hpp"

namespace qgraph {

/// A parsed graph description: the validated graph, one condition per vertex,
/// and the free-form metadata block (raw JSON text, "{}" when absent).
struct GraphDocument {
    MetricGraph graph;
    ConditionSet conditions;
    std::string metadata_json = "{}";
};

/// Parse a graph description document.
///
/// Schema (JSON):
///   {
///     "metadata": { ... },                      // optional
///     "vertices": [ {"id": "v1", "condition": COND}, ... ],
///     "edges":    [ {"id": "e1", "endpoints": ["v1"], "length": "lead"},
///                   {"id": "e2", "endpoints": ["v1","v2"], "length": 1.0} ]
///   }
/// COND is "neumann_kirchhoff", "dirichlet",
///   {"type": "general", "A": MATRIX, "B": MATRIX} or
///   {"type": "constant", "matrix": MATRIX},
/// with complex entries encoded as [re, im]. General matrices are indexed by
/// the vertex slot layout (MetricGraph::vertex_slots).
///
/// Throws ParseError on schema violations and on condition/graph validation
/// failures, naming the offending vertex or edge.
GraphDocument parse_graph_file(const std::string& text);

GraphDocument load_graph_file(const std::filesystem::path& path);

/// Serialize back to the document format; parsing the output reproduces the
/// same graph and condition matrices bit for bit.
std::string emit_graph_file(const GraphDocument& doc);

}  // namespace qgraph
