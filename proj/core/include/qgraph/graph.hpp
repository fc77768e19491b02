#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "qgraph/types.hpp"

namespace qgraph {

struct VertexRecord {
    std::string id;
};

enum class EdgeKind { Bond, Lead };

struct EdgeRecord {
    std::string id;
    EdgeKind kind = EdgeKind::Bond;
    int v0 = -1;          // vertex at x = 0
    int v1 = -1;          // vertex at x = length; -1 for leads
    double length = 0.0;  // +infinity for leads

    bool is_lead() const { return kind == EdgeKind::Lead; }
};

/// A point on the graph: an edge index plus a coordinate along it.
/// Bonds carry 0 <= x <= length, leads x >= 0 with x = 0 at the vertex.
struct GraphPoint {
    int edge = -1;
    double x = 0.0;
};

/// One wave channel arriving at a vertex. `sign` is +1 for the wave running
/// toward x = length, -1 for the wave running toward x = 0, and 0 for a lead
/// channel. `global_index` addresses the canonical amplitude vector.
struct VertexSlot {
    int global_index = -1;
    int edge = -1;
    int sign = 0;
};

/// Immutable metric graph: vertices, bonds with positive finite lengths and
/// semi-infinite leads, plus the canonical directed-edge indexing used by all
/// matrix-valued quantities.
///
/// Canonical ordering: edges are sorted lexicographically by id. Directed
/// bonds come first, as (e, +) then (e, -) per bond, followed by one slot per
/// lead. The ordering is a pure function of the structural description, so
/// identical descriptions produce identical matrices everywhere downstream.
class MetricGraph {
public:
    int num_vertices() const { return static_cast<int>(vertices_.size()); }
    int num_bonds() const { return num_bonds_; }
    int num_leads() const { return num_leads_; }
    int num_edges() const { return static_cast<int>(edges_.size()); }

    /// Dimension of the directed-bond sector (2 N_B).
    int bond_dim() const { return 2 * num_bonds_; }
    /// Dimension of the full amplitude vector (2 N_B + N_L).
    int total_dim() const { return 2 * num_bonds_ + num_leads_; }
    bool is_compact() const { return num_leads_ == 0; }

    const std::vector<VertexRecord>& vertices() const { return vertices_; }
    const std::vector<EdgeRecord>& edges() const { return edges_; }
    const EdgeRecord& edge(int e) const { return edges_.at(e); }

    int vertex_index(const std::string& id) const;
    int edge_index(const std::string& id) const;

    int degree(int v) const { return static_cast<int>(slots_.at(v).size()); }

    /// Directed index of bond `edge` in direction `sign` (+1/-1), in [0, 2N_B).
    int directed_index(int edge, int sign) const;
    /// Position of a lead within the lead sector, in [0, N_L).
    int lead_index(int edge) const;
    /// Directed index of a lead in the full amplitude vector (2N_B + lead_index).
    int global_lead_index(int edge) const { return bond_dim() + lead_index(edge); }

    /// (edge, sign) addressed by a directed-bond index.
    std::pair<int, int> directed_bond(int directed) const;
    /// Edge index of the `li`-th lead.
    int lead_edge(int li) const { return lead_edges_.at(li); }

    double length(int edge) const { return edges_.at(edge).length; }
    /// Diagonal of the 2N_B length matrix (each bond length appears twice).
    const RealVector& directed_lengths() const { return directed_lengths_; }
    /// Direction-swap permutation over directed bonds; an involution.
    const std::vector<int>& direction_swap() const { return direction_swap_; }

    double total_bond_length() const { return total_bond_length_; }
    double min_bond_length() const { return min_bond_length_; }

    /// Wave channels arriving at each vertex, ordered by global index. This is
    /// the row/column layout of vertex condition matrices at that vertex.
    const std::vector<VertexSlot>& vertex_slots(int v) const { return slots_.at(v); }

    /// Validate that a point lies on its edge; returns the point unchanged.
    GraphPoint locate(const GraphPoint& p) const;
    /// Resolve an edge id and validate the coordinate.
    GraphPoint point(const std::string& edge_id, double x) const;

private:
    friend class GraphBuilder;

    std::vector<VertexRecord> vertices_;
    std::vector<EdgeRecord> edges_;  // canonical (id-sorted) order
    std::unordered_map<std::string, int> vertex_lookup_;
    std::unordered_map<std::string, int> edge_lookup_;
    std::vector<int> bond_rank_;  // per edge; -1 for leads
    std::vector<int> lead_rank_;  // per edge; -1 for bonds
    std::vector<int> bond_edges_;
    std::vector<int> lead_edges_;
    std::vector<std::vector<VertexSlot>> slots_;
    RealVector directed_lengths_;
    std::vector<int> direction_swap_;
    int num_bonds_ = 0;
    int num_leads_ = 0;
    double total_bond_length_ = 0.0;
    double min_bond_length_ = 0.0;
};

/// Assembles and validates a MetricGraph from a structural description.
class GraphBuilder {
public:
    GraphBuilder& add_vertex(const std::string& id);
    GraphBuilder& add_bond(const std::string& id, const std::string& from,
                           const std::string& to, double length);
    GraphBuilder& add_lead(const std::string& id, const std::string& at);

    /// Throws ValidationError on dangling endpoints, non-positive lengths,
    /// duplicate ids or isolated vertices.
    MetricGraph build() const;

private:
    struct PendingEdge {
        std::string id;
        std::string from, to;
        double length = 0.0;
        bool lead = false;
    };
    std::vector<std::string> vertex_ids_;
    std::vector<PendingEdge> pending_;
};

}  // namespace qgraph
