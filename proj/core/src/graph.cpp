#include "qgraph/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "qgraph/errors.hpp"

namespace qgraph {

int MetricGraph::vertex_index(const std::string& id) const {
    auto it = vertex_lookup_.find(id);
    if (it == vertex_lookup_.end()) {
        throw ValidationError("unknown vertex id '" + id + "'");
    }
    return it->second;
}

int MetricGraph::edge_index(const std::string& id) const {
    auto it = edge_lookup_.find(id);
    if (it == edge_lookup_.end()) {
        throw ValidationError("unknown edge id '" + id + "'");
    }
    return it->second;
}

int MetricGraph::directed_index(int edge, int sign) const {
    const int rank = bond_rank_.at(edge);
    if (rank < 0) {
        throw ValidationError("edge '" + edges_[edge].id + "' is a lead, not a bond");
    }
    if (sign != 1 && sign != -1) {
        throw ValidationError("direction sign must be +1 or -1");
    }
    return 2 * rank + (sign > 0 ? 0 : 1);
}

int MetricGraph::lead_index(int edge) const {
    const int rank = lead_rank_.at(edge);
    if (rank < 0) {
        throw ValidationError("edge '" + edges_[edge].id + "' is a bond, not a lead");
    }
    return rank;
}

std::pair<int, int> MetricGraph::directed_bond(int directed) const {
    if (directed < 0 || directed >= bond_dim()) {
        throw ValidationError("directed bond index out of range");
    }
    return {bond_edges_[directed / 2], directed % 2 == 0 ? 1 : -1};
}

GraphPoint MetricGraph::locate(const GraphPoint& p) const {
    if (p.edge < 0 || p.edge >= num_edges()) {
        throw ValidationError("unknown edge index in graph point");
    }
    const EdgeRecord& e = edges_[p.edge];
    if (!std::isfinite(p.x) || p.x < 0.0) {
        throw ValidationError("coordinate " + std::to_string(p.x) + " on edge '" +
                              e.id + "' is out of range");
    }
    if (!e.is_lead() && p.x > e.length) {
        throw ValidationError("coordinate " + std::to_string(p.x) + " exceeds length of bond '" +
                              e.id + "'");
    }
    return p;
}

GraphPoint MetricGraph::point(const std::string& edge_id, double x) const {
    return locate(GraphPoint{edge_index(edge_id), x});
}

GraphBuilder& GraphBuilder::add_vertex(const std::string& id) {
    vertex_ids_.push_back(id);
    return *this;
}

GraphBuilder& GraphBuilder::add_bond(const std::string& id, const std::string& from,
                                     const std::string& to, double length) {
    pending_.push_back(PendingEdge{id, from, to, length, false});
    return *this;
}

GraphBuilder& GraphBuilder::add_lead(const std::string& id, const std::string& at) {
    pending_.push_back(PendingEdge{id, at, "", 0.0, true});
    return *this;
}

MetricGraph GraphBuilder::build() const {
    MetricGraph g;

    for (const auto& id : vertex_ids_) {
        if (id.empty()) {
            throw ValidationError("vertex id must be non-empty");
        }
        if (!g.vertex_lookup_.emplace(id, static_cast<int>(g.vertices_.size())).second) {
            throw ValidationError("duplicate vertex id '" + id + "'");
        }
        g.vertices_.push_back(VertexRecord{id});
    }

    std::vector<PendingEdge> sorted = pending_;
    std::sort(sorted.begin(), sorted.end(),
              [](const PendingEdge& a, const PendingEdge& b) { return a.id < b.id; });

    auto resolve = [&](const std::string& edge_id, const std::string& vid) {
        auto it = g.vertex_lookup_.find(vid);
        if (it == g.vertex_lookup_.end()) {
            throw ValidationError("edge '" + edge_id + "' references unknown vertex '" + vid + "'");
        }
        return it->second;
    };

    g.min_bond_length_ = std::numeric_limits<double>::infinity();
    for (const auto& pe : sorted) {
        if (pe.id.empty()) {
            throw ValidationError("edge id must be non-empty");
        }
        EdgeRecord e;
        e.id = pe.id;
        if (pe.lead) {
            e.kind = EdgeKind::Lead;
            e.v0 = resolve(pe.id, pe.from);
            e.v1 = -1;
            e.length = std::numeric_limits<double>::infinity();
        } else {
            e.kind = EdgeKind::Bond;
            e.v0 = resolve(pe.id, pe.from);
            e.v1 = resolve(pe.id, pe.to);
            e.length = pe.length;
            if (!std::isfinite(e.length) || e.length <= 0.0) {
                throw ValidationError("bond '" + pe.id + "' must have a positive finite length");
            }
            g.total_bond_length_ += e.length;
            g.min_bond_length_ = std::min(g.min_bond_length_, e.length);
        }
        if (!g.edge_lookup_.emplace(e.id, static_cast<int>(g.edges_.size())).second) {
            throw ValidationError("duplicate edge id '" + e.id + "'");
        }
        g.edges_.push_back(e);
    }
    if (g.edges_.empty()) {
        throw ValidationError("graph has no edges");
    }

    g.bond_rank_.assign(g.edges_.size(), -1);
    g.lead_rank_.assign(g.edges_.size(), -1);
    for (int e = 0; e < g.num_edges(); ++e) {
        if (g.edges_[e].is_lead()) {
            g.lead_rank_[e] = g.num_leads_++;
            g.lead_edges_.push_back(e);
        } else {
            g.bond_rank_[e] = g.num_bonds_++;
            g.bond_edges_.push_back(e);
        }
    }
    if (g.num_bonds_ == 0) {
        g.min_bond_length_ = 0.0;
    }

    g.directed_lengths_.resize(g.bond_dim());
    g.direction_swap_.resize(g.bond_dim());
    for (int e = 0; e < g.num_edges(); ++e) {
        const int rank = g.bond_rank_[e];
        if (rank < 0) continue;
        g.directed_lengths_[2 * rank] = g.edges_[e].length;
        g.directed_lengths_[2 * rank + 1] = g.edges_[e].length;
        g.direction_swap_[2 * rank] = 2 * rank + 1;
        g.direction_swap_[2 * rank + 1] = 2 * rank;
    }

    // Arrival slots per vertex: the (e, -) wave arrives at v0, the (e, +)
    // wave at v1; a lead's single channel arrives at its vertex. Slots are
    // ordered by global index, which fixes the layout of vertex matrices.
    g.slots_.assign(g.vertices_.size(), {});
    for (int e = 0; e < g.num_edges(); ++e) {
        const EdgeRecord& rec = g.edges_[e];
        if (rec.is_lead()) {
            g.slots_[rec.v0].push_back(VertexSlot{g.global_lead_index(e), e, 0});
        } else {
            g.slots_[rec.v0].push_back(VertexSlot{g.directed_index(e, -1), e, -1});
            g.slots_[rec.v1].push_back(VertexSlot{g.directed_index(e, +1), e, +1});
        }
    }
    for (int v = 0; v < g.num_vertices(); ++v) {
        auto& s = g.slots_[v];
        std::sort(s.begin(), s.end(), [](const VertexSlot& a, const VertexSlot& b) {
            return a.global_index < b.global_index;
        });
        if (s.empty()) {
            throw ValidationError("vertex '" + g.vertices_[v].id + "' has no edges");
        }
    }

    return g;
}

}  // namespace qgraph
