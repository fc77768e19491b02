#include "qgraph/oracle.hpp"

#include <cmath>
#include <map>

#include "qgraph/errors.hpp"
#include "qgraph/quantum_map.hpp"

namespace qgraph {

namespace {

const Complex kI(0.0, 1.0);

Complex phase(Complex k, double exponent) { return std::exp(kI * k * exponent); }

/// sum_{n=1}^{N} M^n, accumulated as M (I + M (I + ...)).
ComplexMatrix neumann_sum(const ComplexMatrix& m, int order) {
    const int n = m.rows();
    ComplexMatrix acc = ComplexMatrix::Zero(n, n);
    for (int i = 0; i < order; ++i) {
        acc = m * (ComplexMatrix::Identity(n, n) + acc);
    }
    return acc;
}

GreensValue assemble_compact(const MetricGraph& graph, const ComplexMatrix& resolvent_part,
                             const GraphPoint& x, const GraphPoint& x_prime,
                             const EnergyPoint& energy) {
    const Complex k = energy.k;
    const int sp = graph.directed_index(x_prime.edge, +1);
    const int sm = graph.directed_index(x_prime.edge, -1);
    const int tp = graph.directed_index(x.edge, +1);
    const int tm = graph.directed_index(x.edge, -1);
    const double le = graph.length(x.edge);
    const double lp = graph.length(x_prime.edge);

    Complex sum = 0.0;
    if (x.edge == x_prime.edge) {
        sum += phase(k, std::abs(x.x - x_prime.x));
    }
    sum += phase(k, x.x - x_prime.x - le + lp) * resolvent_part(tp, sp);
    sum += phase(k, -(x.x - x_prime.x)) * resolvent_part(tm, sm);
    sum += phase(k, x.x + x_prime.x - le) * resolvent_part(tp, sm);
    sum += phase(k, -(x.x + x_prime.x - lp)) * resolvent_part(tm, sp);

    GreensValue value;
    value.value = sum / (2.0 * kI * k);
    value.target = x;
    value.source = x_prime;
    value.energy = energy;
    value.kind = GreensCase::Compact;
    return value;
}

}  // namespace

GreensValue path_sum_greens(const MetricGraph& graph, const ConditionSet& conditions,
                            const GraphPoint& x, const GraphPoint& x_prime,
                            const EnergyPoint& energy, int order) {
    if (!(energy.k.imag() > 0.0)) {
        throw DomainError("the path sum converges only for Im k > 0");
    }
    if (order < 0) {
        throw ValidationError("truncation order must be non-negative");
    }
    graph.locate(x);
    graph.locate(x_prime);

    const Complex k = energy.k;
    QuantumMapSnapshot snap = quantum_map(graph, conditions, k);

    if (graph.is_compact()) {
        return assemble_compact(graph, neumann_sum(snap.U, order), x, x_prime, energy);
    }

    const int nb = graph.bond_dim();
    ComplexMatrix acc = neumann_sum(snap.U_BB, order);
    ComplexMatrix geo = ComplexMatrix::Identity(nb, nb) + acc;  // sum_{n=0}^{N}

    const bool x_lead = graph.edge(x.edge).is_lead();
    const bool xp_lead = graph.edge(x_prime.edge).is_lead();

    GreensValue value;
    value.target = x;
    value.source = x_prime;
    value.energy = energy;

    if (x_lead && xp_lead) {
        ComplexMatrix sigma = snap.U_LL + snap.U_LB * geo * snap.U_BL;
        Complex sum = 0.0;
        if (x.edge == x_prime.edge) {
            sum += phase(k, std::abs(x.x - x_prime.x));
        }
        sum += phase(k, x.x + x_prime.x) *
               sigma(graph.lead_index(x.edge), graph.lead_index(x_prime.edge));
        value.value = sum / (2.0 * kI * k);
        value.kind = GreensCase::LeadLead;
        return value;
    }
    if (x_lead && !xp_lead) {
        ComplexMatrix w = snap.U_LB * geo;
        const int le = graph.lead_index(x.edge);
        const double lp = graph.length(x_prime.edge);
        Complex sum = phase(k, x.x - x_prime.x + lp) * w(le, graph.directed_index(x_prime.edge, +1));
        sum += phase(k, x.x + x_prime.x) * w(le, graph.directed_index(x_prime.edge, -1));
        value.value = sum / (2.0 * kI * k);
        value.kind = GreensCase::LeadBond;
        return value;
    }
    if (!x_lead && xp_lead) {
        ComplexMatrix v = geo * snap.U_BL;
        const int lp = graph.lead_index(x_prime.edge);
        const double le = graph.length(x.edge);
        Complex sum = phase(k, -(x.x - x_prime.x)) * v(graph.directed_index(x.edge, -1), lp);
        sum += phase(k, x.x + x_prime.x - le) * v(graph.directed_index(x.edge, +1), lp);
        value.value = sum / (2.0 * kI * k);
        value.kind = GreensCase::BondLead;
        return value;
    }

    GreensValue out = assemble_compact(graph, acc, x, x_prime, energy);
    out.kind = GreensCase::BondBond;
    return out;
}

GreensValue auxiliary_limit_greens(const MetricGraph& graph, const ConditionSet& conditions,
                                   const GraphPoint& x, const GraphPoint& x_prime,
                                   const EnergyPoint& energy, double lead_length,
                                   DanglingCondition dangling) {
    if (graph.is_compact()) {
        throw DomainError("the auxiliary limit applies to open graphs");
    }
    if (!(energy.k.imag() > 0.0)) {
        throw DomainError("the auxiliary limit requires Im k > 0");
    }
    graph.locate(x);
    graph.locate(x_prime);
    for (const GraphPoint& p : {x, x_prime}) {
        if (graph.edge(p.edge).is_lead() && p.x >= lead_length) {
            throw ValidationError("lead length must exceed every evaluated lead coordinate");
        }
    }
    if (!(lead_length > 0.0)) {
        throw ValidationError("lead length must be positive");
    }

    GraphBuilder builder;
    for (const auto& v : graph.vertices()) {
        builder.add_vertex(v.id);
    }
    std::vector<std::string> dangling_vertices;
    for (int e = 0; e < graph.num_edges(); ++e) {
        const EdgeRecord& rec = graph.edge(e);
        if (rec.is_lead()) {
            const std::string end_id = rec.id + "__end";
            builder.add_vertex(end_id);
            builder.add_bond(rec.id, graph.vertices()[rec.v0].id, end_id, lead_length);
            dangling_vertices.push_back(end_id);
        } else {
            builder.add_bond(rec.id, graph.vertices()[rec.v0].id, graph.vertices()[rec.v1].id,
                             rec.length);
        }
    }
    MetricGraph compact = builder.build();

    // Lead channels become the (e, -) channel of the new bond; general
    // condition matrices are re-indexed accordingly.
    ConditionSet compact_conditions;
    compact_conditions.reserve(compact.num_vertices());
    for (int v = 0; v < graph.num_vertices(); ++v) {
        const auto& old_slots = graph.vertex_slots(v);
        const auto& new_slots = compact.vertex_slots(v);
        const VertexCondition& cond = conditions[v];
        if (cond.kind() == VertexCondition::Kind::General ||
            cond.kind() == VertexCondition::Kind::Constant) {
            const int d = static_cast<int>(old_slots.size());
            std::map<std::pair<std::string, int>, int> old_position;
            for (int i = 0; i < d; ++i) {
                const EdgeRecord& rec = graph.edge(old_slots[i].edge);
                const int sign = rec.is_lead() ? -1 : old_slots[i].sign;
                old_position[{rec.id, sign}] = i;
            }
            std::vector<int> perm(d);
            for (int i = 0; i < d; ++i) {
                perm[i] = old_position.at(
                    {compact.edge(new_slots[i].edge).id, new_slots[i].sign});
            }
            auto permute = [&](const ComplexMatrix& m) {
                ComplexMatrix out(d, d);
                for (int i = 0; i < d; ++i)
                    for (int j = 0; j < d; ++j) out(i, j) = m(perm[i], perm[j]);
                return out;
            };
            compact_conditions.push_back(
                cond.kind() == VertexCondition::Kind::Constant
                    ? VertexCondition::constant(permute(cond.S()))
                    : VertexCondition::general(permute(cond.A()), permute(cond.B())));
        } else {
            compact_conditions.push_back(cond);
        }
    }
    for (size_t i = 0; i < dangling_vertices.size(); ++i) {
        compact_conditions.push_back(dangling == DanglingCondition::Dirichlet
                                         ? VertexCondition::dirichlet()
                                         : VertexCondition::neumann_kirchhoff());
    }

    GraphPoint xc{compact.edge_index(graph.edge(x.edge).id), x.x};
    GraphPoint xpc{compact.edge_index(graph.edge(x_prime.edge).id), x_prime.x};
    GreensValue aux = greens_compact(compact, compact_conditions, xc, xpc, energy);

    GreensValue value;
    value.value = aux.value;
    value.target = x;
    value.source = x_prime;
    value.energy = energy;
    value.kind = GreensCase::Compact;
    return value;
}

}  // namespace qgraph
