#include "qgraph/greens.hpp"

#include <cmath>
#include <map>

#include <Eigen/LU>

#include "qgraph/errors.hpp"

namespace qgraph {

namespace {

const Complex kI(0.0, 1.0);
constexpr double kPoleGuard = 1e-8;  // on |det(I - U)| at real energy

Complex phase(Complex k, double exponent) { return std::exp(kI * k * exponent); }

/// Estimate of the eigen-wavenumber nearest to real k, one Newton step of the
/// secular log-derivative.
double nearest_root_estimate(const MetricGraph& graph, const ConditionSet& conditions,
                             const QuantumMapSnapshot& snap,
                             const Eigen::PartialPivLU<ComplexMatrix>& lu) {
    ComplexMatrix du = quantum_map_derivative(graph, conditions, snap);
    const Complex tr = ComplexMatrix(lu.solve(du)).trace();
    if (std::abs(tr) == 0.0) return snap.k.real();
    return snap.k.real() + (1.0 / tr).real();
}

struct ChannelTag {
    std::string edge_id;
    int sign;  // +1 / -1 for bond directions, 0 for lead channels
    bool operator<(const ChannelTag& o) const {
        return std::tie(edge_id, sign) < std::tie(o.edge_id, o.sign);
    }
};

/// Permute the rows and columns of a General/Constant condition from the slot
/// layout of one graph to the layout of another, matching channels by tag.
/// `retag` may rewrite a tag before matching (used when a bond channel turns
/// into a lead channel or vice versa).
template <typename Retag>
VertexCondition remap_condition(const VertexCondition& cond,
                                const MetricGraph& old_graph, int old_vertex,
                                const MetricGraph& new_graph, int new_vertex, Retag&& retag) {
    if (cond.kind() != VertexCondition::Kind::General &&
        cond.kind() != VertexCondition::Kind::Constant) {
        return cond;
    }
    const auto& old_slots = old_graph.vertex_slots(old_vertex);
    const auto& new_slots = new_graph.vertex_slots(new_vertex);
    if (old_slots.size() != new_slots.size()) {
        throw ValidationError("vertex degree changed while remapping a condition");
    }
    const int d = static_cast<int>(old_slots.size());

    std::map<ChannelTag, int> old_position;
    for (int i = 0; i < d; ++i) {
        ChannelTag tag = retag(old_graph.edge(old_slots[i].edge).id, old_slots[i].sign);
        old_position[tag] = i;
    }
    std::vector<int> perm(d);
    for (int i = 0; i < d; ++i) {
        ChannelTag tag = retag(new_graph.edge(new_slots[i].edge).id, new_slots[i].sign);
        auto it = old_position.find(tag);
        if (it == old_position.end()) {
            throw ValidationError("channel mismatch while remapping a condition");
        }
        perm[i] = it->second;
    }

    auto permute = [&](const ComplexMatrix& m) {
        ComplexMatrix out(d, d);
        for (int i = 0; i < d; ++i) {
            for (int j = 0; j < d; ++j) {
                out(i, j) = m(perm[i], perm[j]);
            }
        }
        return out;
    };
    if (cond.kind() == VertexCondition::Kind::Constant) {
        return VertexCondition::constant(permute(cond.S()));
    }
    return VertexCondition::general(permute(cond.A()), permute(cond.B()));
}

}  // namespace

EnergyPoint EnergyPoint::from_energy(Complex E) {
    if (E == Complex(0.0, 0.0)) {
        throw DomainError("E = 0 is excluded");
    }
    if (!(E.real() > 0.0)) {
        throw DomainError("only the positive energy domain Re E > 0 is supported");
    }
    Complex k = std::sqrt(E);
    if (k.imag() < 0.0) k = -k;
    return EnergyPoint{E, k};
}

EnergyPoint EnergyPoint::from_wavenumber(Complex k) {
    if (k == Complex(0.0, 0.0)) {
        throw DomainError("k = 0 is excluded");
    }
    if (k.imag() < 0.0 || (k.imag() == 0.0 && k.real() < 0.0)) {
        throw DomainError("wave numbers must satisfy Im k > 0 or be real positive");
    }
    return EnergyPoint{k * k, k};
}

AuxiliaryGraph auxiliary_graph(const MetricGraph& graph, const ConditionSet& conditions,
                               int excited_edge) {
    if (excited_edge < 0 || excited_edge >= graph.num_edges()) {
        throw ValidationError("unknown excited edge");
    }
    const EdgeRecord& cut = graph.edge(excited_edge);
    if (cut.is_lead()) {
        throw ValidationError("the excited edge '" + cut.id + "' is a lead, not a bond");
    }

    AuxiliaryGraph aux;
    aux.cut_edge = excited_edge;
    aux.tail_lead_id = cut.id + "__tail";
    aux.head_lead_id = cut.id + "__head";

    GraphBuilder builder;
    for (const auto& v : graph.vertices()) {
        builder.add_vertex(v.id);
    }
    for (int e = 0; e < graph.num_edges(); ++e) {
        if (e == excited_edge) continue;
        const EdgeRecord& rec = graph.edge(e);
        if (rec.is_lead()) {
            builder.add_lead(rec.id, graph.vertices()[rec.v0].id);
        } else {
            builder.add_bond(rec.id, graph.vertices()[rec.v0].id, graph.vertices()[rec.v1].id,
                             rec.length);
        }
    }
    builder.add_lead(aux.tail_lead_id, graph.vertices()[cut.v0].id);
    builder.add_lead(aux.head_lead_id, graph.vertices()[cut.v1].id);
    aux.graph = builder.build();

    // The (e', -) channel at the tail vertex becomes the tail lead channel,
    // the (e', +) channel at the head vertex the head lead channel.
    auto retag = [&](const std::string& edge_id, int sign) -> ChannelTag {
        if (edge_id == cut.id && sign == -1) return ChannelTag{"__cut_tail", 0};
        if (edge_id == cut.id && sign == +1) return ChannelTag{"__cut_head", 0};
        if (edge_id == aux.tail_lead_id) return ChannelTag{"__cut_tail", 0};
        if (edge_id == aux.head_lead_id) return ChannelTag{"__cut_head", 0};
        return ChannelTag{edge_id, sign};
    };
    aux.conditions.reserve(conditions.size());
    for (int v = 0; v < graph.num_vertices(); ++v) {
        aux.conditions.push_back(remap_condition(conditions[v], graph, v, aux.graph, v, retag));
    }
    return aux;
}

GreensCoefficients greens_coefficients(const MetricGraph& graph, const ConditionSet& conditions,
                                       int excited_edge, double x_prime,
                                       const EnergyPoint& energy) {
    if (!graph.is_compact()) {
        throw DomainError("the three-step coefficients are defined for compact graphs");
    }
    const EdgeRecord& rec = graph.edge(excited_edge);
    if (rec.is_lead()) {
        throw ValidationError("excited edge must be a bond");
    }
    if (!(0.0 < x_prime && x_prime < rec.length)) {
        throw ValidationError("x' must lie strictly inside the excited bond");
    }

    const Complex k = energy.k;
    QuantumMapSnapshot snap = quantum_map(graph, conditions, k);
    const int n = graph.total_dim();
    Eigen::PartialPivLU<ComplexMatrix> lu(ComplexMatrix::Identity(n, n) - snap.U);
    if (energy.E.imag() == 0.0 && std::abs(lu.determinant()) < kPoleGuard) {
        throw PoleError("energy lies on the discrete spectrum",
                        nearest_root_estimate(graph, conditions, snap, lu));
    }

    const int ip = graph.directed_index(excited_edge, +1);
    const int im = graph.directed_index(excited_edge, -1);
    ComplexVector col_p = lu.solve(ComplexVector(ComplexVector::Unit(n, ip)));
    ComplexVector col_m = lu.solve(ComplexVector(ComplexVector::Unit(n, im)));

    const double l = rec.length;
    GreensCoefficients c;
    c.a_tail_in = (phase(k, x_prime) * col_m[im] + phase(k, l - x_prime) * col_p[im]) /
                  (2.0 * kI * k);
    c.a_head_in = (phase(k, l - x_prime) * col_p[ip] + phase(k, x_prime) * col_m[ip]) /
                  (2.0 * kI * k);
    return c;
}

GreensValue greens_compact(const MetricGraph& graph, const ConditionSet& conditions,
                           const GraphPoint& x, const GraphPoint& x_prime,
                           const EnergyPoint& energy) {
    if (!graph.is_compact()) {
        throw DomainError("greens_compact requires a compact graph");
    }
    graph.locate(x);
    graph.locate(x_prime);

    const Complex k = energy.k;
    QuantumMapSnapshot snap = quantum_map(graph, conditions, k);
    const int n = graph.total_dim();
    Eigen::PartialPivLU<ComplexMatrix> lu(ComplexMatrix::Identity(n, n) - snap.U);
    if (energy.E.imag() == 0.0 && std::abs(lu.determinant()) < kPoleGuard) {
        throw PoleError("energy lies on the discrete spectrum",
                        nearest_root_estimate(graph, conditions, snap, lu));
    }

    const int sp = graph.directed_index(x_prime.edge, +1);
    const int sm = graph.directed_index(x_prime.edge, -1);
    ComplexVector col_p = lu.solve(ComplexVector(ComplexVector::Unit(n, sp)));
    ComplexVector col_m = lu.solve(ComplexVector(ComplexVector::Unit(n, sm)));

    const int tp = graph.directed_index(x.edge, +1);
    const int tm = graph.directed_index(x.edge, -1);
    // R = U (I - U)^{-1} = (I - U)^{-1} - I.
    const Complex r_pp = col_p[tp] - Complex(tp == sp ? 1.0 : 0.0);
    const Complex r_mm = col_m[tm] - Complex(tm == sm ? 1.0 : 0.0);
    const Complex r_pm = col_m[tp] - Complex(tp == sm ? 1.0 : 0.0);
    const Complex r_mp = col_p[tm] - Complex(tm == sp ? 1.0 : 0.0);

    const double le = graph.length(x.edge);
    const double lp = graph.length(x_prime.edge);
    Complex sum = 0.0;
    if (x.edge == x_prime.edge) {
        sum += phase(k, std::abs(x.x - x_prime.x));
    }
    sum += phase(k, x.x - x_prime.x - le + lp) * r_pp;
    sum += phase(k, -(x.x - x_prime.x)) * r_mm;
    sum += phase(k, x.x + x_prime.x - le) * r_pm;
    sum += phase(k, -(x.x + x_prime.x - lp)) * r_mp;

    GreensValue value;
    value.value = sum / (2.0 * kI * k);
    value.target = x;
    value.source = x_prime;
    value.energy = energy;
    value.kind = GreensCase::Compact;
    return value;
}

GreensValue greens_open(const MetricGraph& graph, const ConditionSet& conditions,
                        const GraphPoint& x, const GraphPoint& x_prime,
                        const EnergyPoint& energy) {
    if (graph.is_compact()) {
        throw DomainError("greens_open requires an open graph");
    }
    graph.locate(x);
    graph.locate(x_prime);

    const Complex k = energy.k;
    const bool x_lead = graph.edge(x.edge).is_lead();
    const bool xp_lead = graph.edge(x_prime.edge).is_lead();

    GreensValue value;
    value.target = x;
    value.source = x_prime;
    value.energy = energy;

    if (x_lead && xp_lead) {
        ScatteringOptions opts;
        opts.on_scar = ScarPolicy::Regularize;
        ScatteringResult sr = scattering_matrix(graph, conditions, k, opts);
        const int le = graph.lead_index(x.edge);
        const int lp = graph.lead_index(x_prime.edge);
        Complex sum = 0.0;
        if (x.edge == x_prime.edge) {
            sum += phase(k, std::abs(x.x - x_prime.x));
        }
        sum += phase(k, x.x + x_prime.x) * sr.sigma(le, lp);
        value.value = sum / (2.0 * kI * k);
        value.kind = GreensCase::LeadLead;
        value.regularized = sr.regularized;
        return value;
    }

    QuantumMapSnapshot snap = quantum_map(graph, conditions, k);
    const int nb = graph.bond_dim();

    // At a scar wavenumber (real axis) the plain resolvent does not exist;
    // with one point on a lead the value stays finite and is evaluated through
    // the Q-projected solve. Both points on bonds sit on a true pole.
    std::optional<ScarBasis> scar;
    if (k.imag() == 0.0 && nb > 0) {
        scar = detect_scar(graph, conditions, k.real());
    }
    if (scar && !x_lead && !xp_lead) {
        throw PoleError(
            "Green's function has a pole: bound state at this energy and both points on bonds",
            scar->k0);
    }

    Eigen::PartialPivLU<ComplexMatrix> lu;
    std::optional<ProjectedSolver> projected;
    if (scar) {
        projected.emplace(ComplexMatrix(ComplexMatrix::Identity(nb, nb) - snap.U_BB), scar->b);
        value.regularized = true;
    } else {
        lu.compute(ComplexMatrix::Identity(nb, nb) - snap.U_BB);
    }

    if (x_lead && !xp_lead) {
        // W = U_LB (I - U_BB)^{-1}, row of the target lead.
        const int le = graph.lead_index(x.edge);
        ComplexVector row;
        if (projected) {
            row = (snap.U_LB * projected->inverse()).row(le).transpose();
        } else {
            row = lu.transpose().solve(ComplexVector(snap.U_LB.row(le).transpose()));
        }
        const int sp = graph.directed_index(x_prime.edge, +1);
        const int sm = graph.directed_index(x_prime.edge, -1);
        const double lp = graph.length(x_prime.edge);
        Complex sum = phase(k, x.x - x_prime.x + lp) * row[sp];
        sum += phase(k, x.x + x_prime.x) * row[sm];
        value.value = sum / (2.0 * kI * k);
        value.kind = GreensCase::LeadBond;
        return value;
    }

    if (!x_lead && xp_lead) {
        // V = (I - U_BB)^{-1} U_BL, column of the source lead.
        const int lp = graph.lead_index(x_prime.edge);
        ComplexVector col;
        if (projected) {
            col = projected->solve(ComplexVector(snap.U_BL.col(lp)));
        } else {
            col = lu.solve(ComplexVector(snap.U_BL.col(lp)));
        }
        const int tp = graph.directed_index(x.edge, +1);
        const int tm = graph.directed_index(x.edge, -1);
        const double le = graph.length(x.edge);
        Complex sum = phase(k, -(x.x - x_prime.x)) * col[tm];
        sum += phase(k, x.x + x_prime.x - le) * col[tp];
        value.value = sum / (2.0 * kI * k);
        value.kind = GreensCase::BondLead;
        return value;
    }

    // Both points on bonds; scar-free here. W2 = U_BB (I - U_BB)^{-1}.
    const int sp = graph.directed_index(x_prime.edge, +1);
    const int sm = graph.directed_index(x_prime.edge, -1);
    ComplexVector col_p = lu.solve(ComplexVector(snap.U_BB.col(sp)));
    ComplexVector col_m = lu.solve(ComplexVector(snap.U_BB.col(sm)));

    const int tp = graph.directed_index(x.edge, +1);
    const int tm = graph.directed_index(x.edge, -1);
    const double le = graph.length(x.edge);
    const double lp = graph.length(x_prime.edge);
    Complex sum = 0.0;
    if (x.edge == x_prime.edge) {
        sum += phase(k, std::abs(x.x - x_prime.x));
    }
    sum += phase(k, x.x - x_prime.x - le + lp) * col_p[tp];
    sum += phase(k, -(x.x - x_prime.x)) * col_m[tm];
    sum += phase(k, x.x + x_prime.x - le) * col_m[tp];
    sum += phase(k, -(x.x + x_prime.x - lp)) * col_p[tm];
    value.value = sum / (2.0 * kI * k);
    value.kind = GreensCase::BondBond;
    return value;
}

GreensValue greens(const MetricGraph& graph, const ConditionSet& conditions, const GraphPoint& x,
                   const GraphPoint& x_prime, const EnergyPoint& energy) {
    return graph.is_compact() ? greens_compact(graph, conditions, x, x_prime, energy)
                              : greens_open(graph, conditions, x, x_prime, energy);
}

}  // namespace qgraph
