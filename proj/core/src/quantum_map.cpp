#include "qgraph/quantum_map.hpp"

#include <cmath>

#include "qgraph/errors.hpp"

namespace qgraph {

namespace {

const Complex kI(0.0, 1.0);

void check_conditions(const MetricGraph& graph, const ConditionSet& conditions) {
    if (static_cast<int>(conditions.size()) != graph.num_vertices()) {
        throw ValidationError("need exactly one vertex condition per vertex");
    }
    for (int v = 0; v < graph.num_vertices(); ++v) {
        validate_condition(conditions[v], graph.degree(v));
    }
}

}  // namespace

ComplexMatrix edge_scattering(const MetricGraph& graph, const ConditionSet& conditions,
                              Complex k) {
    check_conditions(graph, conditions);

    const int n = graph.total_dim();
    const int nb = graph.bond_dim();

    // Block diagonal of vertex scattering matrices in the arrival-slot basis.
    ComplexMatrix hat = ComplexMatrix::Zero(n, n);
    for (int v = 0; v < graph.num_vertices(); ++v) {
        const auto& slots = graph.vertex_slots(v);
        const int d = static_cast<int>(slots.size());
        ComplexMatrix sv = vertex_sigma(conditions[v], k, d);
        for (int i = 0; i < d; ++i) {
            for (int j = 0; j < d; ++j) {
                hat(slots[i].global_index, slots[j].global_index) = sv(i, j);
            }
        }
    }

    // Sigma = Pi * hat, with Pi swapping the two directions of each bond and
    // acting as the identity on leads.
    ComplexMatrix sigma(n, n);
    const auto& swap = graph.direction_swap();
    for (int row = 0; row < nb; ++row) {
        sigma.row(row) = hat.row(swap[row]);
    }
    for (int row = nb; row < n; ++row) {
        sigma.row(row) = hat.row(row);
    }
    return sigma;
}

QuantumMapSnapshot quantum_map(const MetricGraph& graph, const ConditionSet& conditions,
                               Complex k) {
    if (k == Complex(0.0, 0.0)) {
        throw DomainError("k = 0 is excluded");
    }

    QuantumMapSnapshot snap;
    snap.k = k;
    snap.Sigma = edge_scattering(graph, conditions, k);

    const int nb = graph.bond_dim();
    const int nl = graph.num_leads();

    snap.T.resize(nb);
    for (int a = 0; a < nb; ++a) {
        snap.T[a] = std::exp(kI * k * graph.directed_lengths()[a]);
    }

    snap.U = snap.Sigma;
    for (int a = 0; a < nb; ++a) {
        snap.U.row(a) *= snap.T[a];
    }

    snap.U_BB = snap.U.topLeftCorner(nb, nb);
    snap.U_BL = snap.U.topRightCorner(nb, nl);
    snap.U_LB = snap.U.bottomLeftCorner(nl, nb);
    snap.U_LL = snap.U.bottomRightCorner(nl, nl);
    return snap;
}

ComplexMatrix quantum_map_derivative(const MetricGraph& graph, const ConditionSet& conditions,
                                     Complex k) {
    return quantum_map_derivative(graph, conditions, quantum_map(graph, conditions, k));
}

ComplexMatrix quantum_map_derivative(const MetricGraph& graph, const ConditionSet& conditions,
                                     const QuantumMapSnapshot& snap) {
    const Complex k = snap.k;
    const int n = graph.total_dim();
    const int nb = graph.bond_dim();
    const auto& swap = graph.direction_swap();
    const auto& len = graph.directed_lengths();

    // i L U, with L acting on the bond sector only.
    ComplexMatrix d = ComplexMatrix::Zero(n, n);
    for (int a = 0; a < nb; ++a) {
        d.row(a) = kI * len[a] * snap.U.row(a);
    }

    // T Pi dSigma_hat/dk, assembled vertex by vertex. For conditions derived
    // from (A, B) pairs this reproduces the closed form
    // [e^{ikL} Pi - U e^{-ikL} Pi U] / (2k); for k-independent conditions the
    // term is exactly zero.
    bool any_k_dependent = false;
    for (const auto& cond : conditions) {
        if (!cond.k_independent()) {
            any_k_dependent = true;
            break;
        }
    }
    if (any_k_dependent) {
        ComplexMatrix hat_deriv = ComplexMatrix::Zero(n, n);
        for (int v = 0; v < graph.num_vertices(); ++v) {
            if (conditions[v].k_independent()) continue;
            const auto& slots = graph.vertex_slots(v);
            const int dv = static_cast<int>(slots.size());
            ComplexMatrix sd = vertex_sigma_derivative(conditions[v], k, dv);
            for (int i = 0; i < dv; ++i) {
                for (int j = 0; j < dv; ++j) {
                    hat_deriv(slots[i].global_index, slots[j].global_index) = sd(i, j);
                }
            }
        }
        for (int row = 0; row < nb; ++row) {
            d.row(row) += snap.T[row] * hat_deriv.row(swap[row]);
        }
        for (int row = nb; row < n; ++row) {
            d.row(row) += hat_deriv.row(row);
        }
    }
    return d;
}

}  // namespace qgraph
