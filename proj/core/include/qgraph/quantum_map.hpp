#pragma once

#include "qgraph/graph.hpp"
#include "qgraph/types.hpp"
#include "qgraph/vertex_conditions.hpp"

namespace qgraph {

/// Everything the wave-number-dependent machinery needs at a single k:
/// the full quantum map U(k) = T(k) Sigma(k) in the canonical layout
/// [directed bonds | leads], the edge scattering matrix, the bond phase
/// diagonal, and the four blocks used by open-graph formulas. For compact
/// graphs the lead blocks are empty and U_BB is all of U.
struct QuantumMapSnapshot {
    Complex k;
    ComplexMatrix U;       // (2N_B + N_L) square
    ComplexMatrix Sigma;   // same dimension
    ComplexVector T;       // diag of e^{ik l_e} over directed bonds (size 2N_B)
    ComplexMatrix U_BB;    // 2N_B x 2N_B
    ComplexMatrix U_BL;    // 2N_B x N_L
    ComplexMatrix U_LB;    // N_L x 2N_B
    ComplexMatrix U_LL;    // N_L x N_L
};

/// Full edge scattering matrix Sigma(k): the direction-swap permutation (acting
/// on bonds only) applied to the block-diagonal of vertex scattering matrices.
ComplexMatrix edge_scattering(const MetricGraph& graph, const ConditionSet& conditions,
                              Complex k);

/// Assemble U(k) and its blocks. Validates every condition against its vertex
/// degree; throws DomainError for k = 0.
QuantumMapSnapshot quantum_map(const MetricGraph& graph, const ConditionSet& conditions,
                               Complex k);

/// Closed-form derivative dU/dk. Compact graphs:
///   dU/dk = i L U + [e^{ikL} Pi - U e^{-ikL} Pi U] / (2k);
/// open graphs use the same expression with the bond-sector factors padded by
/// the identity on leads.
ComplexMatrix quantum_map_derivative(const MetricGraph& graph, const ConditionSet& conditions,
                                     Complex k);
ComplexMatrix quantum_map_derivative(const MetricGraph& graph, const ConditionSet& conditions,
                                     const QuantumMapSnapshot& snap);

}  // namespace qgraph
