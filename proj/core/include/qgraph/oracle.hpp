#pragma once

#include "qgraph/graph.hpp"
#include "qgraph/greens.hpp"
#include "qgraph/types.hpp"
#include "qgraph/vertex_conditions.hpp"

namespace qgraph {

/// Green's function with every resolvent factor replaced by the truncated
/// Neumann series sum_{n<=N} U^n: the sum over all scattering paths with at
/// most N vertex events, accumulated through matrix powers. Requires
/// Im k > 0; the truncation error is geometric in the operator norm of the
/// propagating block.
GreensValue path_sum_greens(const MetricGraph& graph, const ConditionSet& conditions,
                            const GraphPoint& x, const GraphPoint& x_prime,
                            const EnergyPoint& energy, int order);

enum class DanglingCondition { Dirichlet, Neumann };

/// Replace every lead of an open graph by a bond of length `lead_length`
/// ending in a dangling degree-one vertex with the given condition, and
/// evaluate the compact-graph Green's function there. For Im k > 0 this
/// converges to the open-graph value as the length grows, at rate
/// e^{-2 Im k length}, independently of the dangling condition.
GreensValue auxiliary_limit_greens(const MetricGraph& graph, const ConditionSet& conditions,
                                   const GraphPoint& x, const GraphPoint& x_prime,
                                   const EnergyPoint& energy, double lead_length,
                                   DanglingCondition dangling);

}  // namespace qgraph
