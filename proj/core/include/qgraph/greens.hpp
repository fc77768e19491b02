#pragma once

#include <string>

#include "qgraph/graph.hpp"
#include "qgraph/quantum_map.hpp"
#include "qgraph/scattering.hpp"
#include "qgraph/types.hpp"
#include "qgraph/vertex_conditions.hpp"

namespace qgraph {

/// Energy and its wave number on the physical branch: k is the square root of
/// E with Im k > 0 for complex E, and the positive real root for real E > 0
/// (the limit from the upper half plane). Only Re E > 0 is supported.
struct EnergyPoint {
    Complex E;
    Complex k;

    static EnergyPoint from_energy(Complex E);
    /// k must satisfy Im k > 0, or be real and positive.
    static EnergyPoint from_wavenumber(Complex k);
};

enum class GreensCase { Compact, LeadLead, LeadBond, BondLead, BondBond };

struct GreensValue {
    Complex value;
    GraphPoint target;  // x
    GraphPoint source;  // x'
    EnergyPoint energy;
    GreensCase kind = GreensCase::Compact;
    bool regularized = false;
};

/// The open graph obtained by cutting a bond e' and attaching the tail lead
/// (at the x = 0 vertex) and head lead (at the x = length vertex) in its
/// place. Conditions are carried over with their slot layout permuted to the
/// new graph, so general (A, B) matrices keep their meaning.
struct AuxiliaryGraph {
    MetricGraph graph;
    ConditionSet conditions;
    std::string tail_lead_id;
    std::string head_lead_id;
    int cut_edge = -1;  // edge index in the source graph
};

AuxiliaryGraph auxiliary_graph(const MetricGraph& graph, const ConditionSet& conditions,
                               int excited_edge);

/// Incoming amplitudes on the two auxiliary leads that glue the scattering
/// solution into the Green's function with a unit derivative jump at x'.
struct GreensCoefficients {
    Complex a_tail_in;
    Complex a_head_in;
};

/// Coefficients via the resolvent of the full quantum map; requires x'
/// strictly inside the bond. Compact graphs only.
GreensCoefficients greens_coefficients(const MetricGraph& graph, const ConditionSet& conditions,
                                       int excited_edge, double x_prime, const EnergyPoint& energy);

/// Closed-form Green's function of a compact graph. Throws PoleError when the
/// energy is real and indistinguishable from the discrete spectrum.
GreensValue greens_compact(const MetricGraph& graph, const ConditionSet& conditions,
                           const GraphPoint& x, const GraphPoint& x_prime,
                           const EnergyPoint& energy);

/// Closed-form Green's function of an open graph (four placement cases). At a
/// scar wavenumber the resolvent factors are evaluated through the
/// Q-projected regularized solve whenever at least one point lies on a lead;
/// with both points on bonds the value is a true pole and PoleError is thrown.
GreensValue greens_open(const MetricGraph& graph, const ConditionSet& conditions,
                        const GraphPoint& x, const GraphPoint& x_prime,
                        const EnergyPoint& energy);

/// Dispatch on graph.is_compact().
GreensValue greens(const MetricGraph& graph, const ConditionSet& conditions, const GraphPoint& x,
                   const GraphPoint& x_prime, const EnergyPoint& energy);

}  // namespace qgraph
