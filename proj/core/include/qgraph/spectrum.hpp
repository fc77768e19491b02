#pragma once

#include <vector>

#include "qgraph/graph.hpp"
#include "qgraph/quantum_map.hpp"
#include "qgraph/types.hpp"
#include "qgraph/vertex_conditions.hpp"

namespace qgraph {

/// An eigen-wavenumber of a compact graph. `eigenvector` and `normalization`
/// are filled by eigenvector_and_normalization for simple roots; the
/// normalization constant is
///   C = b^dag [L + sin(kL) Pi / k] b = (1/i) b^dag (dU/dk) b > 0,
/// the residue constant that makes the projection kernel trace one.
struct SpectralRoot {
    double k = 0.0;
    int multiplicity = 1;
    ComplexVector eigenvector;    // empty until extracted
    double normalization = 0.0;   // 0 until extracted
};

struct EigenvalueSearchOptions {
    double tol = 1e-10;    // target |dk| accuracy of every root
    double scan_step = 0;  // 0: pi / (4 * total bond length)
    /// Re-run the scan at half the step and require the same root set;
    /// mismatch throws ScanError ("scan step too coarse").
    bool check_refinement = true;
};

/// Secular function xi(k) = det(I - U(k)). Compact graphs only.
Complex secular(const MetricGraph& graph, const ConditionSet& conditions, Complex k);

/// All zeros of the secular function in [k_min, k_max], located to |dk| <= tol,
/// with multiplicities from the singular values of I - U(k_n). Requires
/// 0 < k_min < k_max.
std::vector<SpectralRoot> find_eigenvalues(const MetricGraph& graph,
                                           const ConditionSet& conditions, double k_min,
                                           double k_max,
                                           const EigenvalueSearchOptions& options = {});

/// Unit eigenvector of U(k_n) with eigenvalue 1 and the normalization constant
/// C for a simple root. Throws DegeneracyError for multiple roots and
/// DomainError when k_n is not a root to tolerance.
SpectralRoot eigenvector_and_normalization(const MetricGraph& graph,
                                           const ConditionSet& conditions, double k_n);

/// Integral kernel of the projector onto a simple eigenstate,
///   P_n(x, x') = psi(x) conj(psi(x')) / C,
/// with psi built from the eigenvector amplitudes. Hermitian and
/// trace-normalized to one.
class ProjectionKernel {
public:
    ProjectionKernel(MetricGraph graph, SpectralRoot root);

    Complex operator()(const GraphPoint& x, const GraphPoint& x_prime) const;
    /// The (non-normalized) eigenfunction psi at a point.
    Complex eigenfunction(const GraphPoint& p) const;
    /// Sum over edges of the integral of P_n(x, x) along the edge;
    /// equals 1 for a correctly normalized kernel.
    double trace(int nodes_per_edge = 64) const;

    const SpectralRoot& root() const { return root_; }

private:
    MetricGraph graph_;
    SpectralRoot root_;
};

ProjectionKernel projection_kernel(const SpectralRoot& root, const MetricGraph& graph);

}  // namespace qgraph
