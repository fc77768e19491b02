#pragma once

#include <optional>
#include <utility>
#include <vector>

#include <Eigen/LU>

#include "qgraph/errors.hpp"
#include "qgraph/graph.hpp"
#include "qgraph/quantum_map.hpp"
#include "qgraph/types.hpp"
#include "qgraph/vertex_conditions.hpp"

namespace qgraph {

/// A perfect scar (bound state in the continuum): unit eigenvector b of
/// U_BB(k0) with eigenvalue one. Unitarity of the full quantum map forces
/// U_LB b = 0 and b^dag U_BL = 0, so the state is decoupled from every lead.
struct ScarBasis {
    double k0 = 0.0;
    ComplexVector b;
    double eigenvalue_distance = 0.0;  // |lambda - 1| at detection

    /// Rank-one projector P = b b^dag.
    ComplexMatrix projector() const { return b * b.adjoint(); }
};

/// Thrown when a scar makes I - U_BB singular and the caller asked for the
/// plain (unregularized) solve.
class ScarPresentError : public DomainError {
public:
    ScarPresentError(const std::string& message, ScarBasis basis)
        : DomainError(message), scar(std::move(basis)) {}
    ScarBasis scar;
};

struct ScatteringResult {
    Complex k;
    ComplexMatrix sigma;  // N_L x N_L, unitary at real k
    ComplexMatrix rho;    // 2N_B x N_L
    bool regularized = false;
    bool conditioning_warning = false;
    std::optional<ScarBasis> scar;
};

enum class ScarPolicy {
    Throw,       // raise ScarPresentError at a scar wavenumber
    Regularize,  // switch to the projector-regularized evaluation
};

struct ScatteringOptions {
    /// |lambda - 1| at or below this counts as a scar.
    double scar_tol = 1e-8;
    /// |lambda - 1| in (scar_tol, near_scar_band]: the solve is deflated
    /// against the near-unit eigenvector and a conditioning warning is set.
    double near_scar_band = 1e-4;
    ScarPolicy on_scar = ScarPolicy::Throw;
};

/// Graph scattering matrix sigma(k) = U_LL + U_LB (I - U_BB)^{-1} U_BL and
/// the internal amplitudes rho(k) = (I - U_BB)^{-1} U_BL. Open graphs only.
ScatteringResult scattering_matrix(const MetricGraph& graph, const ConditionSet& conditions,
                                   Complex k, const ScatteringOptions& options = {});

/// Same evaluation as scattering_matrix (the two share one linear solve);
/// provided for callers interested in the bond amplitudes.
ScatteringResult internal_amplitudes(const MetricGraph& graph, const ConditionSet& conditions,
                                     Complex k, const ScatteringOptions& options = {});

/// Look for a non-degenerate unit eigenvalue of U_BB at real k > 0. Returns
/// the scar basis with verified lead decoupling, or nullopt. Throws
/// DegeneracyError when the near-unit eigenspace has dimension > 1.
std::optional<ScarBasis> detect_scar(const MetricGraph& graph, const ConditionSet& conditions,
                                     double k, double tol = 1e-8);

/// Scattering matrix at a scar wavenumber via the reduced resolvent:
///   sigma(k0) = U_LL + U_LB Y_Q^{-1} U_BL,
/// where Y_Q^{-1} inverts Q (I - U_BB) Q on the orthogonal complement of b.
ScatteringResult regularized_scattering(const MetricGraph& graph, const ConditionSet& conditions,
                                        const ScarBasis& scar);

/// The two components of the regularized internal amplitudes at k0:
/// P rho(k0) from the leading-order expansion (the simplified expression when
/// every condition is k-independent) and Q rho(k0) = Y_Q^{-1} U_BB P rho +
/// Y_Q^{-1} U_BL. Their sum is the continuous limit of rho(k) as k -> k0.
std::pair<ComplexMatrix, ComplexMatrix> regularized_internal(const MetricGraph& graph,
                                                             const ConditionSet& conditions,
                                                             const ScarBasis& scar);

/// Grid scan for scar wavenumbers in [k_min, k_max].
std::vector<ScarBasis> find_scars(const MetricGraph& graph, const ConditionSet& conditions,
                                  double k_min, double k_max, double tol = 1e-8,
                                  double scan_step = 0);

/// Solve within the orthogonal complement of a fixed unit vector b:
/// application of Y_Q^{-1} = Q (I - Q M_inner Q)^{-1} Q without forming a
/// pseudo-inverse. Realized by a Householder reflector taking b onto a
/// coordinate axis followed by an LU solve in the reduced coordinates.
class ProjectedSolver {
public:
    /// M is the full matrix (here I - U_BB); b the deflated direction.
    ProjectedSolver(const ComplexMatrix& M, const ComplexVector& b);

    ComplexMatrix solve(const ComplexMatrix& rhs) const;
    ComplexVector solve(const ComplexVector& rhs) const;
    /// Explicit Y_Q^{-1}; satisfies Y_Q^{-1} Y_Q = Q and P Y_Q^{-1} = 0.
    ComplexMatrix inverse() const;

private:
    int n_;
    ComplexMatrix householder_;
    Eigen::PartialPivLU<ComplexMatrix> reduced_lu_;
};

}  // namespace qgraph
