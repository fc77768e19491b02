#pragma once

#include <vector>

#include "qgraph/types.hpp"

namespace qgraph {

/// Self-adjoint vertex matching condition. Either one of the named shortcuts
/// or a general (A, B) pair acting on the wavefunction values and outward
/// derivatives at the vertex:  A psi + B psi' = 0.
///
/// Rows and columns of general matrices follow the vertex slot layout of the
/// graph (MetricGraph::vertex_slots): bond channels by canonical directed
/// index, then lead channels.
///
/// The Constant variant prescribes a fixed scattering matrix directly. It is
/// accepted for effective models but bypasses the self-adjointness check; it
/// is only validated to be unitary and is flagged via `prescribed()`.
class VertexCondition {
public:
    enum class Kind { NeumannKirchhoff, Dirichlet, General, Constant };

    static VertexCondition neumann_kirchhoff() { return VertexCondition(Kind::NeumannKirchhoff); }
    static VertexCondition dirichlet() { return VertexCondition(Kind::Dirichlet); }
    static VertexCondition general(ComplexMatrix A, ComplexMatrix B);
    static VertexCondition constant(ComplexMatrix S);

    Kind kind() const { return kind_; }
    const ComplexMatrix& A() const { return A_; }
    const ComplexMatrix& B() const { return B_; }
    const ComplexMatrix& S() const { return S_; }

    /// True when the scattering matrix does not depend on the wave number.
    bool k_independent() const { return kind_ != Kind::General; }
    /// True for prescribed constant matrices that bypass the (A, B) check.
    bool prescribed() const { return kind_ == Kind::Constant; }

private:
    explicit VertexCondition(Kind k) : kind_(k) {}
    Kind kind_;
    ComplexMatrix A_, B_, S_;
};

/// One condition per vertex, indexed like MetricGraph::vertices().
using ConditionSet = std::vector<VertexCondition>;

/// Check that a condition defines a self-adjoint problem at a vertex of the
/// given degree: (A, B) stacked horizontally has full rank d and A B^dagger is
/// Hermitian. Constant matrices are checked for unitarity instead. Throws
/// ValidationError.
void validate_condition(const VertexCondition& cond, int degree);

/// Vertex scattering matrix Sigma(k) = -(A + ikB)^{-1} (A - ikB), or the
/// k-independent matrix for the named variants. Unitary for real k.
ComplexMatrix vertex_sigma(const VertexCondition& cond, Complex k, int degree);

/// dSigma/dk = (I - Sigma(k)^2) / (2k); identically zero for k-independent
/// conditions.
ComplexMatrix vertex_sigma_derivative(const VertexCondition& cond, Complex k, int degree);

}  // namespace qgraph
