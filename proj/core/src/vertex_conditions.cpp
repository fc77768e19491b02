#include "qgraph/vertex_conditions.hpp"

#include <Eigen/SVD>

#include "qgraph/errors.hpp"

namespace qgraph {

namespace {

constexpr double kHermiticityTol = 1e-12;    // absolute, on max entry of AB^dag - (AB^dag)^dag
constexpr double kRankThresholdRel = 1e-10;  // on singular values, relative to the largest
constexpr double kUnitarityTol = 1e-10;      // for prescribed constant matrices

double max_abs(const ComplexMatrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

}  // namespace

VertexCondition VertexCondition::general(ComplexMatrix A, ComplexMatrix B) {
    VertexCondition c(Kind::General);
    c.A_ = std::move(A);
    c.B_ = std::move(B);
    return c;
}

VertexCondition VertexCondition::constant(ComplexMatrix S) {
    VertexCondition c(Kind::Constant);
    c.S_ = std::move(S);
    return c;
}

void validate_condition(const VertexCondition& cond, int degree) {
    if (degree < 1) {
        throw ValidationError("vertex degree must be at least 1");
    }
    switch (cond.kind()) {
        case VertexCondition::Kind::NeumannKirchhoff:
        case VertexCondition::Kind::Dirichlet:
            return;
        case VertexCondition::Kind::Constant: {
            const ComplexMatrix& S = cond.S();
            if (S.rows() != degree || S.cols() != degree) {
                throw ValidationError("prescribed scattering matrix has wrong dimension");
            }
            ComplexMatrix defect = S.adjoint() * S - ComplexMatrix::Identity(degree, degree);
            if (max_abs(defect) > kUnitarityTol) {
                throw ValidationError("prescribed scattering matrix is not unitary");
            }
            return;
        }
        case VertexCondition::Kind::General:
            break;
    }

    const ComplexMatrix& A = cond.A();
    const ComplexMatrix& B = cond.B();
    if (A.rows() != degree || A.cols() != degree || B.rows() != degree || B.cols() != degree) {
        throw ValidationError("condition matrices must be d x d for vertex degree d");
    }

    ComplexMatrix AB = A * B.adjoint();
    if (max_abs(ComplexMatrix(AB - AB.adjoint())) > kHermiticityTol) {
        throw ValidationError("A B^dagger is not Hermitian; condition is not self-adjoint");
    }

    ComplexMatrix stacked(degree, 2 * degree);
    stacked << A, B;
    Eigen::JacobiSVD<ComplexMatrix> svd(stacked);
    const auto& sv = svd.singularValues();
    if (sv(0) <= 0.0 || sv(degree - 1) < kRankThresholdRel * sv(0)) {
        throw ValidationError("(A, B) does not have full rank d; condition is not self-adjoint");
    }
}

ComplexMatrix vertex_sigma(const VertexCondition& cond, Complex k, int degree) {
    const Complex I(0.0, 1.0);
    switch (cond.kind()) {
        case VertexCondition::Kind::NeumannKirchhoff: {
            ComplexMatrix S = ComplexMatrix::Constant(degree, degree, Complex(2.0 / degree, 0.0));
            S.diagonal().array() -= Complex(1.0, 0.0);
            return S;
        }
        case VertexCondition::Kind::Dirichlet:
            return -ComplexMatrix::Identity(degree, degree);
        case VertexCondition::Kind::Constant:
            return cond.S();
        case VertexCondition::Kind::General:
            break;
    }

    if (k == Complex(0.0, 0.0)) {
        throw DomainError("k = 0 is excluded for general vertex conditions");
    }
    ComplexMatrix M = cond.A() + I * k * cond.B();
    Eigen::FullPivLU<ComplexMatrix> lu(M);
    if (!lu.isInvertible()) {
        throw DomainError("A + ikB is singular; condition invalid or k on the excluded set");
    }
    return -lu.solve(ComplexMatrix(cond.A() - I * k * cond.B()));
}

ComplexMatrix vertex_sigma_derivative(const VertexCondition& cond, Complex k, int degree) {
    if (cond.k_independent()) {
        return ComplexMatrix::Zero(degree, degree);
    }
    ComplexMatrix S = vertex_sigma(cond, k, degree);
    return (ComplexMatrix::Identity(degree, degree) - S * S) / (2.0 * k);
}

}  // namespace qgraph
