#pragma once

// Shared fixtures and independent analytic references for the test suites.
// Closed-form expressions here are derived by hand (interval and half-line
// kernels, lasso and 3-star scattering data) and stay independent of the
// library's evaluation path.

#include <cmath>
#include <random>

#include "qgraph/graph.hpp"
#include "qgraph/greens.hpp"
#include "qgraph/quantum_map.hpp"
#include "qgraph/scattering.hpp"
#include "qgraph/spectrum.hpp"
#include "qgraph/vertex_conditions.hpp"

namespace qtest {

using namespace qgraph;

inline const Complex I(0.0, 1.0);

struct Fixture {
    MetricGraph graph;
    ConditionSet conditions;
};

/// Single bond of length l, Dirichlet at both ends.
inline Fixture make_interval(double l = M_PI) {
    GraphBuilder b;
    b.add_vertex("v1").add_vertex("v2").add_bond("e1", "v1", "v2", l);
    return {b.build(), {VertexCondition::dirichlet(), VertexCondition::dirichlet()}};
}

/// Single loop of length l with one Neumann-Kirchhoff vertex.
inline Fixture make_loop(double l) {
    GraphBuilder b;
    b.add_vertex("v1").add_bond("e1", "v1", "v1", l);
    return {b.build(), {VertexCondition::neumann_kirchhoff()}};
}

/// Lead e1 plus loop e2 of length l2, all at one Neumann-Kirchhoff vertex.
inline Fixture make_lasso(double l2 = 1.0) {
    GraphBuilder b;
    b.add_vertex("v1").add_lead("e1", "v1").add_bond("e2", "v1", "v1", l2);
    return {b.build(), {VertexCondition::neumann_kirchhoff()}};
}

/// 3-star with one lead: Neumann-Kirchhoff center, Dirichlet tips.
inline Fixture make_star3(double l2 = 1.0, double l3 = std::sqrt(2.0)) {
    GraphBuilder b;
    b.add_vertex("v1").add_vertex("v2").add_vertex("v3");
    b.add_lead("e1", "v1").add_bond("e2", "v1", "v2", l2).add_bond("e3", "v1", "v3", l3);
    return {b.build(),
            {VertexCondition::neumann_kirchhoff(), VertexCondition::dirichlet(),
             VertexCondition::dirichlet()}};
}

/// Path v1 - v2 - v3 with Neumann-Kirchhoff everywhere (degree-one NK ends
/// are Neumann ends).
inline Fixture make_chain2(double l1 = 1.0, double l2 = 1.0) {
    GraphBuilder b;
    b.add_vertex("v1").add_vertex("v2").add_vertex("v3");
    b.add_bond("e1", "v1", "v2", l1).add_bond("e2", "v2", "v3", l2);
    return {b.build(),
            {VertexCondition::neumann_kirchhoff(), VertexCondition::neumann_kirchhoff(),
             VertexCondition::neumann_kirchhoff()}};
}

/// Path v1 - v2 - v3 with Dirichlet ends; equivalent to an interval of
/// length l1 + l2.
inline Fixture make_chain2_dirichlet(double l1 = 1.0, double l2 = 1.0) {
    GraphBuilder b;
    b.add_vertex("v1").add_vertex("v2").add_vertex("v3");
    b.add_bond("e1", "v1", "v2", l1).add_bond("e2", "v2", "v3", l2);
    return {b.build(),
            {VertexCondition::dirichlet(), VertexCondition::neumann_kirchhoff(),
             VertexCondition::dirichlet()}};
}

inline ComplexMatrix random_unitary(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss;
    ComplexMatrix a(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            a(i, j) = Complex(gauss(rng), gauss(rng));
        }
    }
    Eigen::HouseholderQR<ComplexMatrix> qr(a);
    ComplexMatrix q = qr.householderQ();
    // Fix the phase freedom so the result is reproducible.
    ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < n; ++j) {
        const Complex d = r(j, j);
        if (std::abs(d) > 0) q.col(j) *= d / std::abs(d);
    }
    return q;
}

/// Self-adjoint condition from a unitary V: A = I - V, B = -i (I + V).
inline VertexCondition random_general_condition(int d, std::mt19937_64& rng) {
    ComplexMatrix v = random_unitary(d, rng);
    ComplexMatrix id = ComplexMatrix::Identity(d, d);
    return VertexCondition::general(id - v, -I * (id + v));
}

/// Two vertices joined by two parallel bonds, generic (A, B) conditions.
inline Fixture make_general_two_bond(unsigned seed = 7) {
    std::mt19937_64 rng(seed);
    GraphBuilder b;
    b.add_vertex("v1").add_vertex("v2");
    b.add_bond("e1", "v1", "v2", 1.0).add_bond("e2", "v1", "v2", 0.6180339887498949);
    return {b.build(), {random_general_condition(2, rng), random_general_condition(2, rng)}};
}

/// Lasso with a generic (A, B) condition at its vertex.
inline Fixture make_general_lasso(unsigned seed = 11) {
    std::mt19937_64 rng(seed);
    GraphBuilder b;
    b.add_vertex("v1").add_lead("e1", "v1").add_bond("e2", "v1", "v1", 1.0);
    return {b.build(), {random_general_condition(3, rng)}};
}

/// Neumann-Kirchhoff realized as a general (A, B) pair: d-1 continuity rows
/// in A and a derivative-sum row in B.
inline VertexCondition nk_as_general(int d) {
    ComplexMatrix a = ComplexMatrix::Zero(d, d);
    ComplexMatrix b = ComplexMatrix::Zero(d, d);
    for (int i = 0; i + 1 < d; ++i) {
        a(i, i) = 1.0;
        a(i, i + 1) = -1.0;
    }
    b.row(d - 1).setOnes();
    return VertexCondition::general(std::move(a), std::move(b));
}

inline double max_abs(const ComplexMatrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline double unitarity_defect(const ComplexMatrix& m) {
    return max_abs(ComplexMatrix(m.adjoint() * m -
                                 ComplexMatrix::Identity(m.cols(), m.cols())));
}

// ---------------------------------------------------------------------------
// Analytic references.

/// Lasso scattering amplitude (3 e^{ikl} - 1) / (3 - e^{ikl}).
inline Complex lasso_sigma(Complex k, double l2 = 1.0) {
    const Complex z = std::exp(I * k * l2);
    return (3.0 * z - 1.0) / (3.0 - z);
}

/// Lasso bond amplitudes, canonical order (e2+, e2-).
inline ComplexVector lasso_rho(Complex k, double l2 = 1.0) {
    const Complex z = std::exp(I * k * l2);
    ComplexVector rho(2);
    rho[0] = rho[1] = 2.0 * z / (3.0 - z);
    return rho;
}

inline Complex star3_D(Complex k, double l2, double l3) {
    return 3.0 - std::exp(2.0 * I * k * l2) - std::exp(2.0 * I * k * l3) -
           std::exp(2.0 * I * k * (l2 + l3));
}

/// 3-star scattering amplitude conj(D)/D e^{2ik(l2+l3)} (real k).
inline Complex star3_sigma(double k, double l2, double l3) {
    const Complex d = star3_D(Complex(k, 0.0), l2, l3);
    return std::conj(d) / d * std::exp(2.0 * I * Complex(k, 0.0) * (l2 + l3));
}

/// 3-star bond amplitudes, canonical order (e2+, e2-, e3+, e3-).
inline ComplexVector star3_rho(Complex k, double l2, double l3) {
    const Complex d = star3_D(k, l2, l3);
    const Complex z2 = std::exp(I * k * l2), z3 = std::exp(I * k * l3);
    ComplexVector rho(4);
    rho[0] = 2.0 / d * z2 * (1.0 - z3 * z3);
    rho[1] = -2.0 / d * z2 * z2 * (1.0 - z3 * z3);
    rho[2] = 2.0 / d * z3 * (1.0 - z2 * z2);
    rho[3] = -2.0 / d * z3 * z3 * (1.0 - z2 * z2);
    return rho;
}

/// Dirichlet interval kernel -sin(k x_<) sin(k (l - x_>)) / (k sin(k l)).
inline Complex interval_greens(Complex k, double l, double x, double xp) {
    const double lo = std::min(x, xp), hi = std::max(x, xp);
    return -std::sin(k * lo) * std::sin(k * (l - hi)) / (k * std::sin(k * l));
}

/// Dirichlet half-line kernel (e^{ik|x-x'|} - e^{ik(x+x')}) / (2ik).
inline Complex halfline_greens(Complex k, double x, double xp) {
    return (std::exp(I * k * std::abs(x - xp)) - std::exp(I * k * (x + xp))) / (2.0 * I * k);
}

/// Lasso Green's function, all four placement cases. `x_on_lead` refers to
/// the target point, `xp_on_lead` to the source. The bond-lead case follows
/// from the lead-bond one by exchanging the points (the quantum map is
/// complex symmetric for Neumann-Kirchhoff conditions).
inline Complex lasso_greens(Complex k, double l2, double x, bool x_on_lead, double xp,
                            bool xp_on_lead) {
    const Complex z = std::exp(I * k * l2);
    const Complex pref = 1.0 / (2.0 * I * k);
    if (x_on_lead && xp_on_lead) {
        return pref * (std::exp(I * k * std::abs(x - xp)) +
                       std::exp(I * k * (x + xp)) * lasso_sigma(k, l2));
    }
    if (x_on_lead && !xp_on_lead) {
        return pref * (2.0 / (3.0 - z)) * std::exp(I * k * x) *
               (std::exp(I * k * xp) + std::exp(I * k * (l2 - xp)));
    }
    if (!x_on_lead && xp_on_lead) {
        return pref * (2.0 / (3.0 - z)) * std::exp(I * k * xp) *
               (std::exp(I * k * x) + std::exp(I * k * (l2 - x)));
    }
    const Complex factor = 2.0 * z / ((z - 1.0) * (z - 3.0));
    return pref * (std::exp(I * k * std::abs(x - xp)) +
                   factor * ((2.0 - z) * std::cos(k * (x - xp)) -
                             std::cos(k * (x + xp - l2))));
}

}  // namespace qtest
