#include "qgraph/scattering.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "qgraph/parallel.hpp"

namespace qgraph {

namespace {

const Complex kI(0.0, 1.0);

void fix_phase(ComplexVector& v) {
    int imax = 0;
    for (int i = 1; i < v.size(); ++i) {
        if (std::abs(v[i]) > std::abs(v[imax])) imax = i;
    }
    if (std::abs(v[imax]) > 0.0) {
        v *= std::conj(v[imax]) / std::abs(v[imax]);
    }
}

void require_open(const MetricGraph& graph) {
    if (graph.num_leads() == 0) {
        throw DomainError("scattering requires an open graph (at least one lead)");
    }
}

/// Eigen-decomposition of U_BB with the index of the eigenvalue closest to 1
/// and the count of eigenvalues within `band` of 1.
struct UnitEigenScan {
    Eigen::ComplexEigenSolver<ComplexMatrix> es;
    int closest = -1;
    double distance = std::numeric_limits<double>::infinity();
    int count_within(double band) const {
        int c = 0;
        for (int i = 0; i < es.eigenvalues().size(); ++i) {
            if (std::abs(es.eigenvalues()[i] - Complex(1.0, 0.0)) <= band) ++c;
        }
        return c;
    }
};

UnitEigenScan scan_unit_eigenvalue(const ComplexMatrix& ubb) {
    UnitEigenScan scan;
    scan.es.compute(ubb);
    for (int i = 0; i < scan.es.eigenvalues().size(); ++i) {
        const double d = std::abs(scan.es.eigenvalues()[i] - Complex(1.0, 0.0));
        if (d < scan.distance) {
            scan.distance = d;
            scan.closest = i;
        }
    }
    return scan;
}

ScarBasis make_scar_basis(double k, const UnitEigenScan& scan) {
    ComplexVector b = scan.es.eigenvectors().col(scan.closest);
    b.normalize();
    fix_phase(b);
    return ScarBasis{k, std::move(b), scan.distance};
}

/// P rho and Q rho at the scar, plus sigma, sharing one ProjectedSolver.
struct RegularizedParts {
    ComplexMatrix sigma;
    ComplexMatrix p_rho;
    ComplexMatrix q_rho;
};

RegularizedParts regularize_at_scar(const MetricGraph& graph, const ConditionSet& conditions,
                                    const QuantumMapSnapshot& snap, const ScarBasis& scar) {
    const int nb = graph.bond_dim();
    const ComplexVector& b = scar.b;
    const double k0 = scar.k0;

    ComplexMatrix M = ComplexMatrix::Identity(nb, nb) - snap.U_BB;
    ProjectedSolver solver(M, b);
    ComplexMatrix Z = solver.solve(snap.U_BL);  // Y_Q^{-1} U_BL

    RegularizedParts parts;
    parts.sigma = snap.U_LL + snap.U_LB * Z;

    const auto& len = graph.directed_lengths();
    const auto& swap = graph.direction_swap();

    bool k_independent = true;
    for (const auto& c : conditions) {
        if (!c.k_independent()) {
            k_independent = false;
            break;
        }
    }

    // (Pi D) A with D = diag(phases): row a picks phases[a] * A.row(swap(a)),
    // using that the phase diagonal commutes with the direction swap.
    auto pi_scaled = [&](const ComplexVector& phases, const ComplexMatrix& A) {
        ComplexMatrix out(A.rows(), A.cols());
        for (int a = 0; a < nb; ++a) {
            out.row(a) = phases[a] * A.row(swap[a]);
        }
        return out;
    };

    ComplexMatrix ubb_z = snap.U_BB * Z;
    Complex denom;
    ComplexMatrix numerator;
    if (k_independent) {
        // P rho = -P L (I + U_BB Y_Q^{-1}) U_BL / (b^dag L b)
        denom = (b.adjoint() * (len.cast<Complex>().asDiagonal() * b))(0, 0);
        numerator = -(len.cast<Complex>().asDiagonal() * ComplexMatrix(snap.U_BL + ubb_z));
    } else {
        // Full leading-order expression with the phase terms coming from the
        // k dependence of the vertex scattering matrices.
        ComplexVector phase_minus(nb), phase_plus(nb);
        for (int a = 0; a < nb; ++a) {
            phase_minus[a] = std::exp(-kI * Complex(k0, 0.0) * len[a]);
            phase_plus[a] = std::exp(kI * Complex(k0, 0.0) * len[a]);
        }
        Complex quad = 0.0;
        for (int a = 0; a < nb; ++a) {
            quad += std::conj(b[a]) * (k0 * len[a]) * b[a];
            quad += std::conj(b[a]) * std::sin(k0 * len[a]) * b[swap[a]];
        }
        denom = quad;
        const Complex half_i = 1.0 / (2.0 * kI);
        numerator = half_i * pi_scaled(phase_minus, snap.U_BL);
        numerator -= k0 * (len.cast<Complex>().asDiagonal() * snap.U_BL);
        numerator -= k0 * (len.cast<Complex>().asDiagonal() * ubb_z);
        numerator -= half_i * pi_scaled(phase_plus, Z);
        numerator += half_i * pi_scaled(phase_minus, ubb_z);
    }

    if (std::abs(denom) < 1e-12) {
        throw DomainError(
            "regularization denominator vanished; scar basis is inconsistent with the graph");
    }
    parts.p_rho = b * ((b.adjoint() * numerator) / denom);
    parts.q_rho = solver.solve(ComplexMatrix(snap.U_BB * parts.p_rho)) + Z;
    return parts;
}

ScatteringResult evaluate(const MetricGraph& graph, const ConditionSet& conditions, Complex k,
                          const ScatteringOptions& options) {
    require_open(graph);
    QuantumMapSnapshot snap = quantum_map(graph, conditions, k);
    const int nb = graph.bond_dim();
    const int nl = graph.num_leads();

    ScatteringResult result;
    result.k = k;

    if (nb == 0) {
        result.sigma = snap.U_LL;
        result.rho = ComplexMatrix::Zero(0, nl);
        return result;
    }

    const bool real_axis = (k.imag() == 0.0);
    if (real_axis) {
        UnitEigenScan scan = scan_unit_eigenvalue(snap.U_BB);
        if (scan.distance <= options.scar_tol) {
            if (scan.count_within(options.scar_tol) > 1) {
                throw DegeneracyError("degenerate scar space: regularization unsupported");
            }
            ScarBasis scar = make_scar_basis(k.real(), scan);
            if (options.on_scar == ScarPolicy::Throw) {
                throw ScarPresentError("I - U_BB is singular: perfect scar at k = " +
                                           std::to_string(k.real()),
                                       scar);
            }
            RegularizedParts parts = regularize_at_scar(graph, conditions, snap, scar);
            result.sigma = std::move(parts.sigma);
            result.rho = parts.p_rho + parts.q_rho;
            result.regularized = true;
            result.scar = std::move(scar);
            return result;
        }
        if (scan.distance <= options.near_scar_band && scan.count_within(options.near_scar_band) == 1) {
            // Deflate the near-unit eigenvector; the block elimination against
            // P = b b^dag is an exact identity at any k.
            ComplexVector b = scan.es.eigenvectors().col(scan.closest);
            b.normalize();
            const Complex lambda = scan.es.eigenvalues()[scan.closest];
            ComplexMatrix M = ComplexMatrix::Identity(nb, nb) - snap.U_BB;
            ProjectedSolver solver(M, b);
            ComplexMatrix Z = solver.solve(snap.U_BL);
            ComplexMatrix p_rho =
                b * ((b.adjoint() * ComplexMatrix(snap.U_BL + snap.U_BB * Z)) /
                     (Complex(1.0, 0.0) - lambda));
            ComplexMatrix q_rho = solver.solve(ComplexMatrix(snap.U_BB * p_rho)) + Z;
            result.rho = p_rho + q_rho;
            result.sigma = snap.U_LL + snap.U_LB * result.rho;
            result.conditioning_warning = true;
            return result;
        }
        if (scan.distance <= options.near_scar_band) {
            result.conditioning_warning = true;
        }
    }

    Eigen::PartialPivLU<ComplexMatrix> lu(ComplexMatrix::Identity(nb, nb) - snap.U_BB);
    result.rho = lu.solve(snap.U_BL);
    result.sigma = snap.U_LL + snap.U_LB * result.rho;
    return result;
}

}  // namespace

ScatteringResult scattering_matrix(const MetricGraph& graph, const ConditionSet& conditions,
                                   Complex k, const ScatteringOptions& options) {
    return evaluate(graph, conditions, k, options);
}

ScatteringResult internal_amplitudes(const MetricGraph& graph, const ConditionSet& conditions,
                                     Complex k, const ScatteringOptions& options) {
    return evaluate(graph, conditions, k, options);
}

std::optional<ScarBasis> detect_scar(const MetricGraph& graph, const ConditionSet& conditions,
                                     double k, double tol) {
    require_open(graph);
    if (!(k > 0.0)) {
        throw DomainError("scar detection requires real k > 0");
    }
    if (graph.num_bonds() == 0) {
        return std::nullopt;
    }
    QuantumMapSnapshot snap = quantum_map(graph, conditions, Complex(k, 0.0));
    UnitEigenScan scan = scan_unit_eigenvalue(snap.U_BB);
    if (scan.distance > tol) {
        return std::nullopt;
    }
    if (scan.count_within(tol) > 1) {
        throw DegeneracyError("degenerate scar space at k = " + std::to_string(k) +
                              ": unsupported");
    }
    ScarBasis scar = make_scar_basis(k, scan);

    // Unitarity forces the bound state to decouple from the leads; verify.
    const double decouple_tol = std::max(1e-8, 50.0 * scan.distance);
    const double in_coupling = (snap.U_LB * scar.b).norm();
    const double out_coupling = (scar.b.adjoint() * snap.U_BL).norm();
    if (in_coupling > decouple_tol || out_coupling > decouple_tol) {
        throw DomainError("unit eigenvalue of U_BB does not decouple from the leads");
    }
    return scar;
}

ScatteringResult regularized_scattering(const MetricGraph& graph, const ConditionSet& conditions,
                                        const ScarBasis& scar) {
    require_open(graph);
    QuantumMapSnapshot snap = quantum_map(graph, conditions, Complex(scar.k0, 0.0));
    if ((snap.U_BB * scar.b - scar.b).norm() > 1e-6) {
        throw ValidationError("scar basis does not match the graph at k0");
    }
    RegularizedParts parts = regularize_at_scar(graph, conditions, snap, scar);

    ScatteringResult result;
    result.k = Complex(scar.k0, 0.0);
    result.sigma = std::move(parts.sigma);
    result.rho = parts.p_rho + parts.q_rho;
    result.regularized = true;
    result.scar = scar;
    return result;
}

std::pair<ComplexMatrix, ComplexMatrix> regularized_internal(const MetricGraph& graph,
                                                             const ConditionSet& conditions,
                                                             const ScarBasis& scar) {
    require_open(graph);
    QuantumMapSnapshot snap = quantum_map(graph, conditions, Complex(scar.k0, 0.0));
    if ((snap.U_BB * scar.b - scar.b).norm() > 1e-6) {
        throw ValidationError("scar basis does not match the graph at k0");
    }
    RegularizedParts parts = regularize_at_scar(graph, conditions, snap, scar);
    return {std::move(parts.p_rho), std::move(parts.q_rho)};
}

std::vector<ScarBasis> find_scars(const MetricGraph& graph, const ConditionSet& conditions,
                                  double k_min, double k_max, double tol, double scan_step) {
    require_open(graph);
    if (!(0.0 < k_min && k_min < k_max)) {
        throw ValidationError("need 0 < k_min < k_max");
    }
    if (graph.num_bonds() == 0) {
        return {};
    }
    double step = scan_step;
    if (step <= 0.0) {
        step = M_PI / (4.0 * graph.total_bond_length());
    }
    step = std::min(step, 0.5 * (k_max - k_min));

    auto distance = [&](double k) {
        QuantumMapSnapshot snap = quantum_map(graph, conditions, Complex(k, 0.0));
        return scan_unit_eigenvalue(snap.U_BB).distance;
    };

    const int n = static_cast<int>(std::ceil((k_max - k_min) / step)) + 2;
    std::vector<double> grid(n), dist(n);
    for (int i = 0; i < n; ++i) grid[i] = k_min + i * step;
    parallel_for(n, [&](int i) { dist[i] = distance(grid[i]); });

    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    std::vector<ScarBasis> scars;
    for (int i = 0; i < n; ++i) {
        const bool left_ok = i == 0 || dist[i] <= dist[i - 1];
        const bool right_ok = i == n - 1 || dist[i] <= dist[i + 1];
        if (!(left_ok && right_ok)) continue;

        double a = std::max(grid[i] - step, 0.25 * step);
        double b = grid[i] + step;
        double c = b - phi * (b - a), d = a + phi * (b - a);
        double fc = distance(c), fd = distance(d);
        for (int it = 0; it < 120 && (b - a) > 1e-12; ++it) {
            if (fc < fd) {
                b = d, d = c, fd = fc;
                c = b - phi * (b - a);
                fc = distance(c);
            } else {
                a = c, c = d, fc = fd;
                d = a + phi * (b - a);
                fd = distance(d);
            }
        }
        const double k0 = 0.5 * (a + b);
        if (k0 < k_min - 1e-9 || k0 > k_max + 1e-9) continue;
        auto scar = detect_scar(graph, conditions, k0, tol);
        if (scar && (scars.empty() || std::abs(scars.back().k0 - scar->k0) > 1e-9)) {
            scars.push_back(std::move(*scar));
        }
    }
    return scars;
}

ProjectedSolver::ProjectedSolver(const ComplexMatrix& M, const ComplexVector& b) : n_(M.rows()) {
    if (M.rows() != M.cols() || b.size() != n_ || n_ < 1) {
        throw ValidationError("projected solver needs a square matrix and a matching vector");
    }
    ComplexVector unit = b.normalized();
    ComplexVector w = unit;
    const Complex phase =
        std::abs(unit[0]) > 0.0 ? unit[0] / std::abs(unit[0]) : Complex(1.0, 0.0);
    w[0] += phase;  // H w-direction: H unit = -phase e_0
    householder_ = ComplexMatrix::Identity(n_, n_) -
                   (2.0 / w.squaredNorm()) * (w * w.adjoint());

    ComplexMatrix rotated = householder_ * M * householder_;
    if (n_ == 1) {
        // Q space is empty; every solve returns zero.
        reduced_lu_.compute(ComplexMatrix::Identity(1, 1));
        return;
    }
    ComplexMatrix reduced = rotated.block(1, 1, n_ - 1, n_ - 1);
    Eigen::FullPivLU<ComplexMatrix> check(reduced);
    if (!check.isInvertible()) {
        throw DegeneracyError(
            "Q-restricted system is singular: a second scar direction was missed");
    }
    reduced_lu_.compute(reduced);
}

ComplexMatrix ProjectedSolver::solve(const ComplexMatrix& rhs) const {
    if (rhs.rows() != n_) {
        throw ValidationError("projected solver rhs has wrong dimension");
    }
    if (n_ == 1) {
        return ComplexMatrix::Zero(n_, rhs.cols());
    }
    ComplexMatrix rotated = householder_ * rhs;
    ComplexMatrix solution = ComplexMatrix::Zero(n_, rhs.cols());
    solution.bottomRows(n_ - 1) = reduced_lu_.solve(rotated.bottomRows(n_ - 1));
    return householder_ * solution;
}

ComplexVector ProjectedSolver::solve(const ComplexVector& rhs) const {
    return ComplexVector(solve(ComplexMatrix(rhs)));
}

ComplexMatrix ProjectedSolver::inverse() const {
    return solve(ComplexMatrix(ComplexMatrix::Identity(n_, n_)));
}

}  // namespace qgraph
