#include "qgraph/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "qgraph/errors.hpp"
#include "qgraph/parallel.hpp"
#include "qgraph/quadrature.hpp"

namespace qgraph {

namespace {

const Complex kI(0.0, 1.0);
constexpr double kAcceptResidual = 1e-6;     // sigma_min(I - U) at an accepted root
constexpr double kMultiplicityTol = 1e-6;    // singular values below this count as null

double smallest_singular_value(const ComplexMatrix& m) {
    Eigen::JacobiSVD<ComplexMatrix> svd(m);
    return svd.singularValues()(svd.singularValues().size() - 1);
}

double secular_distance(const MetricGraph& graph, const ConditionSet& conditions, double k) {
    QuantumMapSnapshot snap = quantum_map(graph, conditions, Complex(k, 0.0));
    const int n = graph.total_dim();
    return smallest_singular_value(ComplexMatrix(ComplexMatrix::Identity(n, n) - snap.U));
}

/// One Newton update for det(I - U(k)) = 0 via the log-derivative,
/// xi'/xi = -tr[(I - U)^{-1} U'], so the step is +1 / tr[(I - U)^{-1} U'].
std::optional<double> newton_step(const MetricGraph& graph, const ConditionSet& conditions,
                                  double k) {
    QuantumMapSnapshot snap = quantum_map(graph, conditions, Complex(k, 0.0));
    const int n = graph.total_dim();
    ComplexMatrix m = ComplexMatrix::Identity(n, n) - snap.U;
    Eigen::PartialPivLU<ComplexMatrix> lu(m);
    ComplexMatrix du = quantum_map_derivative(graph, conditions, snap);
    const Complex tr = ComplexMatrix(lu.solve(du)).trace();
    if (!std::isfinite(tr.real()) || !std::isfinite(tr.imag()) || std::abs(tr) == 0.0) {
        return std::nullopt;
    }
    // Roots lie on the real axis; keep the iteration there.
    return (1.0 / tr).real();
}

double golden_minimize(const MetricGraph& graph, const ConditionSet& conditions, double a,
                       double b, double width_tol) {
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - phi * (b - a);
    double d = a + phi * (b - a);
    double fc = secular_distance(graph, conditions, c);
    double fd = secular_distance(graph, conditions, d);
    for (int it = 0; it < 200 && (b - a) > width_tol; ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = secular_distance(graph, conditions, c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = secular_distance(graph, conditions, d);
        }
    }
    return 0.5 * (a + b);
}

std::optional<double> polish_root(const MetricGraph& graph, const ConditionSet& conditions,
                                  double k_start, double bracket, double tol) {
    double k = k_start;
    bool used_fallback = false;
    int tail_iterations = 0;
    for (int it = 0; it < 100; ++it) {
        auto step = newton_step(graph, conditions, k);
        double dk = step.value_or(0.0);
        const bool diverging = !step.has_value() || std::abs(dk) > 1.5 * bracket ||
                               k + dk <= 0.0;
        if (diverging) {
            if (used_fallback) break;
            used_fallback = true;
            const double lo = std::max(k_start - bracket, 0.25 * tol);
            k = golden_minimize(graph, conditions, lo, k_start + bracket, 0.25 * tol);
            continue;
        }
        k += dk;
        if (std::abs(dk) < 0.125 * tol) {
            // Multiple roots converge linearly; a few extra steps close the gap.
            if (++tail_iterations >= 4) break;
        }
    }
    if (secular_distance(graph, conditions, k) > kAcceptResidual) {
        return std::nullopt;
    }
    return k;
}

std::vector<double> scan_roots(const MetricGraph& graph, const ConditionSet& conditions,
                               double k_min, double k_max, double step, double tol) {
    double lo = k_min - step > 0.25 * step ? k_min - step : k_min;
    const int n = static_cast<int>(std::ceil((k_max + step - lo) / step)) + 1;
    std::vector<double> grid(n), dist(n);
    for (int i = 0; i < n; ++i) grid[i] = lo + i * step;

    parallel_for(n, [&](int i) { dist[i] = secular_distance(graph, conditions, grid[i]); });

    std::vector<double> roots;
    for (int i = 0; i < n; ++i) {
        const bool left_ok = i == 0 || dist[i] <= dist[i - 1];
        const bool right_ok = i == n - 1 || dist[i] <= dist[i + 1];
        if (!(left_ok && right_ok)) continue;
        auto k = polish_root(graph, conditions, grid[i], step, tol);
        if (k && *k >= k_min - tol && *k <= k_max + tol) {
            roots.push_back(*k);
        }
    }
    std::sort(roots.begin(), roots.end());
    std::vector<double> unique;
    const double merge_tol = std::max(20.0 * tol, 1e-12);
    for (double k : roots) {
        if (unique.empty() || k - unique.back() > merge_tol) {
            unique.push_back(k);
        }
    }
    return unique;
}

int root_multiplicity(const MetricGraph& graph, const ConditionSet& conditions, double k) {
    QuantumMapSnapshot snap = quantum_map(graph, conditions, Complex(k, 0.0));
    const int n = graph.total_dim();
    Eigen::JacobiSVD<ComplexMatrix> svd(ComplexMatrix(ComplexMatrix::Identity(n, n) - snap.U));
    int count = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i) {
        if (svd.singularValues()(i) < kMultiplicityTol) ++count;
    }
    return std::max(count, 1);
}

}  // namespace

Complex secular(const MetricGraph& graph, const ConditionSet& conditions, Complex k) {
    if (!graph.is_compact()) {
        throw DomainError("the secular function is defined for compact graphs");
    }
    QuantumMapSnapshot snap = quantum_map(graph, conditions, k);
    const int n = graph.total_dim();
    return ComplexMatrix(ComplexMatrix::Identity(n, n) - snap.U).determinant();
}

std::vector<SpectralRoot> find_eigenvalues(const MetricGraph& graph,
                                           const ConditionSet& conditions, double k_min,
                                           double k_max,
                                           const EigenvalueSearchOptions& options) {
    if (!graph.is_compact()) {
        throw DomainError("eigenvalue search is defined for compact graphs");
    }
    if (!(0.0 < k_min && k_min < k_max)) {
        throw ValidationError("need 0 < k_min < k_max");
    }
    const double tol = options.tol > 0 ? options.tol : 1e-10;
    double step = options.scan_step;
    if (step <= 0.0) {
        // A quarter of the mean eigenvalue spacing pi / (total bond length).
        step = M_PI / (4.0 * graph.total_bond_length());
    }
    step = std::min(step, 0.5 * (k_max - k_min));

    std::vector<double> roots = scan_roots(graph, conditions, k_min, k_max, step, tol);
    if (options.check_refinement) {
        std::vector<double> refined = scan_roots(graph, conditions, k_min, k_max, 0.5 * step, tol);
        bool consistent = refined.size() == roots.size();
        if (consistent) {
            for (size_t i = 0; i < roots.size(); ++i) {
                if (std::abs(roots[i] - refined[i]) > std::max(100.0 * tol, 1e-9)) {
                    consistent = false;
                    break;
                }
            }
        }
        if (!consistent) {
            throw ScanError("scan step too coarse: root set changed under grid refinement");
        }
        roots = std::move(refined);
    }

    std::vector<SpectralRoot> result;
    result.reserve(roots.size());
    for (double k : roots) {
        result.push_back(SpectralRoot{k, root_multiplicity(graph, conditions, k), {}, 0.0});
    }
    return result;
}

SpectralRoot eigenvector_and_normalization(const MetricGraph& graph,
                                           const ConditionSet& conditions, double k_n) {
    if (!graph.is_compact()) {
        throw DomainError("eigenvectors are defined for compact graphs");
    }
    QuantumMapSnapshot snap = quantum_map(graph, conditions, Complex(k_n, 0.0));
    const int n = graph.total_dim();
    Eigen::JacobiSVD<ComplexMatrix> svd(ComplexMatrix(ComplexMatrix::Identity(n, n) - snap.U),
                                        Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    if (sv(n - 1) > kAcceptResidual) {
        throw DomainError("k is not an eigen-wavenumber to tolerance");
    }
    int multiplicity = 0;
    for (int i = 0; i < n; ++i) {
        if (sv(i) < kMultiplicityTol) ++multiplicity;
    }
    multiplicity = std::max(multiplicity, 1);
    if (multiplicity > 1) {
        throw DegeneracyError("degenerate eigenvalue: eigen-normalization is refused");
    }

    ComplexVector b = svd.matrixV().col(n - 1);
    // Deterministic phase: rotate the largest component onto the positive axis.
    int imax = 0;
    for (int i = 1; i < n; ++i) {
        if (std::abs(b[i]) > std::abs(b[imax])) imax = i;
    }
    b *= std::conj(b[imax]) / std::abs(b[imax]);
    b.normalize();

    const auto& len = graph.directed_lengths();
    const auto& swap = graph.direction_swap();
    Complex c = 0.0;
    for (int a = 0; a < n; ++a) {
        c += std::conj(b[a]) * len[a] * b[a];
        c += std::conj(b[a]) * (std::sin(k_n * len[a]) / k_n) * b[swap[a]];
    }
    if (!(c.real() > 0.0) || std::abs(c.imag()) > 1e-8 * std::abs(c)) {
        throw DomainError("normalization constant failed to be positive");
    }

    SpectralRoot root;
    root.k = k_n;
    root.multiplicity = 1;
    root.eigenvector = std::move(b);
    root.normalization = c.real();
    return root;
}

ProjectionKernel::ProjectionKernel(MetricGraph graph, SpectralRoot root)
    : graph_(std::move(graph)), root_(std::move(root)) {
    if (root_.eigenvector.size() != graph_.total_dim() || root_.normalization <= 0.0) {
        throw ValidationError("projection kernel needs an extracted simple root");
    }
}

Complex ProjectionKernel::eigenfunction(const GraphPoint& p) const {
    graph_.locate(p);
    const int minus = graph_.directed_index(p.edge, -1);
    const int plus = graph_.directed_index(p.edge, +1);
    const double k = root_.k;
    const double l = graph_.length(p.edge);
    return root_.eigenvector[minus] * std::exp(-kI * k * p.x) +
           root_.eigenvector[plus] * std::exp(kI * k * (p.x - l));
}

Complex ProjectionKernel::operator()(const GraphPoint& x, const GraphPoint& x_prime) const {
    return eigenfunction(x) * std::conj(eigenfunction(x_prime)) / root_.normalization;
}

double ProjectionKernel::trace(int nodes_per_edge) const {
    double total = 0.0;
    for (int e = 0; e < graph_.num_edges(); ++e) {
        total += integrate_gl(
            [&](double x) {
                const Complex psi = eigenfunction(GraphPoint{e, x});
                return std::norm(psi) / root_.normalization;
            },
            0.0, graph_.length(e), nodes_per_edge);
    }
    return total;
}

ProjectionKernel projection_kernel(const SpectralRoot& root, const MetricGraph& graph) {
    return ProjectionKernel(graph, root);
}

}  // namespace qgraph
