#include <doctest.h>

#include "qgraph/errors.hpp"
#include "qgraph/oracle.hpp"
#include "test_support.hpp"

// Structural property tests on randomly generated graphs: spanning tree plus
// extra bonds (loops and parallel edges allowed), optional leads, and a mix of
// Neumann-Kirchhoff, Dirichlet and generic (A, B) conditions. Seeds are fixed,
// so failures are reproducible.

using namespace qtest;

namespace {

Fixture make_random_graph(unsigned seed, int leads) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> len(0.5, 2.0);
    const int nv = 2 + static_cast<int>(rng() % 4);

    GraphBuilder b;
    for (int i = 0; i < nv; ++i) b.add_vertex("v" + std::to_string(i));
    int edge_counter = 0;
    auto next_id = [&] {
        std::string n = std::to_string(edge_counter++);
        return "e" + std::string(2 - n.size(), '0') + n;
    };
    for (int i = 1; i < nv; ++i) {
        b.add_bond(next_id(), "v" + std::to_string(rng() % i), "v" + std::to_string(i),
                   len(rng));
    }
    const int extra = 1 + static_cast<int>(rng() % 2);
    for (int i = 0; i < extra; ++i) {
        b.add_bond(next_id(), "v" + std::to_string(rng() % nv),
                   "v" + std::to_string(rng() % nv), len(rng));
    }
    for (int i = 0; i < leads; ++i) {
        b.add_lead("lead" + std::to_string(i), "v" + std::to_string(rng() % nv));
    }
    MetricGraph graph = b.build();

    ConditionSet conditions;
    for (int v = 0; v < graph.num_vertices(); ++v) {
        switch (rng() % 3) {
            case 0:
                conditions.push_back(VertexCondition::neumann_kirchhoff());
                break;
            case 1:
                conditions.push_back(VertexCondition::dirichlet());
                break;
            default:
                conditions.push_back(random_general_condition(graph.degree(v), rng));
        }
    }
    return {std::move(graph), std::move(conditions)};
}

GraphPoint random_point(const MetricGraph& g, std::mt19937_64& rng) {
    const int e = static_cast<int>(rng() % g.num_edges());
    const double span = g.edge(e).is_lead() ? 2.5 : g.length(e);
    return GraphPoint{e, span * std::generate_canonical<double, 53>(rng)};
}

}  // namespace

TEST_CASE("random graphs: quantum map and scattering matrix are unitary") {
    std::mt19937_64 krng(404);
    for (unsigned seed = 1; seed <= 8; ++seed) {
        for (int leads : {0, 1, 2}) {
            auto [graph, conditions] = make_random_graph(97 * seed + leads, leads);
            for (int t = 0; t < 4; ++t) {
                const double k = 0.3 + 9.0 * std::generate_canonical<double, 53>(krng);
                auto snap = quantum_map(graph, conditions, Complex(k, 0.0));
                CHECK(unitarity_defect(snap.U) <= 1e-10);
                if (leads > 0) {
                    auto r = scattering_matrix(graph, conditions, Complex(k, 0.0));
                    CHECK(unitarity_defect(r.sigma) <= 1e-10);
                    CHECK(max_abs(ComplexMatrix(r.sigma - (snap.U_LL + snap.U_LB * r.rho))) <=
                          1e-12);
                }
            }
        }
    }
}

TEST_CASE("random graphs: resolvent symmetry under conjugation") {
    std::mt19937_64 rng(505);
    std::uniform_real_distribution<double> re(0.5, 12.0), im(0.05, 1.5);
    for (unsigned seed = 1; seed <= 6; ++seed) {
        for (int leads : {0, 2}) {
            auto [graph, conditions] = make_random_graph(131 * seed + leads, leads);
            for (int t = 0; t < 5; ++t) {
                GraphPoint a = random_point(graph, rng);
                GraphPoint b = random_point(graph, rng);
                const Complex E(re(rng), im(rng));
                const Complex g =
                    greens(graph, conditions, a, b, EnergyPoint::from_energy(E)).value;
                const Complex swapped =
                    greens(graph, conditions, b, a, EnergyPoint::from_energy(std::conj(E)))
                        .value;
                CHECK(std::abs(g - std::conj(swapped)) <= 1e-12);
            }
        }
    }
}

TEST_CASE("random graphs: Green's function solves the defining equation") {
    const EnergyPoint e = EnergyPoint::from_wavenumber(Complex(1.3, 0.2));
    const double h = 1e-4;
    for (unsigned seed = 1; seed <= 5; ++seed) {
        for (int leads : {0, 1}) {
            auto [graph, conditions] = make_random_graph(211 * seed + leads, leads);
            // Source in the middle of the first bond.
            int bond = -1;
            for (int i = 0; i < graph.num_edges(); ++i) {
                if (!graph.edge(i).is_lead()) {
                    bond = i;
                    break;
                }
            }
            REQUIRE(bond >= 0);
            const double l = graph.length(bond);
            const GraphPoint xp{bond, 0.5 * l};
            auto G = [&](double x) {
                return greens(graph, conditions, GraphPoint{bond, x}, xp, e).value;
            };
            for (double frac : {0.2, 0.8}) {
                const double x = frac * l;
                const Complex second = (G(x + h) - 2.0 * G(x) + G(x - h)) / (h * h);
                const double scale = std::max(1.0, std::abs(e.E * G(x)));
                CHECK(std::abs(e.E * G(x) + second) <= 1e-5 * scale);
            }
            auto one_sided = [&](double x0, int dir) {
                return (-3.0 * G(x0) + 4.0 * G(x0 + dir * h) - G(x0 + 2.0 * dir * h)) /
                       (2.0 * dir * h);
            };
            const Complex jump = one_sided(xp.x, +1) - one_sided(xp.x, -1);
            CHECK(std::abs(jump - Complex(1.0, 0.0)) <= 1e-5);
        }
    }
}

TEST_CASE("random graphs: path sum agrees with the closed form") {
    const EnergyPoint e = EnergyPoint::from_wavenumber(Complex(1.1, 0.45));
    std::mt19937_64 rng(606);
    for (unsigned seed = 1; seed <= 5; ++seed) {
        for (int leads : {0, 1, 2}) {
            auto [graph, conditions] = make_random_graph(307 * seed + leads, leads);
            GraphPoint a = random_point(graph, rng);
            GraphPoint b = random_point(graph, rng);
            const Complex closed = greens(graph, conditions, a, b, e).value;
            const Complex series = path_sum_greens(graph, conditions, a, b, e, 160).value;
            CHECK(std::abs(closed - series) <= 1e-9);
        }
    }
}
