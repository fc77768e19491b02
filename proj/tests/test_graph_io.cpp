#include <doctest.h>

#include <fstream>

#include "qgraph/errors.hpp"
#include "qgraph/graph_io.hpp"
#include "test_support.hpp"

using namespace qtest;

namespace {

std::string fixture_path(const std::string& name) {
    return std::string(QGRAPH_FIXTURE_DIR) + "/" + name;
}

bool same_condition(const VertexCondition& a, const VertexCondition& b) {
    if (a.kind() != b.kind()) return false;
    switch (a.kind()) {
        case VertexCondition::Kind::General:
            return a.A() == b.A() && a.B() == b.B();
        case VertexCondition::Kind::Constant:
            return a.S() == b.S();
        default:
            return true;
    }
}

bool same_document(const GraphDocument& a, const GraphDocument& b) {
    if (a.graph.num_edges() != b.graph.num_edges()) return false;
    if (a.graph.num_vertices() != b.graph.num_vertices()) return false;
    for (int e = 0; e < a.graph.num_edges(); ++e) {
        const auto& ea = a.graph.edge(e);
        const auto& eb = b.graph.edge(e);
        if (ea.id != eb.id || ea.kind != eb.kind || ea.v0 != eb.v0 || ea.v1 != eb.v1)
            return false;
        if (!ea.is_lead() && ea.length != eb.length) return false;
    }
    for (int v = 0; v < a.graph.num_vertices(); ++v) {
        if (a.graph.vertices()[v].id != b.graph.vertices()[v].id) return false;
        if (!same_condition(a.conditions[v], b.conditions[v])) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("bundled fixtures parse") {
    auto lasso = load_graph_file(fixture_path("lasso.json"));
    CHECK(lasso.graph.num_bonds() == 1);
    CHECK(lasso.graph.num_leads() == 1);
    CHECK(lasso.conditions[0].kind() == VertexCondition::Kind::NeumannKirchhoff);

    auto star = load_graph_file(fixture_path("star3.json"));
    CHECK(star.graph.num_bonds() == 2);
    CHECK(star.graph.length(star.graph.edge_index("e3")) == std::sqrt(2.0));

    for (const char* name :
         {"interval.json", "loop.json", "lasso.json", "star3.json", "star3-equilateral.json"}) {
        CHECK_NOTHROW(load_graph_file(fixture_path(name)));
    }
}

TEST_CASE("round trip documents are identical") {
    std::mt19937_64 rng(13);
    GraphDocument doc;
    {
        GraphBuilder b;
        b.add_vertex("v1").add_vertex("v2");
        b.add_bond("e1", "v1", "v2", 0.1 + 0.2);  // deliberately non-representable sum
        b.add_bond("e2", "v1", "v2", 1e-17);
        b.add_lead("e3", "v1");
        doc.graph = b.build();
        doc.conditions = {random_general_condition(3, rng),
                          VertexCondition::constant(random_unitary(2, rng))};
        doc.metadata_json = "{\"name\":\"round-trip\"}";
    }

    const std::string text = emit_graph_file(doc);
    GraphDocument reparsed = parse_graph_file(text);
    CHECK(same_document(doc, reparsed));
    CHECK(emit_graph_file(reparsed) == text);

    for (const char* name :
         {"interval.json", "loop.json", "lasso.json", "star3.json", "star3-equilateral.json"}) {
        auto original = load_graph_file(fixture_path(name));
        auto again = parse_graph_file(emit_graph_file(original));
        CHECK(same_document(original, again));
    }
}

TEST_CASE("schema violations carry useful messages") {
    SUBCASE("invalid JSON") {
        CHECK_THROWS_AS(parse_graph_file("{"), ParseError);
    }
    SUBCASE("negative length names the edge") {
        const char* text = R"({
            "vertices": [{"id": "v1", "condition": "dirichlet"},
                         {"id": "v2", "condition": "dirichlet"}],
            "edges": [{"id": "bad_edge", "endpoints": ["v1", "v2"], "length": -1.0}]
        })";
        try {
            parse_graph_file(text);
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(std::string(e.what()).find("bad_edge") != std::string::npos);
        }
    }
    SUBCASE("rank-deficient condition names the vertex") {
        const char* text = R"({
            "vertices": [{"id": "center", "condition":
                {"type": "general",
                 "A": [[[0,0],[0,0]],[[0,0],[0,0]]],
                 "B": [[[0,0],[0,0]],[[0,0],[0,0]]]}},
                {"id": "v2", "condition": "dirichlet"},
                {"id": "v3", "condition": "dirichlet"}],
            "edges": [{"id": "e1", "endpoints": ["center", "v2"], "length": 1.0},
                      {"id": "e2", "endpoints": ["center", "v3"], "length": 1.0}]
        })";
        try {
            parse_graph_file(text);
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(std::string(e.what()).find("center") != std::string::npos);
        }
    }
    SUBCASE("lead with two endpoints") {
        const char* text = R"({
            "vertices": [{"id": "v1"}, {"id": "v2"}],
            "edges": [{"id": "e1", "endpoints": ["v1", "v2"], "length": "lead"}]
        })";
        CHECK_THROWS_AS(parse_graph_file(text), ParseError);
    }
    SUBCASE("unknown condition name") {
        const char* text = R"({
            "vertices": [{"id": "v1", "condition": "robin"}],
            "edges": [{"id": "e1", "endpoints": ["v1", "v1"], "length": 1.0}]
        })";
        CHECK_THROWS_AS(parse_graph_file(text), ParseError);
    }
    SUBCASE("missing sections") {
        CHECK_THROWS_AS(parse_graph_file("{\"vertices\": []}"), ParseError);
        CHECK_THROWS_AS(parse_graph_file("[1,2,3]"), ParseError);
    }
}

TEST_CASE("metadata survives the round trip") {
    auto doc = load_graph_file(fixture_path("lasso.json"));
    CHECK(doc.metadata_json.find("lasso") != std::string::npos);
    auto again = parse_graph_file(emit_graph_file(doc));
    CHECK(again.metadata_json.find("lasso") != std::string::npos);
}

TEST_CASE("parsed conditions drive the scattering closed form") {
    auto doc = load_graph_file(fixture_path("lasso.json"));
    auto r = scattering_matrix(doc.graph, doc.conditions, Complex(1.7, 0.0));
    CHECK(std::abs(r.sigma(0, 0) - lasso_sigma(Complex(1.7, 0.0))) <= 1e-12);
}
