#include "qgraph/graph_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "qgraph/errors.hpp"

namespace qgraph {

namespace {

using nlohmann::json;

Complex parse_complex(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        throw ParseError("expected a [re, im] pair in " + where);
    }
    return Complex(j[0].get<double>(), j[1].get<double>());
}

ComplexMatrix parse_matrix(const json& j, const std::string& where) {
    if (!j.is_array() || j.empty()) {
        throw ParseError("expected a non-empty matrix in " + where);
    }
    const int rows = static_cast<int>(j.size());
    ComplexMatrix m;
    for (int r = 0; r < rows; ++r) {
        const json& row = j[r];
        if (!row.is_array() || static_cast<int>(row.size()) == 0) {
            throw ParseError("expected matrix rows in " + where);
        }
        if (r == 0) {
            m.resize(rows, static_cast<int>(row.size()));
        }
        if (static_cast<int>(row.size()) != m.cols()) {
            throw ParseError("ragged matrix in " + where);
        }
        for (int c = 0; c < m.cols(); ++c) {
            m(r, c) = parse_complex(row[c], where);
        }
    }
    return m;
}

json emit_complex(Complex z) { return json::array({z.real(), z.imag()}); }

json emit_matrix(const ComplexMatrix& m) {
    json rows = json::array();
    for (int r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (int c = 0; c < m.cols(); ++c) {
            row.push_back(emit_complex(m(r, c)));
        }
        rows.push_back(row);
    }
    return rows;
}

VertexCondition parse_condition(const json& j, const std::string& vertex_id) {
    const std::string where = "condition of vertex '" + vertex_id + "'";
    if (j.is_string()) {
        const std::string name = j.get<std::string>();
        if (name == "neumann_kirchhoff") return VertexCondition::neumann_kirchhoff();
        if (name == "dirichlet") return VertexCondition::dirichlet();
        throw ParseError("unknown named condition '" + name + "' at vertex '" + vertex_id + "'");
    }
    if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) {
        throw ParseError("malformed " + where);
    }
    const std::string type = j["type"].get<std::string>();
    if (type == "general") {
        if (!j.contains("A") || !j.contains("B")) {
            throw ParseError(where + " needs matrices A and B");
        }
        return VertexCondition::general(parse_matrix(j["A"], where), parse_matrix(j["B"], where));
    }
    if (type == "constant") {
        if (!j.contains("matrix")) {
            throw ParseError(where + " needs a matrix");
        }
        return VertexCondition::constant(parse_matrix(j["matrix"], where));
    }
    throw ParseError("unknown condition type '" + type + "' at vertex '" + vertex_id + "'");
}

json emit_condition(const VertexCondition& c) {
    switch (c.kind()) {
        case VertexCondition::Kind::NeumannKirchhoff:
            return json("neumann_kirchhoff");
        case VertexCondition::Kind::Dirichlet:
            return json("dirichlet");
        case VertexCondition::Kind::General:
            return json{{"type", "general"}, {"A", emit_matrix(c.A())}, {"B", emit_matrix(c.B())}};
        case VertexCondition::Kind::Constant:
            return json{{"type", "constant"}, {"matrix", emit_matrix(c.S())}};
    }
    throw ParseError("unreachable condition kind");
}

}  // namespace

GraphDocument parse_graph_file(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("vertices") || !doc.contains("edges")) {
        throw ParseError("document must be an object with 'vertices' and 'edges'");
    }
    if (!doc["vertices"].is_array() || !doc["edges"].is_array()) {
        throw ParseError("'vertices' and 'edges' must be arrays");
    }

    GraphBuilder builder;
    std::vector<std::pair<std::string, json>> raw_conditions;
    for (const json& v : doc["vertices"]) {
        if (!v.is_object() || !v.contains("id") || !v["id"].is_string()) {
            throw ParseError("every vertex needs a string 'id'");
        }
        const std::string id = v["id"].get<std::string>();
        builder.add_vertex(id);
        raw_conditions.emplace_back(id, v.contains("condition") ? v["condition"]
                                                                : json("neumann_kirchhoff"));
    }

    for (const json& e : doc["edges"]) {
        if (!e.is_object() || !e.contains("id") || !e["id"].is_string() ||
            !e.contains("endpoints") || !e["endpoints"].is_array()) {
            throw ParseError("every edge needs a string 'id' and an 'endpoints' array");
        }
        const std::string id = e["id"].get<std::string>();
        const json& ends = e["endpoints"];
        for (const json& end : ends) {
            if (!end.is_string()) {
                throw ParseError("endpoints of edge '" + id + "' must be vertex ids");
            }
        }
        const bool is_lead = e.contains("length") && e["length"].is_string() &&
                             e["length"].get<std::string>() == "lead";
        if (is_lead) {
            if (ends.size() != 1) {
                throw ParseError("lead '" + id + "' must have exactly one endpoint");
            }
            builder.add_lead(id, ends[0].get<std::string>());
        } else {
            if (!e.contains("length") || !e["length"].is_number()) {
                throw ParseError("edge '" + id + "' needs a numeric length or \"lead\"");
            }
            if (ends.size() != 2) {
                throw ParseError("bond '" + id + "' must have exactly two endpoints");
            }
            const double length = e["length"].get<double>();
            if (!(length > 0.0)) {
                throw ParseError("edge '" + id + "' has non-positive length");
            }
            builder.add_bond(id, ends[0].get<std::string>(), ends[1].get<std::string>(), length);
        }
    }

    GraphDocument result;
    try {
        result.graph = builder.build();
    } catch (const ValidationError& e) {
        throw ParseError(e.what());
    }

    result.conditions.reserve(raw_conditions.size());
    for (const auto& [id, raw] : raw_conditions) {
        VertexCondition cond = parse_condition(raw, id);
        try {
            validate_condition(cond, result.graph.degree(result.graph.vertex_index(id)));
        } catch (const ValidationError& e) {
            throw ParseError("vertex '" + id + "': " + e.what());
        }
        result.conditions.push_back(std::move(cond));
    }

    if (doc.contains("metadata")) {
        result.metadata_json = doc["metadata"].dump();
    }
    return result;
}

GraphDocument load_graph_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open graph file '" + path.string() + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_graph_file(buffer.str());
}

std::string emit_graph_file(const GraphDocument& doc) {
    const MetricGraph& g = doc.graph;
    json out;
    try {
        out["metadata"] = json::parse(doc.metadata_json);
    } catch (const json::parse_error&) {
        out["metadata"] = json::object();
    }

    json vertices = json::array();
    for (int v = 0; v < g.num_vertices(); ++v) {
        vertices.push_back(
            json{{"id", g.vertices()[v].id}, {"condition", emit_condition(doc.conditions[v])}});
    }
    out["vertices"] = vertices;

    json edges = json::array();
    for (const EdgeRecord& e : g.edges()) {
        json je{{"id", e.id}};
        if (e.is_lead()) {
            je["endpoints"] = json::array({g.vertices()[e.v0].id});
            je["length"] = "lead";
        } else {
            je["endpoints"] = json::array({g.vertices()[e.v0].id, g.vertices()[e.v1].id});
            je["length"] = e.length;
        }
        edges.push_back(je);
    }
    out["edges"] = edges;
    return out.dump(2) + "\n";
}

}  // namespace qgraph
