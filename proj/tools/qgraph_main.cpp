// qgraph: command line front end for the quantum graph library.
//
// Exit codes: 0 success, 2 usage error, 3 domain error (pole, scar,
// degeneracy, excluded wave numbers), 4 graph file parse error. Domain and
// parse failures print a machine-readable JSON object on stderr.

#include <charconv>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qgraph/errors.hpp"
#include "qgraph/graph_io.hpp"
#include "qgraph/greens.hpp"
#include "qgraph/parallel.hpp"
#include "qgraph/quantum_map.hpp"
#include "qgraph/scattering.hpp"
#include "qgraph/spectrum.hpp"

namespace {

using nlohmann::json;
using namespace qgraph;

// Shortest representation that round-trips to the same double.
std::string fmt(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

json json_complex(Complex z) { return json::array({z.real(), z.imag()}); }

json json_matrix(const ComplexMatrix& m) {
    json rows = json::array();
    for (int r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (int c = 0; c < m.cols(); ++c) row.push_back(json_complex(m(r, c)));
        rows.push_back(row);
    }
    return rows;
}

Complex parse_complex_arg(const std::string& text) {
    const auto comma = text.find(',');
    try {
        if (comma == std::string::npos) {
            return Complex(std::stod(text), 0.0);
        }
        return Complex(std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1)));
    } catch (const std::exception&) {
        throw CLI::ValidationError("expected RE or RE,IM, got '" + text + "'");
    }
}

GraphPoint parse_point_arg(const MetricGraph& graph, const std::string& text) {
    const auto colon = text.rfind(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 >= text.size()) {
        throw CLI::ValidationError("expected EDGE:X, got '" + text + "'");
    }
    double x = 0.0;
    try {
        x = std::stod(text.substr(colon + 1));
    } catch (const std::exception&) {
        throw CLI::ValidationError("bad coordinate in '" + text + "'");
    }
    return graph.point(text.substr(0, colon), x);
}

class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) throw Error("cannot open output file '" + path + "'");
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

private:
    std::ofstream file_;
};

const char* case_label(GreensCase c) {
    switch (c) {
        case GreensCase::Compact: return "compact";
        case GreensCase::LeadLead: return "lead-lead";
        case GreensCase::LeadBond: return "lead-bond";
        case GreensCase::BondLead: return "bond-lead";
        case GreensCase::BondBond: return "bond-bond";
    }
    return "unknown";
}

int run_spectrum(const GraphDocument& doc, double kmin, double kmax, double tol, double step,
                 const std::string& output) {
    EigenvalueSearchOptions opts;
    opts.tol = tol;
    opts.scan_step = step;
    auto roots = find_eigenvalues(doc.graph, doc.conditions, kmin, kmax, opts);

    Output out(output);
    out.stream() << "k,multiplicity,C\n";
    for (const auto& root : roots) {
        out.stream() << fmt(root.k) << ',' << root.multiplicity << ',';
        if (root.multiplicity == 1) {
            SpectralRoot full = eigenvector_and_normalization(doc.graph, doc.conditions, root.k);
            out.stream() << fmt(full.normalization);
        }
        out.stream() << '\n';
    }
    return 0;
}

int run_scattering(const GraphDocument& doc, const std::string& k_arg,
                   const std::string& output) {
    const Complex k = parse_complex_arg(k_arg);
    ScatteringOptions opts;
    opts.on_scar = ScarPolicy::Regularize;
    ScatteringResult r = scattering_matrix(doc.graph, doc.conditions, k, opts);

    json j;
    j["k"] = json_complex(r.k);
    j["sigma"] = json_matrix(r.sigma);
    j["rho"] = json_matrix(r.rho);
    j["scar"] = r.scar.has_value();
    j["regularized"] = r.regularized;
    j["conditioning_warning"] = r.conditioning_warning;
    if (r.scar) {
        j["scar_k0"] = r.scar->k0;
    }
    json leads = json::array();
    for (int li = 0; li < doc.graph.num_leads(); ++li) {
        leads.push_back(doc.graph.edge(doc.graph.lead_edge(li)).id);
    }
    j["leads"] = leads;

    Output out(output);
    out.stream() << j.dump(2) << '\n';
    return 0;
}

int run_greens(const GraphDocument& doc, const std::string& source_arg,
               const std::string& target_arg, const std::string& energy_arg,
               const std::string& output) {
    const GraphPoint source = parse_point_arg(doc.graph, source_arg);
    const GraphPoint target = parse_point_arg(doc.graph, target_arg);
    const EnergyPoint energy = EnergyPoint::from_energy(parse_complex_arg(energy_arg));
    GreensValue g = greens(doc.graph, doc.conditions, target, source, energy);

    json j;
    j["value"] = json_complex(g.value);
    j["case"] = case_label(g.kind);
    j["regularized"] = g.regularized;
    j["energy"] = json_complex(energy.E);
    j["k"] = json_complex(energy.k);

    Output out(output);
    out.stream() << j.dump(2) << '\n';
    return 0;
}

int run_sweep(const GraphDocument& doc, double kmin, double kmax, int steps,
              const std::string& quantity, const std::string& source_arg,
              const std::string& target_arg, const std::string& output) {
    if (steps < 1) throw CLI::ValidationError("--steps must be at least 1");
    if (!(kmin > 0.0 && kmax >= kmin)) {
        throw DomainError("need 0 < kmin <= kmax");
    }

    std::vector<double> ks(steps);
    for (int i = 0; i < steps; ++i) {
        ks[i] = steps == 1 ? kmin : kmin + i * (kmax - kmin) / (steps - 1);
    }

    std::string header;
    std::vector<std::string> rows(steps);

    if (quantity == "sigma") {
        if (doc.graph.is_compact()) {
            throw DomainError("quantity 'sigma' needs an open graph");
        }
        std::ostringstream h;
        h << "k";
        for (int i = 0; i < doc.graph.num_leads(); ++i) {
            for (int j = 0; j < doc.graph.num_leads(); ++j) {
                const std::string a = doc.graph.edge(doc.graph.lead_edge(i)).id;
                const std::string b = doc.graph.edge(doc.graph.lead_edge(j)).id;
                h << ",sigma_" << a << '_' << b << "_re,sigma_" << a << '_' << b << "_im";
            }
        }
        h << ",status";
        header = h.str();
        parallel_for(steps, [&](int i) {
            std::ostringstream row;
            row << fmt(ks[i]);
            ScatteringOptions opts;
            opts.on_scar = ScarPolicy::Regularize;
            try {
                ScatteringResult r =
                    scattering_matrix(doc.graph, doc.conditions, Complex(ks[i], 0.0), opts);
                for (int a = 0; a < r.sigma.rows(); ++a) {
                    for (int b = 0; b < r.sigma.cols(); ++b) {
                        row << ',' << fmt(r.sigma(a, b).real()) << ',' << fmt(r.sigma(a, b).imag());
                    }
                }
                row << ',' << (r.regularized ? "regularized"
                                             : (r.conditioning_warning ? "warning" : "ok"));
            } catch (const DomainError&) {
                for (int a = 0; a < doc.graph.num_leads() * doc.graph.num_leads(); ++a) {
                    row << ",,";
                }
                row << ",error";
            }
            rows[i] = row.str();
        });
    } else if (quantity == "xi") {
        if (!doc.graph.is_compact()) {
            throw DomainError("quantity 'xi' needs a compact graph");
        }
        header = "k,xi_re,xi_im";
        parallel_for(steps, [&](int i) {
            const Complex xi = secular(doc.graph, doc.conditions, Complex(ks[i], 0.0));
            std::ostringstream row;
            row << fmt(ks[i]) << ',' << fmt(xi.real()) << ',' << fmt(xi.imag());
            rows[i] = row.str();
        });
    } else if (quantity == "greens") {
        if (source_arg.empty() || target_arg.empty()) {
            throw CLI::ValidationError("quantity 'greens' needs --source and --target");
        }
        const GraphPoint source = parse_point_arg(doc.graph, source_arg);
        const GraphPoint target = parse_point_arg(doc.graph, target_arg);
        header = "k,G_re,G_im,status";
        parallel_for(steps, [&](int i) {
            std::ostringstream row;
            row << fmt(ks[i]);
            try {
                const EnergyPoint e = EnergyPoint::from_wavenumber(Complex(ks[i], 0.0));
                GreensValue g = greens(doc.graph, doc.conditions, target, source, e);
                row << ',' << fmt(g.value.real()) << ',' << fmt(g.value.imag()) << ','
                    << (g.regularized ? "regularized" : "ok");
            } catch (const PoleError&) {
                row << ",,,pole";
            } catch (const DomainError&) {
                row << ",,,error";
            }
            rows[i] = row.str();
        });
    } else {
        throw CLI::ValidationError("unknown quantity '" + quantity + "'");
    }

    Output out(output);
    out.stream() << header << '\n';
    for (const auto& row : rows) out.stream() << row << '\n';
    return 0;
}

int run_scars(const GraphDocument& doc, double kmin, double kmax, double tol, double step,
              const std::string& output) {
    auto scars = find_scars(doc.graph, doc.conditions, kmin, kmax, tol, step);

    Output out(output);
    out.stream() << "k0,eigenvalue_distance,residual,coupling_in,coupling_out\n";
    for (const auto& scar : scars) {
        QuantumMapSnapshot snap = quantum_map(doc.graph, doc.conditions, Complex(scar.k0, 0.0));
        const double residual = (snap.U_BB * scar.b - scar.b).norm();
        const double cin = (snap.U_LB * scar.b).norm();
        const double cout = (scar.b.adjoint() * snap.U_BL).norm();
        out.stream() << fmt(scar.k0) << ',' << fmt(scar.eigenvalue_distance) << ','
                     << fmt(residual) << ',' << fmt(cin) << ',' << fmt(cout) << '\n';
    }
    return 0;
}

int fail_json(const char* type, const std::string& message, int code,
              std::optional<double> nearest_k = std::nullopt) {
    json j;
    j["error"]["type"] = type;
    j["error"]["message"] = message;
    if (nearest_k) j["error"]["nearest_k"] = *nearest_k;
    std::cerr << j.dump() << '\n';
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectra, scattering matrices and Green's functions of finite quantum graphs"};
    app.require_subcommand(1);

    std::string graph_path, output, k_arg, energy_arg, source_arg, target_arg, quantity;
    double kmin = 0.0, kmax = 0.0, tol = 1e-10, scar_tol = 1e-8, step = 0.0;
    int steps = 0;

    CLI::App* spectrum = app.add_subcommand("spectrum", "Eigen-wavenumbers of a compact graph");
    spectrum->add_option("graph", graph_path, "graph description file")->required();
    spectrum->add_option("--kmin", kmin)->required();
    spectrum->add_option("--kmax", kmax)->required();
    spectrum->add_option("--tol", tol, "root accuracy")->capture_default_str();
    spectrum->add_option("--step", step, "scan step (0 = automatic)");
    spectrum->add_option("--output", output, "write CSV here instead of stdout");

    CLI::App* scattering = app.add_subcommand("scattering", "Scattering matrix at one wave number");
    scattering->add_option("graph", graph_path)->required();
    scattering->add_option("--k", k_arg, "wave number RE[,IM]")->required();
    scattering->add_option("--output", output);

    CLI::App* greens_cmd = app.add_subcommand("greens", "Green's function at one energy");
    greens_cmd->add_option("graph", graph_path)->required();
    greens_cmd->add_option("--source", source_arg, "source point EDGE:X")->required();
    greens_cmd->add_option("--target", target_arg, "target point EDGE:X")->required();
    greens_cmd->add_option("--energy", energy_arg, "energy RE[,IM]")->required();
    greens_cmd->add_option("--output", output);

    CLI::App* sweep = app.add_subcommand("sweep", "Tabulate a quantity over a wave number grid");
    sweep->add_option("graph", graph_path)->required();
    sweep->add_option("--kmin", kmin)->required();
    sweep->add_option("--kmax", kmax)->required();
    sweep->add_option("--steps", steps, "number of rows")->required();
    sweep->add_option("--quantity", quantity, "sigma | xi | greens")->required();
    sweep->add_option("--source", source_arg, "EDGE:X (quantity greens)");
    sweep->add_option("--target", target_arg, "EDGE:X (quantity greens)");
    sweep->add_option("--output", output);

    CLI::App* scars = app.add_subcommand("scars", "Detect bound states in the continuum");
    scars->add_option("graph", graph_path)->required();
    scars->add_option("--kmin", kmin)->required();
    scars->add_option("--kmax", kmax)->required();
    scars->add_option("--tol", scar_tol, "|lambda - 1| detection threshold")
        ->capture_default_str();
    scars->add_option("--step", step, "scan step (0 = automatic)");
    scars->add_option("--output", output);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        GraphDocument doc = load_graph_file(graph_path);
        if (spectrum->parsed()) return run_spectrum(doc, kmin, kmax, tol, step, output);
        if (scattering->parsed()) return run_scattering(doc, k_arg, output);
        if (greens_cmd->parsed())
            return run_greens(doc, source_arg, target_arg, energy_arg, output);
        if (sweep->parsed())
            return run_sweep(doc, kmin, kmax, steps, quantity, source_arg, target_arg, output);
        if (scars->parsed()) return run_scars(doc, kmin, kmax, scar_tol, step, output);
        return 2;
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << '\n';
        return 2;
    } catch (const ParseError& e) {
        return fail_json("parse", e.what(), 4);
    } catch (const PoleError& e) {
        return fail_json("pole", e.what(), 3, e.nearest_k);
    } catch (const ScarPresentError& e) {
        return fail_json("scar", e.what(), 3, e.scar.k0);
    } catch (const DegeneracyError& e) {
        return fail_json("degeneracy", e.what(), 3);
    } catch (const ScanError& e) {
        return fail_json("scan", e.what(), 3);
    } catch (const DomainError& e) {
        return fail_json("domain", e.what(), 3);
    } catch (const ValidationError& e) {
        return fail_json("validation", e.what(), 3);
    } catch (const std::exception& e) {
        return fail_json("internal", e.what(), 1);
    }
}
