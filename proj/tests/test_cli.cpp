#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "test_support.hpp"

namespace {

using nlohmann::json;

struct CliResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string fixture(const std::string& name) {
    return std::string(QGRAPH_FIXTURE_DIR) + "/" + name;
}

CliResult run_cli(const std::string& args) {
    const std::string err_file = std::string(std::getenv("TMPDIR") ? std::getenv("TMPDIR") : "/tmp") +
                                 "/qgraph_cli_stderr.txt";
    const std::string command =
        std::string(QGRAPH_CLI_PATH) + " " + args + " 2>" + err_file;
    CliResult result;
    FILE* pipe = popen(command.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buffer;
    while (size_t n = std::fread(buffer.data(), 1, buffer.size(), pipe)) {
        result.out.append(buffer.data(), n);
    }
    const int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;

    std::ifstream err(err_file);
    std::ostringstream err_text;
    err_text << err.rdbuf();
    result.err = err_text.str();
    return result;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (line.back() == ',') cells.push_back("");
        rows.push_back(std::move(cells));
    }
    return rows;
}

}  // namespace

TEST_CASE("spectrum command tabulates the interval eigenvalues") {
    auto r = run_cli("spectrum " + fixture("interval.json") + " --kmin 0.5 --kmax 20.5");
    REQUIRE(r.exit_code == 0);
    auto rows = parse_csv(r.out);
    REQUIRE(rows.size() == 21);
    CHECK(rows[0] == std::vector<std::string>{"k", "multiplicity", "C"});
    for (int n = 1; n <= 20; ++n) {
        CHECK(std::abs(std::stod(rows[n][0]) - n) <= 1e-8);
        CHECK(rows[n][1] == "1");
        CHECK(std::abs(std::stod(rows[n][2]) - M_PI) <= 1e-8);
    }
}

TEST_CASE("spectrum command reports degenerate multiplicities") {
    auto r = run_cli("spectrum " + fixture("loop.json") + " --kmin 0.5 --kmax 5.5");
    REQUIRE(r.exit_code == 0);
    auto rows = parse_csv(r.out);
    REQUIRE(rows.size() == 6);
    for (int n = 1; n <= 5; ++n) {
        CHECK(rows[n][1] == "2");
        CHECK(rows[n][2].empty());  // no normalization for degenerate roots
    }
}

TEST_CASE("scattering command flags and regularizes the lasso scar") {
    auto r = run_cli("scattering " + fixture("lasso.json") + " --k 6.283185307179586");
    REQUIRE(r.exit_code == 0);
    json j = json::parse(r.out);
    CHECK(j["scar"] == true);
    CHECK(j["regularized"] == true);
    CHECK(std::abs(j["sigma"][0][0][0].get<double>() - 1.0) <= 1e-10);
    CHECK(std::abs(j["sigma"][0][0][1].get<double>()) <= 1e-10);
    CHECK(std::abs(j["rho"][0][0][0].get<double>() - 1.0) <= 1e-9);
    CHECK(std::abs(j["rho"][1][0][0].get<double>() - 1.0) <= 1e-9);
}

TEST_CASE("scattering command matches the closed form off the scar") {
    auto r = run_cli("scattering " + fixture("lasso.json") + " --k 1.7");
    REQUIRE(r.exit_code == 0);
    json j = json::parse(r.out);
    const qgraph::Complex sigma(j["sigma"][0][0][0].get<double>(),
                                j["sigma"][0][0][1].get<double>());
    CHECK(std::abs(sigma - qtest::lasso_sigma(qgraph::Complex(1.7, 0.0))) <= 1e-12);
    CHECK(j["scar"] == false);
}

TEST_CASE("greens command evaluates the lead-lead kernel") {
    auto r = run_cli("greens " + fixture("lasso.json") +
                     " --source e1:0.3 --target e1:0.8 --energy 1.0,0.2");
    REQUIRE(r.exit_code == 0);
    json j = json::parse(r.out);
    CHECK(j["case"] == "lead-lead");
    const qgraph::Complex value(j["value"][0].get<double>(), j["value"][1].get<double>());
    const auto e = qgraph::EnergyPoint::from_energy(qgraph::Complex(1.0, 0.2));
    CHECK(std::abs(value - qtest::lasso_greens(e.k, 1.0, 0.8, true, 0.3, true)) <= 1e-12);
}

TEST_CASE("sweep command produces ordered CSV rows") {
    auto r = run_cli("sweep " + fixture("lasso.json") +
                     " --kmin 0.5 --kmax 3.0 --steps 26 --quantity sigma");
    REQUIRE(r.exit_code == 0);
    auto rows = parse_csv(r.out);
    REQUIRE(rows.size() == 27);
    CHECK(rows[0][0] == "k");
    double previous = 0.0;
    for (size_t i = 1; i < rows.size(); ++i) {
        const double k = std::stod(rows[i][0]);
        CHECK(k > previous);
        previous = k;
        const qgraph::Complex sigma(std::stod(rows[i][1]), std::stod(rows[i][2]));
        CHECK(std::abs(std::abs(sigma) - 1.0) <= 1e-10);
        CHECK(rows[i][3] == "ok");
    }
}

TEST_CASE("sweep command tabulates the secular function") {
    auto r = run_cli("sweep " + fixture("interval.json") +
                     " --kmin 0.5 --kmax 1.5 --steps 11 --quantity xi");
    REQUIRE(r.exit_code == 0);
    auto rows = parse_csv(r.out);
    REQUIRE(rows.size() == 12);
    const qgraph::Complex xi(std::stod(rows[1][1]), std::stod(rows[1][2]));
    const qgraph::Complex expected =
        1.0 - std::exp(qgraph::Complex(0.0, 2.0 * 0.5 * M_PI));
    CHECK(std::abs(xi - expected) <= 1e-12);
}

TEST_CASE("scars command lists the lasso scar series") {
    auto r = run_cli("scars " + fixture("lasso.json") + " --kmin 1 --kmax 13");
    REQUIRE(r.exit_code == 0);
    auto rows = parse_csv(r.out);
    REQUIRE(rows.size() == 3);
    CHECK(std::abs(std::stod(rows[1][0]) - 2.0 * M_PI) <= 1e-8);
    CHECK(std::abs(std::stod(rows[2][0]) - 4.0 * M_PI) <= 1e-8);
    CHECK(std::stod(rows[1][2]) <= 1e-8);  // residual column
}

TEST_CASE("--output writes the same content to a file") {
    const std::string path = std::string(std::getenv("TMPDIR") ? std::getenv("TMPDIR") : "/tmp") +
                             "/qgraph_spectrum_out.csv";
    auto to_stdout = run_cli("spectrum " + fixture("interval.json") + " --kmin 0.5 --kmax 3.5");
    auto to_file =
        run_cli("spectrum " + fixture("interval.json") + " --kmin 0.5 --kmax 3.5 --output " + path);
    REQUIRE(to_stdout.exit_code == 0);
    REQUIRE(to_file.exit_code == 0);
    CHECK(to_file.out.empty());
    std::ifstream in(path);
    std::ostringstream content;
    content << in.rdbuf();
    CHECK(content.str() == to_stdout.out);
}

TEST_CASE("exit codes") {
    SUBCASE("missing file is a parse error (4)") {
        auto r = run_cli("spectrum /nonexistent.json --kmin 1 --kmax 2");
        CHECK(r.exit_code == 4);
        json j = json::parse(r.err);
        CHECK(j["error"]["type"] == "parse");
    }
    SUBCASE("unknown subcommand is a usage error (2)") {
        auto r = run_cli("frobnicate");
        CHECK(r.exit_code == 2);
    }
    SUBCASE("missing required option is a usage error (2)") {
        auto r = run_cli("spectrum " + fixture("interval.json"));
        CHECK(r.exit_code == 2);
    }
    SUBCASE("spectrum of an open graph is a domain error (3)") {
        auto r = run_cli("spectrum " + fixture("lasso.json") + " --kmin 1 --kmax 2");
        CHECK(r.exit_code == 3);
        json j = json::parse(r.err);
        CHECK(j["error"]["type"] == "domain");
    }
    SUBCASE("Green's function on the spectrum is a pole error (3)") {
        auto r = run_cli("greens " + fixture("interval.json") +
                         " --source e1:0.5 --target e1:1.5 --energy 4.0");
        CHECK(r.exit_code == 3);
        json j = json::parse(r.err);
        CHECK(j["error"]["type"] == "pole");
        CHECK(std::abs(j["error"]["nearest_k"].get<double>() - 2.0) < 1e-6);
    }
    SUBCASE("malformed document is a parse error (4) with the edge named") {
        const std::string path = std::string(std::getenv("TMPDIR") ? std::getenv("TMPDIR") : "/tmp") +
                                 "/qgraph_bad_graph.json";
        std::ofstream out(path);
        out << R"({"vertices": [{"id": "v1"}, {"id": "v2"}],
                   "edges": [{"id": "broken", "endpoints": ["v1","v2"], "length": -1.0}]})";
        out.close();
        auto r = run_cli("spectrum " + path + " --kmin 1 --kmax 2");
        CHECK(r.exit_code == 4);
        CHECK(r.err.find("broken") != std::string::npos);
    }
}
