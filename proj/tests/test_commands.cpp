#include <doctest.h>

#include <cmath>
#include <sstream>

#include "pertkit/commands.hpp"

using namespace pertkit;
using nlohmann::json;

namespace {

// parse "a,b,c" rows of a CSV body (skipping '#' metadata and header lines)
std::vector<std::vector<double>> csv_rows(const std::string& text) {
    std::vector<std::vector<double>> rows;
    std::istringstream is(text);
    std::string line;
    bool header_seen = false;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {  // column names
            header_seen = true;
            continue;
        }
        std::vector<double> row;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
        rows.push_back(row);
    }
    return rows;
}

}  // namespace

TEST_CASE("series command emits the golden rows") {
    const auto res = cli::run_command("series", json{{"lambda", 0.02}, {"max_order", 12}});
    REQUIRE(res.exit_code == 0);
    CHECK(res.output.rfind("# {", 0) == 0);  // metadata header line
    CHECK(res.output.find("\"format_version\":1") != std::string::npos);
    CHECK(res.output.find("\"config\"") != std::string::npos);

    const auto rows = csv_rows(res.output);
    REQUIRE(rows.size() == 13);
    CHECK(rows[5][1] == doctest::Approx(1.7478728).epsilon(1e-7));
    CHECK(rows[10][1] == doctest::Approx(1.7478818).epsilon(1e-7));
    CHECK(rows[0][1] == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-12));
}

TEST_CASE("series error column is minimized near the optimal order") {
    const auto res = cli::run_command("series", json{{"lambda", 0.02}, {"max_order", 20}});
    REQUIRE(res.exit_code == 0);
    const auto rows = csv_rows(res.output);
    int argmin = 0;
    for (size_t i = 0; i < rows.size(); ++i)
        if (rows[i][2] < rows[static_cast<size_t>(argmin)][2]) argmin = static_cast<int>(i);
    CHECK(argmin >= 11);
    CHECK(argmin <= 14);
}

TEST_CASE("identical configs give bit-identical output") {
    const json cfg{{"lambda", 0.02}, {"max_order", 15}};
    const auto a = cli::run_command("series", cfg);
    const auto b = cli::run_command("series", cfg);
    CHECK(a.output == b.output);

    const json scfg{{"lambda_grid", {0.02, 0.5}}};
    const auto c = cli::run_command("sweep", scfg);
    const auto d = cli::run_command("sweep", scfg);
    CHECK(c.output == d.output);
}

TEST_CASE("unknown fields are rejected with exit code 2") {
    const auto res = cli::run_command("series", json{{"lambda", 0.02}, {"oops", 1}});
    CHECK(res.exit_code == 2);
    CHECK(res.output.empty());
    const auto err = json::parse(res.error_json);
    CHECK(err["error"]["code"] == "config");
    CHECK(std::string(err["error"]["message"]).find("oops") != std::string::npos);
}

TEST_CASE("unknown command is a config error") {
    const auto res = cli::run_command("frobnicate", json::object());
    CHECK(res.exit_code == 2);
    CHECK(cli::known_command("series"));
    CHECK(!cli::known_command("frobnicate"));
}

TEST_CASE("bad format_version is rejected") {
    const auto res = cli::run_command("saddle", json{{"format_version", 99}});
    CHECK(res.exit_code == 2);
}

TEST_CASE("sweep validates the grid and beats truncation") {
    const auto bad = cli::run_command("sweep", json{{"lambda_grid", {0.5, 1.5}}});
    CHECK(bad.exit_code == 2);

    const auto res = cli::run_command("sweep", json{{"lambda_grid", {0.02, 0.2, 1.0}}});
    REQUIRE(res.exit_code == 0);
    const auto rows = csv_rows(res.output);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0][1] == doctest::Approx(1.7478812).epsilon(5e-7));
    // columns: lambda, Z_exact, Z_1..Z_12, BorelSum
    REQUIRE(rows[0].size() == 15);
    for (const auto& row : rows) {
        const double z = row[1];
        const double borel_err = std::abs(row[14] - z);
        double best_partial = 1e300;
        for (int N = 1; N <= 12; ++N)
            best_partial = std::min(best_partial, std::abs(row[static_cast<size_t>(1 + N)] - z));
        CHECK(borel_err <= best_partial + 1e-12);
    }
}

TEST_CASE("borel command reports value and diagnostics") {
    const auto res = cli::run_command("borel", json{{"lambda", 0.02}, {"L", 10}, {"M", 10}});
    REQUIRE(res.exit_code == 0);
    const auto j = json::parse(res.output);
    CHECK(j["metadata"]["command"] == "borel");
    CHECK(std::abs(j["value"].get<double>() - 1.7478812) < 1e-5);
    CHECK(j["diagnostics"].contains("poles"));
}

TEST_CASE("saddle command emits the table and crossover") {
    const auto res = cli::run_command("saddle", json{{"lambda", 0.02}});
    REQUIRE(res.exit_code == 0);
    const auto j = json::parse(res.output);
    REQUIRE(j["saddles"].size() == 3);
    CHECK(j["crossover"]["k_paper"] == doctest::Approx(50.0));
    CHECK(j["crossover"]["k_exact"] == doctest::Approx(3.195).epsilon(1e-3));
}

TEST_CASE("sd command estimates the scaling degree of a JSON distribution") {
    const json cfg{{"distribution",
                    {{"variant", "regular"}, {"dimension", 1}, {"kernel", "inv_abs"},
                     {"punctured", true}}}};
    const auto res = cli::run_command("sd", cfg);
    REQUIRE(res.exit_code == 0);
    // fitted degree is carried in the metadata line
    const auto meta = json::parse(res.output.substr(2, res.output.find('\n') - 2));
    CHECK(std::abs(meta["fitted_degree"].get<double>() - 1.0) < 0.05);
    CHECK(meta["confident"] == true);
}

TEST_CASE("extend command produces the renormalization report") {
    const auto res = cli::run_command("extend", json{{"kernel", "inv_r4"}});
    REQUIRE(res.exit_code == 0);
    const auto j = json::parse(res.output);
    CHECK(std::abs(j["estimated_sd"].get<double>() - 4.0) < 0.1);
    CHECK(j["omega"] == 0.0);
    CHECK(j["counterterm_count"]["total"] == 1);
    CHECK(j["counterterm_count"]["rotation_invariant"] == 1);
    CHECK(std::abs(j["w_independence_residual"].get<double>()) < 1e-6);

    const auto bad = cli::run_command("extend", json{{"kernel", "unknown_kernel"}});
    CHECK(bad.exit_code == 2);
}

TEST_CASE("rgflow command tracks the 2 ln M law") {
    const auto res = cli::run_command(
        "rgflow", json{{"M0", 1000.0}, {"ratio", 2.0}, {"count", 3}, {"smoothing", 1e-3}});
    REQUIRE(res.exit_code == 0);
    const auto rows = csv_rows(res.output);
    REQUIRE(rows.size() == 3);
    for (const auto& row : rows) CHECK(std::abs(row[1] - row[2]) < 1e-3);  // value vs predicted
}

TEST_CASE("report command runs the golden battery") {
    const auto res = cli::run_command("report", json::object());
    const auto j = json::parse(res.output);
    for (const auto& check : j["checks"]) {
        INFO(check.dump());
        CHECK(check["pass"] == true);
    }
    CHECK(j["all_pass"] == true);
    CHECK(res.exit_code == 0);
}
