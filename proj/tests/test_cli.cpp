#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "gdmd/cli.hpp"
#include "gdmd/snapshot_matrix.hpp"
#include "support.hpp"

using namespace gdmd;
using test::TempDir;

namespace {

struct CliResult {
    int code;
    std::string out;
    std::string err;
};

CliResult run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string path(const TempDir& dir, const std::string& leaf) { return (dir / leaf).string(); }

/// Parses a simple CSV with a header into rows of string fields.
std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> fields;
        size_t pos = 0;
        while (true) {
            const size_t comma = line.find(',', pos);
            fields.push_back(line.substr(pos, comma == std::string::npos ? std::string::npos
                                                                         : comma - pos));
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        rows.push_back(std::move(fields));
    }
    return rows;
}

} // namespace

TEST_CASE("gen writes a loadable, deterministic file") {
    TempDir dir("cli-gen");
    const std::vector<std::string> args = {"gen", "--n", "50",     "--len", "40",
                                           "--period", "6", "--noise", "0", "--seed", "7",
                                           "-o", path(dir, "d.gdmd")};
    CliResult r1 = run(args);
    REQUIRE(r1.code == 0);
    SnapshotMatrix m = load_matrix(dir / "d.gdmd", MatrixFormat::gdmd_binary);
    CHECK(m.rows() == 50);
    CHECK(m.cols() == 40);

    const std::string first = test::slurp(dir / "d.gdmd");
    CliResult r2 = run(args);
    REQUIRE(r2.code == 0);
    CHECK(test::slurp(dir / "d.gdmd") == first);
}

TEST_CASE("gen warns about unobservable periods but succeeds") {
    TempDir dir("cli-gen-warn");
    CliResult r = run({"gen", "--n", "10", "--len", "8", "--period", "200", "-o",
                       path(dir, "w.gdmd")});
    CHECK(r.code == 0);
    CHECK(r.err.find("warning") != std::string::npos);

    CliResult q = run({"gen", "--n", "10", "--len", "8", "--period", "200", "--quiet", "-o",
                       path(dir, "w2.gdmd")});
    CHECK(q.code == 0);
    CHECK(q.err.empty());
}

TEST_CASE("gen spec-json and csv output") {
    TempDir dir("cli-gen-json");
    {
        std::ofstream out(dir / "spec.json");
        out << R"({"kind":"periodic_field","n":12,"len":16,"periods":[{"p":5,"amp":1}],"noise_rel":0,"seed":3})";
    }
    CliResult r = run({"gen", "--spec-json", path(dir, "spec.json"), "--format", "csv", "-o",
                       path(dir, "d.csv")});
    REQUIRE(r.code == 0);
    SnapshotMatrix m = load_matrix(dir / "d.csv", MatrixFormat::csv);
    CHECK(m.rows() == 12);
    CHECK(m.cols() == 16);
}

TEST_CASE("usage errors exit 2") {
    CliResult r = run({"gen", "--n", "10", "--len", "8"});  // missing -o
    CHECK(r.code == 2);
    CliResult unknown = run({"frobnicate"});
    CHECK(unknown.code == 2);
    CliResult badflag = run({"ip", "--no-such-flag"});
    CHECK(badflag.code == 2);
    CliResult nothing = run({});
    CHECK(nothing.code == 2);
}

TEST_CASE("help exits 0") {
    CliResult r = run({"--help"});
    CHECK(r.code == 0);
    CHECK(r.out.find("gen") != std::string::npos);
}

TEST_CASE("ip on periodic data dips at the period and methods agree") {
    TempDir dir("cli-ip");
    REQUIRE(run({"gen", "--n", "60", "--len", "40", "--period", "6", "--noise", "0", "--seed",
                 "7", "-o", path(dir, "d.gdmd")})
                .code == 0);

    CliResult rec = run({"ip", "-i", path(dir, "d.gdmd"), "--kmax", "20", "--method",
                         "recursive", "-o", path(dir, "rec.csv")});
    REQUIRE(rec.code == 0);
    CliResult svd = run({"ip", "-i", path(dir, "d.gdmd"), "--kmax", "20", "--method", "svd",
                         "-o", path(dir, "svd.csv")});
    REQUIRE(svd.code == 0);

    auto rec_rows = parse_csv(test::slurp(dir / "rec.csv"));
    auto svd_rows = parse_csv(test::slurp(dir / "svd.csv"));
    REQUIRE(rec_rows.size() == 21);  // header + 20
    REQUIRE(rec_rows[0][0] == "k");
    const double r6 = std::stod(rec_rows[6][1]);
    CHECK(r6 <= 1e-6);
    for (size_t i = 1; i < rec_rows.size(); ++i) {
        const double a = std::stod(rec_rows[i][1]);
        const double b = std::stod(svd_rows[i][1]);
        CHECK(std::abs(a - b) <= 1e-6);
    }
}

TEST_CASE("ip failure modes") {
    TempDir dir("cli-ip-bad");
    CliResult missing = run({"ip", "-i", path(dir, "absent.gdmd")});
    CHECK(missing.code == 3);
    CHECK_FALSE(missing.err.empty());

    {
        std::ofstream out(dir / "bad.csv");
        out << "1,notanumber\n2,3\n";
    }
    CliResult bad = run({"ip", "-i", path(dir, "bad.csv"), "--format", "csv"});
    CHECK(bad.code == 3);
    CHECK(bad.err.find("row") != std::string::npos);

    REQUIRE(run({"gen", "--n", "8", "--len", "10", "--period", "3", "-o", path(dir, "d.gdmd")})
                .code == 0);
    CliResult overrun = run({"ip", "-i", path(dir, "d.gdmd"), "--kmax", "9"});
    CHECK(overrun.code == 3);
}

TEST_CASE("specgram matches ip on row 1 and renders svg") {
    TempDir dir("cli-sg");
    REQUIRE(run({"gen", "--n", "40", "--len", "30", "--period", "5", "--noise", "0.001",
                 "--seed", "9", "-o", path(dir, "d.gdmd")})
                .code == 0);
    REQUIRE(run({"specgram", "-i", path(dir, "d.gdmd"), "--lmax", "8", "--kmax", "20", "-o",
                 path(dir, "sg.csv"), "--svg", path(dir, "sg.svg")})
                .code == 0);
    REQUIRE(run({"ip", "-i", path(dir, "d.gdmd"), "--kmax", "20", "-o", path(dir, "ip.csv")})
                .code == 0);

    auto sg_rows = parse_csv(test::slurp(dir / "sg.csv"));
    auto ip_rows = parse_csv(test::slurp(dir / "ip.csv"));
    REQUIRE(sg_rows.size() == 9);
    REQUIRE(sg_rows[0].size() == 21);
    for (size_t k = 1; k <= 20; ++k) {
        const double a = std::stod(sg_rows[1][k]);
        const double b = std::stod(ip_rows[k][1]);
        CHECK(a == doctest::Approx(b).epsilon(1e-12));
    }

    const std::string svg = test::slurp(dir / "sg.svg");
    CHECK(test::xml_well_formed(svg));
    CHECK(svg.find("nan") == std::string::npos);

    // deterministic rendering
    REQUIRE(run({"specgram", "-i", path(dir, "d.gdmd"), "--lmax", "8", "--kmax", "20", "-o",
                 path(dir, "sg2.csv"), "--svg", path(dir, "sg2.svg")})
                .code == 0);
    CHECK(test::slurp(dir / "sg.svg") == test::slurp(dir / "sg2.svg"));
    CHECK(test::slurp(dir / "sg.csv") == test::slurp(dir / "sg2.csv"));
}

TEST_CASE("specgram validation exit") {
    TempDir dir("cli-sg-bad");
    REQUIRE(run({"gen", "--n", "8", "--len", "10", "--period", "3", "-o", path(dir, "d.gdmd")})
                .code == 0);
    CliResult r = run({"specgram", "-i", path(dir, "d.gdmd"), "--lmax", "30"});
    CHECK(r.code == 3);
}

TEST_CASE("fit emits spectrum, coefficients, modes, and svg") {
    TempDir dir("cli-fit");
    REQUIRE(run({"gen", "--n", "60", "--len", "40", "--period", "6", "--noise", "0", "--seed",
                 "7", "-o", path(dir, "d.gdmd")})
                .code == 0);
    REQUIRE(run({"fit", "-i", path(dir, "d.gdmd"), "-n", "7", "-o", path(dir, "eig.csv"),
                 "--coeffs", path(dir, "c.csv"), "--modes", path(dir, "modes.gdmd"), "--svg",
                 path(dir, "circle.svg")})
                .code == 0);

    auto eig = parse_csv(test::slurp(dir / "eig.csv"));
    REQUIRE(eig.size() == 7);  // header + 6 eigenvalues
    REQUIRE(eig[0] == std::vector<std::string>{"re", "im", "modulus", "phase"});
    for (size_t i = 1; i < eig.size(); ++i)
        CHECK(std::abs(std::stod(eig[i][2]) - 1.0) <= 1e-6);

    auto coeffs = parse_csv(test::slurp(dir / "c.csv"));
    REQUIRE(coeffs.size() == 7);
    CHECK(std::stod(coeffs[1][1]) == doctest::Approx(1.0).epsilon(1e-8));

    CHECK(test::xml_well_formed(test::slurp(dir / "circle.svg")));
    CHECK(std::filesystem::exists(dir / "modes.gdmd"));
    CHECK(std::filesystem::exists(dir / "modes.gdmd.json"));

    // misspecified n distorts the spectrum away from the unit circle
    REQUIRE(run({"fit", "-i", path(dir, "d.gdmd"), "-n", "5", "-o", path(dir, "eig5.csv"),
                 "--quiet"})
                .code == 0);
    auto eig5 = parse_csv(test::slurp(dir / "eig5.csv"));
    double worst = 0.0;
    for (size_t i = 1; i < eig5.size(); ++i)
        worst = std::max(worst, std::abs(std::stod(eig5[i][2]) - 1.0));
    CHECK(worst > 1e-2);
}

TEST_CASE("fit with lags routes through stacking") {
    TempDir dir("cli-fit-lags");
    REQUIRE(run({"gen", "--n", "30", "--len", "30", "--period", "4", "--noise", "0", "--seed",
                 "2", "-o", path(dir, "d.gdmd")})
                .code == 0);
    CliResult r = run({"fit", "-i", path(dir, "d.gdmd"), "-n", "5", "--lags", "1", "-o",
                       path(dir, "eig.csv")});
    REQUIRE(r.code == 0);
    auto eig = parse_csv(test::slurp(dir / "eig.csv"));
    REQUIRE(eig.size() == 5);
    for (size_t i = 1; i < eig.size(); ++i)
        CHECK(std::abs(std::stod(eig[i][2]) - 1.0) <= 1e-6);
}

TEST_CASE("fit validation exits") {
    TempDir dir("cli-fit-bad");
    REQUIRE(run({"gen", "--n", "8", "--len", "10", "--period", "3", "-o", path(dir, "d.gdmd")})
                .code == 0);
    CHECK(run({"fit", "-i", path(dir, "d.gdmd"), "-n", "11"}).code == 3);
    CHECK(run({"fit", "-i", path(dir, "d.gdmd"), "-n", "1"}).code == 3);
    CHECK(run({"fit", "-i", path(dir, "d.gdmd")}).code == 2);  // -n required
}

TEST_CASE("select pipelines") {
    TempDir dir("cli-select");
    REQUIRE(run({"gen", "--n", "80", "--len", "40", "--period", "9", "--noise", "0.001",
                 "--seed", "5", "-o", path(dir, "d.gdmd")})
                .code == 0);

    SUBCASE("from a matrix") {
        CliResult r = run({"select", "-i", path(dir, "d.gdmd"), "--lmax", "12", "--kmax", "25"});
        REQUIRE(r.code == 0);
        auto j = nlohmann::json::parse(r.out);
        CHECK(j["n_star"] == 9);
        CHECK(j["confidence"] == "strong");
    }
    SUBCASE("from a precomputed spectrogram") {
        REQUIRE(run({"specgram", "-i", path(dir, "d.gdmd"), "--lmax", "12", "--kmax", "25",
                     "-o", path(dir, "sg.csv")})
                    .code == 0);
        CliResult r = run({"select", "--spectrogram", path(dir, "sg.csv")});
        REQUIRE(r.code == 0);
        auto j = nlohmann::json::parse(r.out);
        CHECK(j["n_star"] == 9);
    }
    SUBCASE("random data has no confidence") {
        PortableRng rng(55);
        save_matrix(SnapshotMatrix{rng.normal_matrix(60, 30)}, dir / "r.gdmd",
                    MatrixFormat::gdmd_binary);
        CliResult r = run({"select", "-i", path(dir, "r.gdmd"), "--lmax", "8"});
        REQUIRE(r.code == 0);
        auto j = nlohmann::json::parse(r.out);
        CHECK(j["confidence"] == "none");
    }
    SUBCASE("missing input is a usage error") {
        CliResult r = run({"select"});
        CHECK(r.code == 2);
    }
}

TEST_CASE("diag emits conditioning and the sensitivity table") {
    TempDir dir("cli-diag");
    save_matrix(SnapshotMatrix{Eigen::MatrixXd::Identity(6, 6)}, dir / "i.gdmd",
                MatrixFormat::gdmd_binary);
    CliResult r = run({"diag", "-i", path(dir, "i.gdmd"), "-o", path(dir, "cond.csv"),
                       "--prop1", path(dir, "prop1.csv"), "--triples", "50", "--dim", "20",
                       "--seed", "1"});
    REQUIRE(r.code == 0);

    auto cond = parse_csv(test::slurp(dir / "cond.csv"));
    REQUIRE(cond.size() == 7);
    for (size_t i = 1; i < cond.size(); ++i) {
        CHECK(std::stod(cond[i][1]) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(cond[i][2] == "ok");
    }

    auto table = parse_csv(test::slurp(dir / "prop1.csv"));
    REQUIRE(table.size() == 51);
    REQUIRE(table[0] == std::vector<std::string>{"i", "lhs", "rhs", "abs_diff"});
    for (size_t i = 1; i < table.size(); ++i) CHECK(std::stod(table[i][3]) <= 1e-9);

    // duplicated column shows up as a colinearity flag
    PortableRng rng(66);
    Eigen::VectorXd a = rng.normal_vector(8);
    Eigen::MatrixXd m(8, 3);
    m << a, rng.normal_vector(8), a;
    save_matrix(SnapshotMatrix{m}, dir / "dup.gdmd", MatrixFormat::gdmd_binary);
    CliResult dup = run({"diag", "-i", path(dir, "dup.gdmd"), "-o", path(dir, "dup.csv"),
                         "--triples", "1"});
    REQUIRE(dup.code == 0);
    auto dupcsv = parse_csv(test::slurp(dir / "dup.csv"));
    CHECK(dupcsv[3][2] == "colinear");
}

TEST_CASE("ip svg profile renders deterministically") {
    TempDir dir("cli-ip-svg");
    REQUIRE(run({"gen", "--n", "30", "--len", "25", "--period", "5", "--noise", "0.001",
                 "--seed", "4", "-o", path(dir, "d.gdmd")})
                .code == 0);
    REQUIRE(run({"ip", "-i", path(dir, "d.gdmd"), "-o", path(dir, "p.csv"), "--svg",
                 path(dir, "p.svg")})
                .code == 0);
    const std::string svg = test::slurp(dir / "p.svg");
    CHECK(test::xml_well_formed(svg));
    CHECK(svg.find("polyline") != std::string::npos);
    REQUIRE(run({"ip", "-i", path(dir, "d.gdmd"), "-o", path(dir, "p2.csv"), "--svg",
                 path(dir, "p2.svg")})
                .code == 0);
    CHECK(test::slurp(dir / "p.svg") == test::slurp(dir / "p2.svg"));
}
