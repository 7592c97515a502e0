#include <cmath>
#include <filesystem>
#include <map>
#include <sstream>

#include <gtest/gtest.h>

#include "ballflow/curvature.hpp"
#include "ballflow/error.hpp"
#include "ballflow/flow.hpp"
#include "ballflow/io.hpp"
#include "cli_commands.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace ballflow;
namespace fs = std::filesystem;

namespace {

const fs::path kData = BALLFLOW_DATA_DIR;

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result invoke(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = ballflow::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

class TempDir {
public:
    TempDir() {
        path_ = fs::temp_directory_path() /
                ("ballflow_test_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
                 ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    std::string file(const std::string& name, const std::string& text = {}) const {
        const fs::path p = path_ / name;
        if (!text.empty()) write_text_file(p, text);
        return p.string();
    }

private:
    fs::path path_;
};

std::map<std::string, std::string> key_values(const std::string& text, char sep) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        const auto pos = line.find(sep);
        if (pos == std::string::npos) continue;
        std::string k = line.substr(0, pos), v = line.substr(pos + 1);
        while (!k.empty() && k.back() == ' ') k.pop_back();
        while (!v.empty() && v.front() == ' ') v.erase(v.begin());
        kv[k] = v;
    }
    return kv;
}

std::string five() { return (kData / "5cell.tri").string(); }

}  // namespace

TEST(Io, FormatRealRoundTrips) {
    for (double x : {0.1, 1.0 / 3.0, 4 * oracle::kPi - 4 * oracle::alpha_bar(), 1e-300, 6.02e23})
        EXPECT_EQ(std::stod(format_real(x)), x);
}

TEST(Io, RadiiRoundTripAndErrors) {
    const std::vector<double> r{1.0 / 3.0, 2.5, 1e-7, 7.0};
    const PackingVector back = parse_radii(format_radii(r));
    EXPECT_EQ(back.vector(), r);
    EXPECT_EQ(parse_radii("# header\n1.5\n\n  2 # trailing\n").vector(), (std::vector<double>{1.5, 2}));
    auto line_of = [](const std::string& text) {
        try {
            parse_radii(text);
        } catch (const ParseError& e) {
            return e.line();
        } catch (const InputError&) {
            return -1;
        }
        return 0;
    };
    EXPECT_EQ(line_of("1\nabc\n"), 2);
    EXPECT_EQ(line_of("1\n2 3\n"), 2);
    EXPECT_EQ(line_of("1\nnan\n"), 2);
    EXPECT_NE(line_of("1\n-2\n"), 0);
    EXPECT_NE(line_of(""), 0);
}

TEST(Io, TraceCsvRoundTripMatchesRecomputation) {
    const auto t = generate_boundary_4simplex();
    FlowConfig cfg;
    cfg.record_every = 7;
    const FlowOutcome out = run(t, PackingVector({1.4, 0.6, 1.0, 1.1, 0.9}), cfg);
    const std::string csv = format_trace_csv(out.trace);
    EXPECT_EQ(csv.substr(0, csv.find('\n') + 1), trace_csv_header(5) + (trace_csv_header(5).back() == '\n' ? "" : "\n"));
    const auto rows = parse_trace_csv(csv);
    ASSERT_EQ(rows.size(), out.trace.records.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const TraceRow& row = rows[i];
        const FlowRecord& rec = out.trace.records[i];
        EXPECT_EQ(row.t, rec.t);
        EXPECT_EQ(row.r, rec.r);
        // Recompute the derived columns from the stored radii.
        const CurvatureReport rep = extended_curvature(t, PackingVector(row.r));
        for (int v = 0; v < 5; ++v) EXPECT_NEAR(row.k[v], rep.k[v], 1e-9);
        EXPECT_NEAR(row.lambda, rep.lambda, 1e-9);
        EXPECT_NEAR(row.s, rep.s, 1e-9 * std::abs(rep.s));
        EXPECT_NEAR(row.l1, rep.l1, 1e-9 * rep.l1);
        EXPECT_EQ(row.n_virtual, rep.virtual_tets.size());
    }
    EXPECT_THROW(parse_trace_csv("t,r_0\n1,2,3\n"), ParseError);
}

TEST(Io, DigestAndManifest) {
    EXPECT_EQ(digest(""), "cbf29ce484222325");
    EXPECT_EQ(digest("a"), "af63dc4c8601ec8c");
    RunManifest m;
    m.set("command", "flow");
    m.set("tol", 0.5);
    const auto kv = key_values(m.text(), '=');
    EXPECT_EQ(kv.at("command"), "flow");
    EXPECT_EQ(kv.at("tol"), "0.5");
    EXPECT_EQ(RunManifest::path_for("out/trace.csv").string(), "out/trace.csv.manifest");
    const std::string ts = timestamp_now();
    EXPECT_EQ(ts.size(), 20u);
    EXPECT_EQ(ts.back(), 'Z');
}

TEST(Cli, ValidateExitCodes) {
    const Result ok = invoke({"validate", five()});
    EXPECT_EQ(ok.code, 0);
    EXPECT_NE(ok.out.find("result passed"), std::string::npos);
    EXPECT_EQ(invoke({"validate", (kData / "16cell.tri").string()}).code, 0);
    EXPECT_EQ(invoke({"validate", (kData / "join_5_7.tri").string()}).code, 0);
    const Result bad = invoke({"validate", (kData / "single_tet.tri").string()});
    EXPECT_EQ(bad.code, 1);
    EXPECT_NE(bad.out.find("face-pairing"), std::string::npos);
}

TEST(Cli, ParseAndUsageErrors) {
    TempDir dir;
    const Result parse = invoke({"validate", dir.file("bad.tri", "vertices 4\ntet 0 1 2 9\n")});
    EXPECT_EQ(parse.code, 2);
    EXPECT_NE(parse.err.find("line 2"), std::string::npos) << parse.err;
    EXPECT_EQ(invoke({"curvature", five(), "--radii", dir.file("r.txt", "1\n1\nx\n1\n1\n")}).code, 2);
    EXPECT_EQ(invoke({}).code, 64);
    EXPECT_EQ(invoke({"validate"}).code, 64);
    EXPECT_EQ(invoke({"flow", five(), "--uniform", "1", "--bogus"}).code, 64);
    EXPECT_EQ(invoke({"curvature", five(), "--uniform", "1", "--format", "xml"}).code, 64);
    EXPECT_EQ(invoke({"--version"}).out, std::string(kVersion) + "\n");
}

TEST(Cli, CurvatureVirtualAndExtended) {
    TempDir dir;
    const std::string radii = dir.file("r.txt", "1\n1\n1\n1\n0.01\n");
    const Result v = invoke({"curvature", five(), "--radii", radii});
    EXPECT_EQ(v.code, 3);
    EXPECT_NE(v.err.find("tetrahedron 1 apex 4"), std::string::npos) << v.err;

    const Result e = invoke({"curvature", five(), "--radii", radii, "--extended", "--format", "csv"});
    ASSERT_EQ(e.code, 0) << e.err;
    const auto r = PackingVector({1, 1, 1, 1, 0.01});
    const CurvatureReport rep = extended_curvature(generate_boundary_4simplex(), r);
    EXPECT_EQ(e.out, format_curvature_csv(rep, r));
    EXPECT_NEAR(rep.k[4], -4 * oracle::kPi, 1e-12);

    const std::string first = dir.file("r0.txt", "0.01\n1\n1\n1\n1\n");
    EXPECT_EQ(invoke({"curvature", five(), "--radii", first}).code, 3);
    const Result e0 = invoke({"curvature", five(), "--radii", first, "--extended", "--format", "csv"});
    ASSERT_EQ(e0.code, 0);
    const std::string row0 = e0.out.substr(e0.out.find('\n') + 1, e0.out.find('\n', e0.out.find('\n') + 1) - e0.out.find('\n') - 1);
    EXPECT_EQ(row0, "0,0.01," + format_real(-4 * oracle::kPi)) << e0.out;

    const Result u = invoke({"curvature", five(), "--uniform", "1"});
    ASSERT_EQ(u.code, 0);
    const auto kv = key_values(u.out, ' ');
    EXPECT_NEAR(std::stod(kv.at("lambda")), 4 * oracle::kPi - 4 * oracle::alpha_bar(), 1e-13);
}

TEST(Cli, InputConfigGeometryErrors) {
    TempDir dir;
    EXPECT_EQ(invoke({"curvature", five(), "--radii", dir.file("r.txt", "1\n1\n1\n")}).code, 6);
    EXPECT_EQ(invoke({"curvature", five()}).code, 6);
    EXPECT_EQ(invoke({"validate", dir.file("missing.tri")}).code, 6);
    EXPECT_EQ(invoke({"flow", five(), "--uniform", "1", "--dt-min", "1", "--dt-init", "0.1"}).code, 7);
    EXPECT_EQ(invoke({"flow", five(), "--uniform", "1", "--t-max", "-1"}).code, 7);
    // Two vanishing radii in one tetrahedron leave no strict minimum.
    const std::string degenerate = dir.file("g.txt", "1\n1\n1\n1e-300\n1e-300\n");
    EXPECT_EQ(invoke({"curvature", five(), "--radii", degenerate, "--extended"}).code, 8);
}

TEST(Cli, FlowOutcomesAndManifest) {
    TempDir dir;
    const std::string radii = dir.file("r.txt", "1.4\n0.6\n1\n1.1\n0.9\n");
    const std::string csv = dir.file("trace.csv");
    const Result ok = invoke({"flow", five(), "--radii", radii, "--out", csv});
    ASSERT_EQ(ok.code, 0) << ok.err;
    EXPECT_NE(ok.out.find("outcome Converged"), std::string::npos) << ok.out;
    ASSERT_TRUE(fs::exists(csv));
    ASSERT_TRUE(fs::exists(csv + ".manifest"));
    const auto m = key_values(read_text_file(csv + ".manifest"), '=');
    EXPECT_EQ(m.at("command"), "flow");
    EXPECT_EQ(m.at("version"), kVersion);
    EXPECT_EQ(m.at("input_digest"), digest(read_text_file(five())));
    EXPECT_EQ(m.at("radii_digest"), digest(read_text_file(radii)));
    EXPECT_EQ(m.at("mode"), "extended");
    EXPECT_TRUE(m.count("start") && m.count("end"));

    const Result limit = invoke({"flow", five(), "--radii", radii, "--t-max", "0.01"});
    EXPECT_EQ(limit.code, 5);
    EXPECT_NE(limit.out.find("outcome TimeLimit"), std::string::npos) << limit.out;

    const Result still = invoke({"flow", five(), "--uniform", "2"});
    EXPECT_EQ(still.code, 0);
    EXPECT_NE(still.out.find("records 1\n"), std::string::npos) << still.out;
    // Without --out or --manifest the manifest goes to stderr.
    EXPECT_NE(still.err.find("command = flow"), std::string::npos) << still.err;

    const std::string side = dir.file("side.manifest");
    EXPECT_EQ(invoke({"minimize", five(), "--manifest", side}).code, 0);
    EXPECT_TRUE(fs::exists(side));
}

TEST(Cli, FlowTraceIsDeterministic) {
    TempDir dir;
    const std::string radii = dir.file("r.txt", "0.3\n2\n1\n1.1\n0.9\n");
    const std::string a = dir.file("a.csv"), b = dir.file("b.csv");
    ASSERT_EQ(invoke({"flow", five(), "--radii", radii, "--out", a}).code, 0);
    ASSERT_EQ(invoke({"flow", five(), "--radii", radii, "--out", b}).code, 0);
    EXPECT_EQ(read_text_file(a), read_text_file(b));
}

TEST(Cli, EngineeredCollapseIsBoundaryHit) {
    TempDir dir;
    const fixture::Collapse c = fixture::engineered_collapse();
    const std::string radii = dir.file("r.txt", format_radii(c.r0.vector()));
    const std::string target = dir.file("k.txt", format_radii(c.target));
    const Result res = invoke({"flow", five(), "--radii", radii, "--mode", "prescribed", "--target-curvature", target});
    EXPECT_EQ(res.code, 4) << res.out << res.err;
    EXPECT_NE(res.out.find("boundary QCollapse"), std::string::npos) << res.out;
}

TEST(Cli, InvariantPrescribedAndChi) {
    TempDir dir;
    const Result inv = invoke({"invariant", five(), "--starts", "4", "--seed", "3"});
    ASSERT_EQ(inv.code, 0) << inv.err;
    EXPECT_NEAR(std::stod(key_values(inv.out, ' ').at("invariant")), 4 * oracle::kPi - 4 * oracle::alpha_bar(), 1e-8);

    const PackingVector rbar({1.3, 0.8, 1.0, 1.1, 0.9});
    const auto k = curvature(generate_boundary_4simplex(), rbar).k;
    const std::string target = dir.file("k.txt", format_radii(k));
    const Result pres = invoke({"prescribed", five(), "--target-curvature", target});
    ASSERT_EQ(pres.code, 0) << pres.out << pres.err;
    EXPECT_NE(pres.out.find("solved true"), std::string::npos);

    const Result stuck = invoke({"minimize", five(), "--radii", dir.file("r.txt", "1.4\n0.6\n1\n1.1\n0.9\n"),
                              "--max-iters", "1"});
    EXPECT_EQ(stuck.code, 9);

    const Result chi = invoke({"chi-estimate", five(), "--rays", "8", "--samples", "16", "--seed", "5"});
    ASSERT_EQ(chi.code, 0) << chi.err;
    const auto kv = key_values(chi.out, ' ');
    EXPECT_GE(std::stod(kv.at("chi_estimate")), std::stod(kv.at("lambda_hat")));
    EXPECT_EQ(chi.out, invoke({"chi-estimate", five(), "--rays", "8", "--samples", "16", "--seed", "5"}).out);
}
