#include <sosq/suite.hpp>

#include <gtest/gtest.h>

using namespace sosq;

namespace {

RunConfig config(const char* text)
{
    RunConfig c = parse_config(json::parse(text));
    validate_config(c);
    return c;
}

}  // namespace

TEST(Config, Defaults)
{
    const RunConfig c = config("{}");
    EXPECT_EQ(c.kernel, KernelKind::elliptic);
    EXPECT_EQ(c.length, 4);
    EXPECT_EQ(c.seed, 42u);
    EXPECT_EQ(c.labels, (std::vector<int>{2, 3}));
    EXPECT_EQ(c.selected_suites().size(), 17u);
    EXPECT_EQ(c.generic_model().eta(), cplx(0.5));
    EXPECT_EQ(c.line_model(KernelKind::elliptic).eta(), cplx(kCombinatorialEta));
}

TEST(Config, FieldsAndTokens)
{
    const RunConfig c = config(R"({"kernel": "trigonometric", "tau": [0.1, 0.9], "eta": "2pi/3", "zeta": [0.2, -0.1],
                                  "L": 6, "anchor": 2, "u": "random:7", "j": 3, "suites": ["rsos"],
                                  "tolerances": {"rsos": 1e-6}, "output": {"path": "r.csv", "format": "csv"}})");
    EXPECT_EQ(c.kernel, KernelKind::trigonometric);
    EXPECT_EQ(c.tau, cplx(0.1, 0.9));
    EXPECT_TRUE(c.eta_exact);
    EXPECT_EQ(c.generic_model().eta(), cplx(kCombinatorialEta));
    EXPECT_EQ(c.zeta, cplx(0.2, -0.1));
    EXPECT_EQ(c.length, 6);
    EXPECT_EQ(c.anchor, 2);
    EXPECT_EQ(c.seed, 7u);
    EXPECT_FALSE(c.u);
    EXPECT_EQ(c.labels, std::vector<int>{3});
    EXPECT_EQ(c.tolerances.at("rsos"), 1e-6);
    EXPECT_EQ(c.output, "r.csv");
    EXPECT_EQ(c.format, "csv");
}

TEST(Config, NumericEtaAppliesEverywhere)
{
    const RunConfig c = config(R"({"eta": 2.1})");
    EXPECT_EQ(c.generic_model().eta(), cplx(2.1));
    EXPECT_EQ(c.line_model(KernelKind::elliptic).eta(), cplx(2.1));
}

TEST(Config, Rejections)
{
    for (const char* bad : {R"({"colour": 1})", R"({"kernel": "hyperbolic"})", R"({"tau": [0, -1]})", R"({"L": 5})",
                            R"({"L": 14})", R"({"eta": "2pi"})", R"({"u": "random:"})", R"({"u": "random:12x"})",
                            R"({"u": [[0.1, 0.2]]})", R"({"j": 4})", R"({"j": "two"})", R"({"suites": ["wheels"]})",
                            R"({"draws": 0})", R"({"output": {"format": "xml"}})", R"({"tau": "i"})", "[1, 2]"}) {
        EXPECT_THROW(config(bad), ConfigError) << bad;
    }
    // rational kernel does not need a modulus
    EXPECT_NO_THROW(config(R"({"kernel": "rational", "tau": [0, -1]})"));
}

TEST(Config, MissingFileIsConfigError)
{
    EXPECT_THROW(load_config("/nonexistent/config.json"), ConfigError);
}

TEST(Config, DigestTracksContent)
{
    EXPECT_EQ(config_digest(config("{}")), config_digest(config(R"({"seed": 42})")));
    EXPECT_NE(config_digest(config("{}")), config_digest(config(R"({"seed": 43})")));
    EXPECT_EQ(config_digest(config("{}")).size(), 16u);
}

TEST(Verify, ReportIsDeterministic)
{
    RunConfig c = config(R"({"suites": ["exchange", "cycle", "riemann-xi", "eigenvector"]})");
    const std::string a = report_to_json(run_verify(c, 1)).dump();
    const std::string b = report_to_json(run_verify(c, 3)).dump();
    EXPECT_EQ(a, b);
    EXPECT_EQ(a.find("wall_time"), std::string::npos);
    c.seed = 43;
    EXPECT_NE(report_to_json(run_verify(c, 1)).dump(), a);
}

TEST(Verify, SuiteNamesMapToReports)
{
    for (const std::string& name : suite_names()) {
        if (name == "spectrum" || name == "contour-n1" || name == "laurent-degree") continue;  // covered by the CLI test
        RunConfig c = config("{}");
        c.suites = {name};
        c.draws = 1;
        const SuiteReport r = run_verify(c, 1);
        ASSERT_FALSE(r.entries.empty()) << name;
        for (const auto& e : r.entries) {
            EXPECT_EQ(e.suite, name);
            EXPECT_TRUE(e.report.passed) << e.report.name << " " << e.report.residual;
        }
    }
}

TEST(Verify, NegativeControlExitsOne)
{
    const RunConfig c = config(R"({"eta": 2.1043951023931953, "suites": ["eigenvector"]})");
    const SuiteReport r = run_verify(c, 1);
    EXPECT_FALSE(r.passed());
    EXPECT_EQ(exit_code(r), kExitFail);
    for (const auto& e : r.entries) EXPECT_GT(e.report.residual, 1e-3);
}

TEST(Verify, RationalSkipsCombinatorialSuites)
{
    const RunConfig c = config(R"({"kernel": "rational", "suites": ["eigenvector", "rsos", "spectrum"]})");
    const SuiteReport r = run_verify(c, 1);
    EXPECT_TRUE(r.entries.empty());
    EXPECT_EQ(r.skipped.size(), 3u);
    EXPECT_EQ(exit_code(r), kExitPass);
}

TEST(Verify, PoleDominatedExplicitPoint)
{
    const RunConfig c = config(R"({"eta": 0.5, "u": [[0, 0], [0.5, 0], [0.2, 0.1], [-0.3, 0.05]], "suites": ["cycle"]})");
    EXPECT_THROW(run_verify(c, 1), PoleDominatedRun);
}

TEST(Verify, CsvHasOneRowPerReport)
{
    const RunConfig c = config(R"({"suites": ["cycle"], "draws": 2})");
    const SuiteReport r = run_verify(c, 1);
    const std::string csv = report_to_csv(r);
    EXPECT_EQ(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')), r.entries.size() + 1);
}

TEST(Components, RowCountsAndReferences)
{
    RunConfig c = config(R"({"u": [[0.1, 0.2], [0.3, -0.1], [-0.4, 0.05], [0.7, 0.1]]})");
    const auto rows = emit_components(c);
    EXPECT_EQ(rows.size(), 12u);  // 6 per label
    EXPECT_EQ(components_to_csv(rows), components_to_csv(emit_components(c)));

    c = config(R"({"L": 2, "j": 3, "u": [[0.1, 0.2], [0.3, -0.1]]})");
    EXPECT_EQ(emit_components(c).size(), 2u);
}

TEST(Spectrum, CommandGuards)
{
    EXPECT_THROW(spectrum_cmd(config(R"({"L": 8})")), ConfigError);
    const auto reps = spectrum_cmd(config(R"({"kernel": "trigonometric", "j": 3})"));
    ASSERT_EQ(reps.size(), 1u);
    EXPECT_TRUE(reps[0].first_excited);
}
